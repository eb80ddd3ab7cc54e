import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpengine.qubit import (
    X_AXIS,
    Y_AXIS,
    Z_AXIS,
    BlochAxis,
    Outcome,
    QubitState,
    basis_states,
    dephase,
    internal_energy,
    measure,
    outcome_probabilities,
    rabi_evolve,
    shannon_entropy_bits,
)

angles = st.floats(-4 * math.pi, 4 * math.pi, allow_nan=False)
polar = st.floats(0.0, math.pi)
azimuth = st.floats(0.0, 2 * math.pi, exclude_max=True)
axes = st.builds(BlochAxis, polar, azimuth)


@st.composite
def states(draw):
    """Random mixed or pure state from a Bloch vector of length <= 1."""
    axis = draw(axes)
    r = draw(st.one_of(st.just(1.0), st.floats(0.0, 1.0)))
    return QubitState.from_bloch(r * axis.cartesian)


def close_states(a, b, tol=1e-12):
    return np.max(np.abs(a.rho - b.rho)) <= tol


# -- types ----------------------------------------------------------------


def test_state_validation_rejects_bad_matrices():
    with pytest.raises(ValueError):
        QubitState.from_density(np.diag([0.7, 0.7]))
    with pytest.raises(ValueError):
        QubitState.from_density([[0.5, 0.5], [0.2, 0.5]])
    with pytest.raises(ValueError):
        QubitState.from_density(np.diag([1.2, -0.2]))
    with pytest.raises(ValueError):
        QubitState.pure([1, 1])
    with pytest.raises(ValueError):
        QubitState.from_bloch([1, 1, 0])


def test_state_is_immutable():
    s = QubitState.excited()
    with pytest.raises(ValueError):
        s.rho[0, 0] = 0


@given(states())
def test_state_invariants(s):
    assert abs(np.trace(s.rho) - 1) <= 1e-12
    assert np.max(np.abs(s.rho - s.rho.conj().T)) <= 1e-12
    w = np.linalg.eigvalsh(s.rho)
    assert w.min() >= -1e-12 and w.max() <= 1 + 1e-12
    assert np.linalg.norm(s.bloch) <= 1 + 1e-12


@given(axes)
def test_axis_invariants(axis):
    assert abs(np.linalg.norm(axis.cartesian) - 1) <= 1e-12
    assert abs(np.linalg.norm(axis.ket()) - 1) <= 1e-12
    plus, _ = basis_states(axis)
    assert abs(np.linalg.norm(plus.bloch) - 1) <= 1e-9
    assert np.allclose(plus.bloch, axis.cartesian, atol=1e-12)


def test_axis_wraps_azimuth_and_rejects_bad_polar():
    assert BlochAxis(1.0, 2 * math.pi + 0.5).phi_n == pytest.approx(0.5)
    with pytest.raises(ValueError):
        BlochAxis(4.0, 0.0)


def test_axis_from_vector():
    a = BlochAxis.from_vector([0, 0, -2])
    assert a.theta_n == pytest.approx(math.pi)
    assert np.allclose(BlochAxis.from_vector([1, 1, 0]).cartesian, [2**-0.5, 2**-0.5, 0])


# -- basis_states -----------------------------------------------------------


def test_basis_states_z_axis():
    plus, minus = basis_states(Z_AXIS)
    assert close_states(plus, QubitState.excited())
    assert close_states(minus, QubitState.ground())


def test_basis_states_x_axis():
    plus, minus = basis_states(X_AXIS)
    assert close_states(plus, QubitState.pure(np.array([1, 1]) / math.sqrt(2)))
    assert close_states(minus, QubitState.pure(np.array([1, -1]) / math.sqrt(2)))


@given(axes)
def test_basis_states_orthogonal(axis):
    k_plus = axis.ket()
    k_minus = axis.opposite().ket()
    assert abs(np.vdot(k_plus, k_minus)) <= 1e-12


# -- rabi_evolve ------------------------------------------------------------


def test_pi_pulse_brings_excited_to_ground():
    assert close_states(rabi_evolve(QubitState.excited(), math.pi), QubitState.ground())


@given(states())
def test_zero_angle_is_identity(s):
    assert close_states(rabi_evolve(s, 0.0), s)


@pytest.mark.parametrize("theta", [0.0, 0.1, 0.5, math.pi / 2, 2.0, math.pi])
def test_rotated_plus_x_energy(theta):
    plus, _ = basis_states(X_AXIS)
    assert internal_energy(rabi_evolve(plus, theta)) == pytest.approx(
        (1 - math.sin(theta)) / 2, abs=1e-12
    )


@given(states(), angles)
def test_rabi_unitarity(s, theta):
    out = rabi_evolve(s, theta)
    assert abs(np.trace(out.rho) - 1) <= 1e-12
    assert abs(out.purity - s.purity) <= 1e-12


@given(states(), angles, angles)
def test_rabi_composition(s, t1, t2):
    assert close_states(rabi_evolve(rabi_evolve(s, t1), t2), rabi_evolve(s, t1 + t2), 1e-10)


# -- measure / dephase ------------------------------------------------------


@pytest.mark.parametrize("draw", [0.0, 0.5, 0.999999])
def test_measure_eigenstate(draw):
    plus, _ = basis_states(X_AXIS)
    outcome, post, prob = measure(plus, X_AXIS, draw)
    assert outcome is Outcome.PLUS
    assert close_states(post, plus)
    assert prob == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("theta", [0.05, 0.7, math.pi / 2, 2.5])
def test_measure_after_rotation(theta):
    plus, minus = basis_states(X_AXIS)
    driven = rabi_evolve(plus, theta)
    p_plus, p_minus = outcome_probabilities(driven, X_AXIS)
    assert p_minus == pytest.approx(math.sin(theta / 2) ** 2, abs=1e-12)
    # outcome + iff draw < p_plus
    assert measure(driven, X_AXIS, p_plus - 1e-9)[0] is Outcome.PLUS
    outcome, post, prob = measure(driven, X_AXIS, p_plus + 1e-9)
    assert outcome is Outcome.MINUS and close_states(post, minus)
    assert prob == pytest.approx(p_minus, abs=1e-12)


def test_excited_state_on_x_axis_is_fair():
    assert outcome_probabilities(QubitState.excited(), X_AXIS)[0] == pytest.approx(0.5, abs=1e-12)


def test_degenerate_probabilities_are_deterministic():
    plus, minus = basis_states(Z_AXIS)
    assert measure(plus, Z_AXIS, 0.9999999)[0] is Outcome.PLUS
    assert measure(minus, Z_AXIS, 0.0)[0] is Outcome.MINUS


@given(states(), axes)
def test_measurement_channel(s, axis):
    p_plus, p_minus = outcome_probabilities(s, axis)
    assert abs(p_plus + p_minus - 1) <= 1e-12
    plus, minus = basis_states(axis)
    mix = p_plus * plus.rho + p_minus * minus.rho
    assert np.max(np.abs(mix - dephase(s, axis).rho)) <= 1e-12


def test_dephase_examples():
    plus, _ = basis_states(Y_AXIS)
    assert close_states(dephase(plus, Y_AXIS), plus)
    theta = 0.9
    px, mx = basis_states(X_AXIS)
    out = dephase(rabi_evolve(px, theta), X_AXIS)
    expected = math.cos(theta / 2) ** 2 * px.rho + math.sin(theta / 2) ** 2 * mx.rho
    assert np.max(np.abs(out.rho - expected)) <= 1e-12


@given(states(), axes)
def test_dephase_idempotent_and_population_preserving(s, axis):
    once = dephase(s, axis)
    assert close_states(dephase(once, axis), once)
    assert outcome_probabilities(once, axis)[0] == pytest.approx(
        outcome_probabilities(s, axis)[0], abs=1e-12
    )


# -- energy and entropy -------------------------------------------------------


def test_internal_energy_examples():
    assert internal_energy(QubitState.excited()) == 1.0
    plus, minus = basis_states(X_AXIS)
    assert internal_energy(plus) == pytest.approx(0.5, abs=1e-12)
    assert internal_energy(minus) == pytest.approx(0.5, abs=1e-12)
    assert internal_energy(QubitState.maximally_mixed()) == 0.5


def test_energy_identity_over_axis_grid():
    for tn in np.linspace(0, math.pi, 19):
        for pn in np.linspace(0, 2 * math.pi, 12, endpoint=False):
            plus, _ = basis_states(BlochAxis(tn, pn))
            assert abs(internal_energy(plus) - (1 + math.cos(tn)) / 2) <= 1e-12


def test_shannon_entropy_examples():
    assert shannon_entropy_bits(0.5) == 1.0
    assert shannon_entropy_bits(1.0) == 0.0
    assert shannon_entropy_bits(0) == 0.0
    # mpmath at 40 digits: H2(cos^2(pi/8))
    assert shannon_entropy_bits(math.cos(math.pi / 8) ** 2) == pytest.approx(
        0.6008760366928561, rel=1e-14
    )


@pytest.mark.parametrize("p", [-0.1, 1.0001, float("nan")])
def test_shannon_entropy_domain(p):
    with pytest.raises(ValueError):
        shannon_entropy_bits(p)


def test_shannon_entropy_symmetry_and_bounds():
    p = np.linspace(0, 1, 10_001)
    h = shannon_entropy_bits(p)
    assert np.allclose(h, shannon_entropy_bits(1 - p), atol=1e-12)
    assert h.min() >= 0 and h.max() <= 1
    with pytest.raises(ValueError):
        shannon_entropy_bits(np.array([0.2, 1.5]))


@settings(max_examples=50)
@given(states(), states())
def test_fidelity_and_trace_distance(a, b):
    assert a.fidelity(a) == pytest.approx(1.0, abs=1e-9)
    f = a.fidelity(b)
    assert 0.0 <= f <= 1.0
    assert a.trace_distance(b) == pytest.approx(b.trace_distance(a))
