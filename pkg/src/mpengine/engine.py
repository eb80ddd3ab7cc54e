"""Engine cycles, yields and power.

Energies are in units of hbar omega0 and powers in hbar omega0 per unit of
time (the unit of ``tau_w``). ``kappa = 2 k_B T_D log(2) / (hbar omega0)`` is
the dimensionless erasure cost, so erasing one bit costs ``kappa / 2``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .qubit import (
    X_AXIS,
    Z_AXIS,
    BlochAxis,
    Outcome,
    QubitState,
    SIGMA_X,
    apply_unitary,
    basis_states,
    dephase,
    internal_energy,
    measure,
    outcome_probabilities,
    rabi_evolve,
    rotation,
    shannon_entropy_bits,
)


class SingularInputError(ValueError):
    """Raised when a closed form is evaluated exactly at a 0/0 point."""


@dataclass(frozen=True)
class EngineParams:
    """One engine configuration.

    ``theta`` is the Rabi angle per drive interval. ``omega`` and ``tau_w``
    are only needed to turn work into power; if both are given they must
    satisfy ``theta == omega * tau_w``. Missing ones are filled in from the
    other two (``tau_w`` defaults to 1).
    """

    theta: float
    kappa: float = 0.5
    axis: BlochAxis = X_AXIS
    omega: Optional[float] = None
    tau_w: Optional[float] = None
    tau_mes: float = 0.0

    def __post_init__(self):
        theta, omega, tau_w = float(self.theta), self.omega, self.tau_w
        if theta < 0:
            raise ValueError("theta must be >= 0")
        if self.kappa < 0:
            raise ValueError("kappa must be >= 0")
        if self.tau_mes < 0:
            raise ValueError("tau_mes must be >= 0")
        if tau_w is None:
            tau_w = theta / omega if omega not in (None, 0) else 1.0
        if tau_w <= 0:
            raise ValueError("tau_w must be > 0")
        if omega is None:
            omega = theta / tau_w
        if abs(omega * tau_w - theta) > 1e-12 * max(1.0, abs(theta)):
            raise ValueError(f"theta={theta} inconsistent with omega*tau_w={omega * tau_w}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "omega", float(omega))
        object.__setattr__(self, "tau_w", float(tau_w))
        object.__setattr__(self, "kappa", float(self.kappa))
        object.__setattr__(self, "tau_mes", float(self.tau_mes))

    @classmethod
    def from_drive(cls, omega, tau_w, tau_mes=0.0, **kw) -> "EngineParams":
        return cls(theta=omega * tau_w, omega=omega, tau_w=tau_w, tau_mes=tau_mes, **kw)

    @property
    def cycle_time(self) -> float:
        return self.tau_w + self.tau_mes


@dataclass(frozen=True)
class CycleLedger:
    """Energy and entropy bookkeeping for one cycle (hbar omega0 units)."""

    w_ext: float
    e_meas: float
    w_fb: float
    s_demon_bits: float
    w_er: float
    outcome: Optional[Outcome] = None
    q_hot: float = 0.0

    @property
    def net_work(self) -> float:
        return self.w_ext + self.w_fb - self.w_er

    @property
    def resource(self) -> float:
        return self.q_hot + self.e_meas

    @property
    def efficiency(self) -> float:
        """Net work over the energy resource; nan when the resource is <= 0."""
        if self.resource <= 0:
            return math.nan
        return self.net_work / self.resource


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def classical_yield(kappa: float) -> float:
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    return 1.0 - kappa


def mpe_yield(theta: float, kappa: float) -> float:
    """Yield of the x-axis engine, ``1 - kappa H2[cos^2(theta/2)] / sin(theta)``."""
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    if theta == 0.0 or theta == math.pi:
        raise SingularInputError(f"yield is singular at theta={theta}; use the limit")
    if not 0.0 < theta < math.pi:
        raise ValueError("theta must lie in (0, pi)")
    # H2 is symmetric; the sin^2 branch keeps precision as theta -> 0
    h = shannon_entropy_bits(math.sin(0.5 * theta) ** 2)
    return 1.0 - kappa * h / math.sin(theta)


def work_extracted(axis: BlochAxis, theta: float) -> float:
    """Work given to the drive during one interval starting in |+n>."""
    if theta < 0:
        raise ValueError("theta must be >= 0")
    tn, pn = axis.theta_n, axis.phi_n
    return 0.5 * (
        (1.0 - math.cos(theta)) * math.cos(tn)
        + math.sin(theta) * math.sin(tn) * math.cos(pn)
    )


def feedback_work(axis: BlochAxis, theta: float) -> float:
    """Mean work contributed by the feedback restoring |+n> after a ``-``."""
    if axis.theta_n == math.pi / 2:
        # equatorial axes: |+n> and |-n> are degenerate, feedback is free
        return 0.0
    y = math.sin(axis.theta_n) * math.sin(axis.phi_n)
    return -math.sin(0.5 * theta) ** 2 * math.cos(axis.theta_n) * (1.0 - y * y)


def _power_shape(x, y, z, theta):
    # (sin t / t) x + ((1 - cos t) / t) z y^2, with the t -> 0 limit x
    if theta == 0.0:
        return x + 0.0 * z
    return (math.sin(theta) / theta) * x + ((1.0 - math.cos(theta)) / theta) * z * y * y


def mean_power(axis: BlochAxis, theta: float, omega: float) -> float:
    """Steady-state extracted power with feedback and instantaneous readout."""
    if theta < 0:
        raise ValueError("theta must be >= 0")
    x, y, z = axis.cartesian
    return 0.5 * omega * float(_power_shape(x, y, z, theta))


def normalized_power_map(theta_n, phi_n, theta):
    """Vectorized ``mean_power / omega`` over arrays of axis angles."""
    if theta < 0:
        raise ValueError("theta must be >= 0")
    theta_n = np.asarray(theta_n, dtype=float)
    phi_n = np.asarray(phi_n, dtype=float)
    st = np.sin(theta_n)
    x = st * np.cos(phi_n)
    y = st * np.sin(phi_n)
    z = np.cos(theta_n)
    return 0.5 * _power_shape(x, y, z, float(theta))


def instantaneous_power(state: QubitState, omega: float) -> float:
    """Drive-port power ``(omega / 2) <sigma_X>``."""
    return 0.5 * omega * state.expect(SIGMA_X)


def mean_measurement_energy(axis: BlochAxis, theta: float) -> float:
    """Outcome-averaged energy the readout gives to the qubit."""
    plus, _ = basis_states(axis)
    driven = rabi_evolve(plus, theta)
    return internal_energy(dephase(driven, axis)) - internal_energy(driven)


def engine_yield(axis: BlochAxis, theta: float, kappa: float) -> float:
    """Yield for an arbitrary axis, nan where the readout supplies no energy."""
    plus, _ = basis_states(axis)
    p_plus, _ = outcome_probabilities(rabi_evolve(plus, theta), axis)
    e_meas = mean_measurement_energy(axis, theta)
    if e_meas <= 0:
        return math.nan
    w_er = 0.5 * kappa * shannon_entropy_bits(p_plus)
    return (work_extracted(axis, theta) + feedback_work(axis, theta) - w_er) / e_meas


# ---------------------------------------------------------------------------
# Cycle simulation
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=4096)
def feedback_unitary(axis: BlochAxis) -> np.ndarray:
    """pi rotation about an axis orthogonal to n, mapping |-n> to |+n>.

    The rotation axis is the part of z orthogonal to n (z itself for the
    x-axis engine, i.e. free precession); x is used when n is along z.
    """
    n = axis.cartesian
    m = np.array([0.0, 0.0, 1.0]) - n[2] * n
    norm = np.linalg.norm(m)
    if norm < 1e-9:
        m = np.array([1.0, 0.0, 0.0]) - n[0] * n
        norm = np.linalg.norm(m)
    u = rotation(m / norm, math.pi)
    u.setflags(write=False)
    return u


def run_cycle(params: EngineParams, state: QubitState, rng_draw: float):
    """Drive, read out, feed back and erase once.

    ``state`` should be |+n>. Returns ``(next_state, ledger)``. The ledger
    carries the realized measurement energy and feedback work; the demon's
    entropy is that of the outcome distribution.
    """
    axis = params.axis
    u0 = internal_energy(state)
    driven = rabi_evolve(state, params.theta)
    u1 = internal_energy(driven)
    outcome, projected, p_outcome = measure(driven, axis, rng_draw)
    p_plus = p_outcome if outcome is Outcome.PLUS else 1.0 - p_outcome
    u2 = internal_energy(projected)
    restored = projected
    if outcome is Outcome.MINUS:
        restored = apply_unitary(projected, feedback_unitary(axis))
    u3 = internal_energy(restored)
    s_d = shannon_entropy_bits(p_plus)
    ledger = CycleLedger(
        w_ext=u0 - u1,
        e_meas=u2 - u1,
        w_fb=u2 - u3,
        s_demon_bits=s_d,
        w_er=0.5 * params.kappa * s_d,
        outcome=outcome,
    )
    return restored, ledger


def thermal_cycle_reference(kappa: float) -> CycleLedger:
    """Mean ledger of the hot-bath engine measuring in the energy basis."""
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    hot = QubitState.maximally_mixed()
    p_excited, _ = outcome_probabilities(hot, Z_AXIS)
    excited = QubitState.excited()
    # a pi pulse is applied only on the |1> outcome
    w_ext = p_excited * (internal_energy(excited) - internal_energy(rabi_evolve(excited, math.pi)))
    s_d = shannon_entropy_bits(p_excited)
    return CycleLedger(
        w_ext=w_ext,
        e_meas=0.0,
        w_fb=0.0,
        s_demon_bits=s_d,
        w_er=0.5 * kappa * s_d,
        q_hot=internal_energy(hot),
    )


class AuditBranch(NamedTuple):
    pulse1_work: float
    projection_energy: float
    pulse2_work: float
    total: float
    probability: float


def audit_effective_readout(theta: float, outcome: Outcome) -> AuditBranch:
    """Split the x readout into pi/2 pulse, sigma_Z projection, pi/2 pulse.

    ``Outcome.PLUS`` is the |1> branch of the sigma_Z measurement (the
    branch mapped back onto |+x>), ``Outcome.MINUS`` the |0> branch.
    Entries are energies given to the qubit by each step.
    """
    if not 0.0 <= theta < math.pi:
        raise ValueError("theta must lie in [0, pi)")
    plus_x, _ = basis_states(X_AXIS)
    driven = rabi_evolve(plus_x, theta)
    mapped = rabi_evolve(driven, -math.pi / 2)
    p_excited, p_ground = outcome_probabilities(mapped, Z_AXIS)
    if outcome is Outcome.PLUS:
        projected, prob = QubitState.excited(), p_excited
    else:
        projected, prob = QubitState.ground(), p_ground
    restored = rabi_evolve(projected, math.pi / 2)
    pulse1 = internal_energy(mapped) - internal_energy(driven)
    projection = internal_energy(projected) - internal_energy(mapped)
    pulse2 = internal_energy(restored) - internal_energy(projected)
    return AuditBranch(pulse1, projection, pulse2, pulse1 + projection + pulse2, prob)


LEDGER_FIELDS = ("w_ext", "e_meas", "w_fb", "s_demon_bits", "w_er")


def cycle_ensemble(params: EngineParams, n_realizations: int, seed: int = 0, stream: int = 0):
    """Repeat :func:`run_cycle` from |+n> with independent draws.

    Returns ``{field: (mean, standard_error)}`` over the ledger fields.
    Draws come from a Philox stream keyed by ``(seed, stream)``.
    """
    if n_realizations < 1:
        raise ValueError("n_realizations must be >= 1")
    ss = np.random.SeedSequence(seed, spawn_key=(stream,))
    draws = np.random.Generator(np.random.Philox(ss)).random(n_realizations)
    plus, _ = basis_states(params.axis)
    values = np.empty((n_realizations, len(LEDGER_FIELDS)))
    for i, u in enumerate(draws):
        _, ledger = run_cycle(params, plus, float(u))
        values[i] = [getattr(ledger, f) for f in LEDGER_FIELDS]
    mean = values.mean(axis=0)
    if n_realizations > 1:
        se = values.std(axis=0, ddof=1) / math.sqrt(n_realizations)
    else:
        se = np.zeros(len(LEDGER_FIELDS))
    return {f: (float(m), float(s)) for f, m, s in zip(LEDGER_FIELDS, mean, se)}
