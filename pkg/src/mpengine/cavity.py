"""Quantized drive: one cavity mode exchanging photons with the qubit.

The joint state is stored as two field vectors, the components multiplying
|1> (excited) and |0> (ground). The resonant Jaynes-Cummings coupling
``i (Omega0 / 2)(sigma_- a^dag - a sigma_-^dag)`` only mixes |1, n> with
|0, n + 1>, so evolution is an exact 2x2 rotation per excitation manifold.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from ._kernels import jc_propagate
from .qubit import X_AXIS, QubitState, basis_states, rabi_evolve

TAIL_TOL = 1e-10


class TruncationError(ValueError):
    """Fock space too small for the requested field."""


def default_n_max(n_bar: float) -> int:
    return int(math.ceil(n_bar + 8.0 * math.sqrt(n_bar) + 20.0))


@dataclass(frozen=True, eq=False)
class FieldState:
    """Photon-number amplitudes for n = 0 .. n_max; may be unnormalized."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def n_max(self) -> int:
        return self.amplitudes.shape[0] - 1

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm_squared(self) -> float:
        return float(self.populations.sum())

    def normalized(self) -> "FieldState":
        nsq = self.norm_squared
        if nsq == 0:
            raise ValueError("cannot normalize a zero-norm field")
        return FieldState(self.amplitudes / math.sqrt(nsq))

    def tail_mass(self) -> float:
        """Population in the last Fock level relative to the total."""
        nsq = self.norm_squared
        return float(self.populations[-1] / nsq) if nsq else 0.0

    def overlap(self, other: "FieldState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class JointState:
    excited: FieldState
    ground: FieldState

    def __post_init__(self):
        if self.excited.n_max != self.ground.n_max:
            raise ValueError("branches must share the same truncation")

    @classmethod
    def product(cls, qubit_amplitudes, field: FieldState) -> "JointState":
        ce, cg = np.asarray(qubit_amplitudes, dtype=np.complex128)
        return cls(FieldState(ce * field.amplitudes), FieldState(cg * field.amplitudes))

    @property
    def n_max(self) -> int:
        return self.excited.n_max

    @property
    def norm_squared(self) -> float:
        return self.excited.norm_squared + self.ground.norm_squared

    def excitation_distribution(self) -> np.ndarray:
        """P(k) for k = n + [qubit excited], k = 0 .. n_max + 1."""
        pe, pg = self.excited.populations, self.ground.populations
        dist = np.zeros(self.n_max + 2)
        dist[1:] += pe
        dist[:-1] += pg
        return dist

    def mean_excitation(self) -> float:
        d = self.excitation_distribution()
        return float(np.dot(np.arange(d.size), d))

    def reduced_qubit(self) -> QubitState:
        e, g = self.excited.amplitudes, self.ground.amplitudes
        rho = np.array(
            [[np.vdot(e, e), np.vdot(g, e)], [np.vdot(e, g), np.vdot(g, g)]],
            dtype=np.complex128,
        )
        return QubitState(rho / np.trace(rho).real)

    def mean_photon_number(self) -> float:
        n = np.arange(self.n_max + 1)
        return float(np.dot(n, self.excited.populations + self.ground.populations))

    def tail_mass(self) -> float:
        nsq = self.norm_squared
        return float((self.excited.populations[-1] + self.ground.populations[-1]) / nsq)


def coherent_state(alpha: complex, n_max: int | None = None) -> FieldState:
    """Truncated coherent state |alpha>.

    ``n_max`` defaults to ``ceil(nbar + 8 sqrt(nbar) + 20)`` and must be at
    least ``|alpha|^2 + 8 |alpha|``.
    """
    alpha = complex(alpha)
    r = abs(alpha)
    n_bar = r * r
    if n_max is None:
        n_max = default_n_max(n_bar)
    if n_max < n_bar + 8.0 * r:
        raise TruncationError(
            f"n_max={n_max} below |alpha|^2 + 8|alpha| = {n_bar + 8.0 * r:.3f}"
        )
    return FieldState(_coherent_amplitudes(alpha, n_max))


def _coherent_amplitudes(alpha: complex, n_max: int) -> np.ndarray:
    r = abs(alpha)
    n = np.arange(n_max + 1)
    if r == 0:
        amps = np.zeros(n_max + 1, dtype=np.complex128)
        amps[0] = 1.0
        return amps
    # log |alpha_n| = -nbar/2 + n log r - log(n!)/2, built by cumulative sums
    log_fact = np.concatenate(([0.0], np.cumsum(np.log(n[1:]))))
    log_mag = -0.5 * r * r + n * math.log(r) - 0.5 * log_fact
    return np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))


def fock_state(n: int, n_max: int) -> FieldState:
    amps = np.zeros(n_max + 1, dtype=np.complex128)
    amps[n] = 1.0
    return FieldState(amps)


def jc_evolve(state: JointState, omega0: float, t: float) -> JointState:
    e, g = jc_propagate(state.excited.amplitudes, state.ground.amplitudes, omega0, t)
    return JointState(FieldState(e), FieldState(g))


def project_qubit_x(state: JointState):
    """Split into the |+x> and |-x> branches.

    Returns ``(prob_plus, field_plus, prob_minus, field_minus)`` with the
    fields normalized (a zero-probability branch is returned unnormalized).
    """
    e, g = state.excited.amplitudes, state.ground.amplitudes
    # <+x| = (<1| + <0|)/sqrt2, <-x| = (<1| - <0|)/sqrt2
    plus = FieldState((e + g) / math.sqrt(2.0))
    minus = FieldState((e - g) / math.sqrt(2.0))
    p_plus, p_minus = plus.norm_squared, minus.norm_squared
    total = p_plus + p_minus
    p_plus, p_minus = p_plus / total, p_minus / total
    field_plus = plus.normalized() if p_plus > 0 else plus
    field_minus = minus.normalized() if p_minus > 0 else minus
    return p_plus, field_plus, p_minus, field_minus


def mean_photon_number(field: FieldState) -> float:
    nsq = field.norm_squared
    if nsq == 0:
        raise ValueError("mean photon number of a zero-norm field is undefined")
    return float(np.dot(np.arange(field.n_max + 1), field.populations) / nsq)


@dataclass(frozen=True)
class CavityReport:
    theta: float
    n_bar: float
    prob_minus: float
    analytic_prob_minus: float
    photon_gain: float
    analytic_gain: float
    fidelity_plus_branch: float
    truncation_tail_mass: float
    n_max: int
    norm_error: float
    excitation_error: float
    qubit_energy_change: float
    field_energy_change: float
    semiclassical_fidelity: float

    @property
    def prob_minus_rel_error(self) -> float:
        if self.analytic_prob_minus == 0:
            return abs(self.prob_minus)
        return abs(self.prob_minus / self.analytic_prob_minus - 1.0)

    @property
    def gain_rel_error(self) -> float:
        if self.analytic_gain == 0:
            return abs(self.photon_gain)
        return abs(self.photon_gain / self.analytic_gain - 1.0)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["prob_minus_rel_error"] = self.prob_minus_rel_error
        d["gain_rel_error"] = self.gain_rel_error
        return d


def run_quantized_cycle(alpha: complex, omega0: float, t: float, n_max: int | None = None) -> CavityReport:
    """One drive interval with the quantized field, then an x readout.

    The qubit starts in |+x> and the mode in |alpha>; the effective Rabi
    angle is ``theta = omega0 |alpha| t``. The report compares the exact
    numerics with the small-angle predictions: probability theta^2/4 for
    the ``-`` outcome, a photon gain theta/2 on the ``+`` branch, and a ``+``
    branch close to the coherent state of amplitude alpha (1 + theta/(4 nbar)).
    """
    field = coherent_state(alpha, n_max)
    n_bar = abs(complex(alpha)) ** 2
    theta = omega0 * math.sqrt(n_bar) * t
    plus_x, _ = basis_states(X_AXIS)
    psi0 = JointState.product(X_AXIS.ket(), field)
    psi = jc_evolve(psi0, omega0, t)
    tail = max(field.tail_mass(), psi.tail_mass())
    if tail > TAIL_TOL:
        raise TruncationError(f"population {tail:.3e} reaches the truncation edge n_max={field.n_max}")

    p_plus, field_plus, p_minus, _ = project_qubit_x(psi)
    n0 = mean_photon_number(field)
    gain = mean_photon_number(field_plus) - n0

    fidelity = 0.0
    if n_bar > 0:
        target = FieldState(_coherent_amplitudes(complex(alpha) * (1.0 + theta / (4.0 * n_bar)), field.n_max))
        fidelity = abs(target.normalized().overlap(field_plus)) ** 2

    dist0, dist1 = psi0.excitation_distribution(), psi.excitation_distribution()
    q0, q1 = psi0.reduced_qubit(), psi.reduced_qubit()
    semiclassical = rabi_evolve(plus_x, theta)
    return CavityReport(
        theta=theta,
        n_bar=n_bar,
        prob_minus=p_minus,
        analytic_prob_minus=theta * theta / 4.0,
        photon_gain=gain,
        analytic_gain=theta / 2.0,
        fidelity_plus_branch=float(fidelity),
        truncation_tail_mass=tail,
        n_max=field.n_max,
        norm_error=abs(psi.norm_squared - psi0.norm_squared),
        excitation_error=float(np.max(np.abs(dist1 - dist0))),
        qubit_energy_change=float(q1.rho[0, 0].real - q0.rho[0, 0].real),
        field_energy_change=psi.mean_photon_number() - psi0.mean_photon_number(),
        semiclassical_fidelity=q1.fidelity(semiclassical),
    )
