"""Stroboscopic x-measurement engine run as stochastic trajectories.

Each realization starts in |+x>. A cycle lasts ``tau_w + tau_mes``: the drive
rotates the qubit by ``theta`` and the readout projects it back onto |+x> or
|-x>. Without feedback the state performs quantum jumps between the two
working points; the extracted power of a cycle is ``+-(sin(theta)/2) / T``
depending on the occupied state.

Random draws are taken from a Philox (counter-based) stream keyed by
``(seed, realization index)``; draw ``k`` of that stream belongs to cycle
``k``. Ensembles are therefore identical under any chunking or schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import open_loop_signs
from .engine import EngineParams
from .qubit import (
    X_AXIS,
    basis_states,
    internal_energy,
    outcome_probabilities,
    rabi_evolve,
    snap_probability,
)

MHZ_TO_RAD_PER_NS_ANGULAR = 1e-3
MHZ_TO_RAD_PER_NS_CYCLIC = 2 * math.pi * 1e-3


@dataclass(frozen=True)
class TrajectoryConfig:
    params: EngineParams
    n_cycles: int
    n_realizations: int = 1
    seed: int = 0
    feedback_enabled: bool = False

    def __post_init__(self):
        if self.params.axis != X_AXIS:
            raise ValueError("trajectory engine runs on the x axis only")
        if int(self.n_cycles) < 1:
            raise ValueError("n_cycles must be >= 1")
        if int(self.n_realizations) < 1:
            raise ValueError("n_realizations must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "n_cycles", int(self.n_cycles))
        object.__setattr__(self, "n_realizations", int(self.n_realizations))
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def work_per_cycle(self) -> float:
        return 0.5 * math.sin(self.params.theta)

    @property
    def power_quantum(self) -> float:
        """Magnitude of the per-cycle power of a single realization."""
        return self.work_per_cycle / self.params.cycle_time

    def times(self) -> np.ndarray:
        return np.arange(self.n_cycles) * self.params.cycle_time


def drive_from_mhz(omega_mhz: float, convention: str = "angular") -> float:
    """Convert a drive frequency in MHz into rad/ns.

    ``angular`` reads the number as an angular frequency (rad/us), so that
    0.2 MHz over 70 ns gives theta = 0.014; ``cyclic`` multiplies by 2 pi.
    """
    if convention == "angular":
        return omega_mhz * MHZ_TO_RAD_PER_NS_ANGULAR
    if convention == "cyclic":
        return omega_mhz * MHZ_TO_RAD_PER_NS_CYCLIC
    raise ValueError(f"unknown frequency convention {convention!r}")


def physical_config(
    omega_mhz=0.2,
    tau_w_ns=70.0,
    tau_mes_ns=70.0,
    n_cycles=2000,
    n_realizations=10_000,
    seed=0,
    feedback_enabled=False,
    convention="angular",
):
    """Config in ns units, defaults matching the circuit-QED parameter set."""
    omega = drive_from_mhz(omega_mhz, convention)
    params = EngineParams.from_drive(omega, tau_w_ns, tau_mes_ns)
    return TrajectoryConfig(params, n_cycles, n_realizations, seed, feedback_enabled)


@dataclass(frozen=True)
class TrajectoryRecord:
    """One realization.

    ``outcomes[k]`` and ``signs[k]`` are +1/-1 for |+x>/|-x>: the readout
    result ending cycle ``k`` and the state occupied during its drive.
    """

    outcomes: np.ndarray
    signs: np.ndarray
    power_series: np.ndarray
    cumulative_work: np.ndarray


@dataclass(frozen=True)
class EnsembleStats:
    mean_power: np.ndarray
    std_error: np.ndarray
    mean_cumulative_work: np.ndarray
    polarization: np.ndarray
    n_realizations: int


def realization_uniforms(seed: int, realization: int, n_cycles: int) -> np.ndarray:
    ss = np.random.SeedSequence(seed, spawn_key=(realization,))
    return np.random.Generator(np.random.Philox(ss)).random(n_cycles)


def _flip_probabilities(theta):
    return snap_probability(math.cos(0.5 * theta) ** 2), snap_probability(math.sin(0.5 * theta) ** 2)


def simulate_trajectory(config: TrajectoryConfig, seed_offset: int = 0) -> TrajectoryRecord:
    """Single realization number ``seed_offset`` of ``config``."""
    u = realization_uniforms(config.seed, seed_offset, config.n_cycles)[None, :]
    p_keep, p_flip = _flip_probabilities(config.params.theta)
    signs, outcomes = open_loop_signs(u, p_keep, p_flip, config.feedback_enabled)
    signs, outcomes = signs[0], outcomes[0]
    work = signs * config.work_per_cycle
    return TrajectoryRecord(
        outcomes=outcomes,
        signs=signs,
        power_series=work / config.params.cycle_time,
        cumulative_work=np.cumsum(work),
    )


def run_ensemble(config: TrajectoryConfig, chunk: int = 1024) -> EnsembleStats:
    """Average ``n_realizations`` independent trajectories.

    ``std_error`` is the sample standard deviation of the per-cycle power
    divided by sqrt(n_realizations); it is 0 for a single realization.
    """
    n_r, n_c = config.n_realizations, config.n_cycles
    p_keep, p_flip = _flip_probabilities(config.params.theta)
    sign_sum = np.zeros(n_c, dtype=np.int64)
    for start in range(0, n_r, chunk):
        stop = min(start + chunk, n_r)
        u = np.empty((stop - start, n_c))
        for i, r in enumerate(range(start, stop)):
            u[i] = realization_uniforms(config.seed, r, n_c)
        signs, _ = open_loop_signs(u, p_keep, p_flip, config.feedback_enabled)
        sign_sum += signs.sum(axis=0, dtype=np.int64)
    polarization = sign_sum / n_r
    q = config.power_quantum
    if n_r > 1:
        # signs are +-1, so sum of squares is n_r; numerator is exact integer
        var = (n_r * n_r - sign_sum * sign_sum) / (n_r * (n_r - 1.0))
        std_error = q * np.sqrt(np.maximum(var, 0.0) / n_r)
    else:
        std_error = np.zeros(n_c)
    return EnsembleStats(
        mean_power=q * polarization,
        std_error=std_error,
        mean_cumulative_work=config.work_per_cycle * np.cumsum(polarization),
        polarization=polarization,
        n_realizations=n_r,
    )


def analytic_mean_power(config: TrajectoryConfig, n, variant: str = "exact"):
    """Mean power at cycle ``n`` (scalar or array).

    ``exact`` follows the exact recurrence, ``(sin(theta)/2) cos^n(theta) / T``.
    ``small_angle`` is the leading-order form ``(Omega/2) tau_w/T cos^n(theta)``.
    With feedback enabled there is no decay.
    """
    n = np.asarray(n)
    if np.any(n < 0):
        raise ValueError("cycle index must be >= 0")
    p = config.params
    decay = np.ones(n.shape) if config.feedback_enabled else np.cos(p.theta) ** n
    if variant == "exact":
        out = config.power_quantum * decay
    elif variant == "small_angle":
        out = 0.5 * p.omega * (p.tau_w / p.cycle_time) * decay
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return float(out) if out.ndim == 0 else out


def null_std_error(config: TrajectoryConfig, n):
    """Standard error of the ensemble mean power if the model is exact.

    The sign at cycle ``n`` has mean ``cos^n theta`` (1 with feedback), so
    its variance is ``1 - cos^(2n) theta``.
    """
    d = analytic_mean_power(config, n) / config.power_quantum
    var = np.maximum(1.0 - d * d, 0.0)
    return config.power_quantum * np.sqrt(var / config.n_realizations)


def agreement_mask(config: TrajectoryConfig, stats: EnsembleStats, sigmas: float = 4.0, reference=None) -> np.ndarray:
    """Cycles whose ensemble mean lies within ``sigmas`` standard errors.

    ``reference`` is the expected mean power per cycle (default: the exact
    closed form).

    Uses the sample standard error, except on cycles where every realization
    occupied the same state: there the sample variance is identically zero and
    the model standard error is used instead.
    """
    k = np.arange(config.n_cycles)
    exact = analytic_mean_power(config, k) if reference is None else np.asarray(reference)
    se = stats.std_error
    se = np.where(np.abs(stats.polarization) == 1.0, null_std_error(config, k), se)
    return np.abs(stats.mean_power - exact) <= sigmas * se + 1e-12 * config.power_quantum


def integrated_work(config: TrajectoryConfig, n):
    """Mean work accumulated over the first ``n`` cycles."""
    n = np.asarray(n)
    if np.any(n < 1):
        raise ValueError("cycle count must be >= 1")
    theta = config.params.theta
    c = math.cos(theta)
    if c == 1.0:
        out = config.work_per_cycle * n
    else:
        out = config.work_per_cycle * (1.0 - c ** n) / (1.0 - c)
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def max_integrated_work(theta: float) -> float:
    """Long-time limit of :func:`integrated_work`, ``cot(theta/2) / 2``."""
    if not 0.0 < theta < 2 * math.pi:
        raise ValueError("theta must lie in (0, 2 pi)")
    return 0.5 * math.sin(theta) / (1.0 - math.cos(theta))


def enumerate_outcome_tree(config: TrajectoryConfig):
    """Exact per-cycle mean work by walking every readout sequence.

    Independent of the closed forms: branch probabilities and works come
    from explicit state evolution and projection. Cost is 2**n_cycles.
    Returns ``(mean_work, polarization)`` arrays of length ``n_cycles``.
    """
    n_c = config.n_cycles
    if n_c > 20:
        raise ValueError("outcome tree enumeration limited to 20 cycles")
    theta = config.params.theta
    plus, minus = basis_states(X_AXIS)
    mean_work = np.zeros(n_c)
    polarization = np.zeros(n_c)
    layer = [(1.0, plus, 1)]
    for k in range(n_c):
        children = []
        for prob, state, sign in layer:
            driven = rabi_evolve(state, theta)
            mean_work[k] += prob * (internal_energy(state) - internal_energy(driven))
            polarization[k] += prob * sign
            p_plus, p_minus = outcome_probabilities(driven, X_AXIS)
            if config.feedback_enabled:
                children.append((prob, plus, 1))
                continue
            children.append((prob * p_plus, plus, 1))
            children.append((prob * p_minus, minus, -1))
        layer = children
    return mean_work, polarization
