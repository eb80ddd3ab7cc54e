"""Two-level working agent: states, Rabi drive, projective readout.

Basis convention
----------------
Amplitude and matrix index 0 is the excited state |1>, index 1 the ground
state |0>. With this ordering the Pauli matrices take their textbook form and
``sigma_z = |1><1| - |0><0|`` so the Bloch z component of a state is
``2 U - 1`` where ``U`` is its internal energy.

All energies are dimensionless, in units of hbar * omega0. Dynamics are in the
frame rotating at omega0, where free precession is the identity.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
IDENTITY = np.eye(2, dtype=np.complex128)
# H0 / (hbar omega0) = |1><1|
H0 = np.array([[1, 0], [0, 0]], dtype=np.complex128)

STATE_TOL = 1e-12

for _m in (SIGMA_X, SIGMA_Y, SIGMA_Z, IDENTITY, H0):
    _m.setflags(write=False)


class Outcome(enum.Enum):
    PLUS = "+"
    MINUS = "-"

    @property
    def sign(self) -> int:
        return 1 if self is Outcome.PLUS else -1


def _frozen(a):
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class QubitState:
    """Density matrix of the qubit; the single source of truth for a state.

    Construct through :meth:`pure`, :meth:`from_density` or the named
    constructors. The matrix is validated (unit trace, Hermitian, positive)
    and stored read-only.
    """

    rho: np.ndarray

    def __post_init__(self):
        rho = _frozen(self.rho)
        if rho.shape != (2, 2):
            raise ValueError(f"density matrix must be 2x2, got {rho.shape}")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_density(cls, rho, tol: float = STATE_TOL) -> "QubitState":
        rho = np.asarray(rho, dtype=np.complex128)
        if rho.shape != (2, 2):
            raise ValueError(f"density matrix must be 2x2, got {rho.shape}")
        if abs(np.trace(rho) - 1.0) > tol:
            raise ValueError(f"trace {np.trace(rho)} differs from 1")
        if np.max(np.abs(rho - rho.conj().T)) > tol:
            raise ValueError("density matrix is not Hermitian")
        w = np.linalg.eigvalsh(rho)
        if w.min() < -tol or w.max() > 1 + tol:
            raise ValueError(f"eigenvalues {w} outside [0, 1]")
        return cls(rho)

    @classmethod
    def pure(cls, amplitudes, tol: float = STATE_TOL) -> "QubitState":
        """Pure state from amplitudes ``(c_excited, c_ground)``."""
        psi = np.asarray(amplitudes, dtype=np.complex128).reshape(2)
        if abs(np.vdot(psi, psi).real - 1.0) > tol:
            raise ValueError("amplitudes are not normalized")
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def from_bloch(cls, vector) -> "QubitState":
        x, y, z = (float(v) for v in vector)
        if x * x + y * y + z * z > 1 + STATE_TOL:
            raise ValueError("Bloch vector longer than 1")
        return cls(0.5 * (IDENTITY + x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z))

    @classmethod
    def excited(cls) -> "QubitState":
        return cls.pure([1, 0])

    @classmethod
    def ground(cls) -> "QubitState":
        return cls.pure([0, 1])

    @classmethod
    def maximally_mixed(cls) -> "QubitState":
        return cls(0.5 * IDENTITY)

    @property
    def bloch(self) -> np.ndarray:
        r = self.rho
        return np.array(
            [2 * r[0, 1].real, -2 * r[0, 1].imag, (r[0, 0] - r[1, 1]).real]
        )

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.rho @ self.rho)))

    def expect(self, op) -> float:
        return float(np.real(np.trace(self.rho @ op)))

    def fidelity(self, other: "QubitState") -> float:
        """Uhlmann fidelity (squared-overlap convention)."""
        # for 2x2: F = tr(r s) + 2 sqrt(det r det s)
        dr = max(np.linalg.det(self.rho).real, 0.0)
        ds = max(np.linalg.det(other.rho).real, 0.0)
        f = np.real(np.trace(self.rho @ other.rho)) + 2.0 * math.sqrt(dr * ds)
        return float(min(max(f, 0.0), 1.0))

    def trace_distance(self, other: "QubitState") -> float:
        return 0.5 * float(np.linalg.norm(self.bloch - other.bloch))

    def __repr__(self):
        x, y, z = self.bloch
        return f"QubitState(bloch=({x:.6g}, {y:.6g}, {z:.6g}))"


@dataclass(frozen=True)
class BlochAxis:
    """Measurement axis n given by polar ``theta_n`` and azimuth ``phi_n``.

    ``phi_n`` is wrapped into [0, 2 pi); ``theta_n`` must lie in [0, pi].
    """

    theta_n: float
    phi_n: float = 0.0

    def __post_init__(self):
        th = float(self.theta_n)
        if not (-STATE_TOL <= th <= math.pi + STATE_TOL):
            raise ValueError(f"theta_n={th} outside [0, pi]")
        th = min(max(th, 0.0), math.pi)
        object.__setattr__(self, "theta_n", th)
        object.__setattr__(self, "phi_n", float(self.phi_n) % (2 * math.pi))

    @classmethod
    def from_vector(cls, vector) -> "BlochAxis":
        v = np.asarray(vector, dtype=float)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValueError("zero vector has no direction")
        x, y, z = v / norm
        return cls(math.acos(max(-1.0, min(1.0, z))), math.atan2(y, x))

    @property
    def cartesian(self) -> np.ndarray:
        st = math.sin(self.theta_n)
        return np.array(
            [st * math.cos(self.phi_n), st * math.sin(self.phi_n), math.cos(self.theta_n)]
        )

    def opposite(self) -> "BlochAxis":
        return BlochAxis(math.pi - self.theta_n, self.phi_n + math.pi)

    def ket(self) -> np.ndarray:
        """Amplitudes of |+n> (defined up to global phase)."""
        h = 0.5 * self.theta_n
        return np.array(
            [
                np.exp(-0.5j * self.phi_n) * math.cos(h),
                np.exp(0.5j * self.phi_n) * math.sin(h),
            ]
        )


X_AXIS = BlochAxis(math.pi / 2, 0.0)
Y_AXIS = BlochAxis(math.pi / 2, math.pi / 2)
Z_AXIS = BlochAxis(0.0, 0.0)


@functools.lru_cache(maxsize=4096)
def basis_states(axis: BlochAxis) -> tuple[QubitState, QubitState]:
    """Return ``(|+n>, |-n>)``; the partner is built as |+(-n)>."""
    return QubitState.pure(axis.ket()), QubitState.pure(axis.opposite().ket())


def rotation_y(theta: float) -> np.ndarray:
    """exp(-i theta sigma_Y / 2)."""
    c, s = math.cos(0.5 * theta), math.sin(0.5 * theta)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rotation(axis_vector, angle: float) -> np.ndarray:
    """exp(-i angle (m . sigma) / 2) for a unit vector m."""
    mx, my, mz = axis_vector
    gen = mx * SIGMA_X + my * SIGMA_Y + mz * SIGMA_Z
    return math.cos(0.5 * angle) * IDENTITY - 1j * math.sin(0.5 * angle) * gen


def apply_unitary(state: QubitState, u) -> QubitState:
    return QubitState(u @ state.rho @ np.conj(u).T)


def rabi_evolve(state: QubitState, theta: float) -> QubitState:
    """Resonant drive for a Rabi angle ``theta``: a rotation about Y."""
    return apply_unitary(state, rotation_y(theta))


PROB_SNAP = 1e-15


def snap_probability(p: float) -> float:
    """Clip to [0, 1]; values within 1e-15 of an endpoint become exact."""
    p = float(p)
    if p < PROB_SNAP:
        return 0.0
    if p > 1.0 - PROB_SNAP:
        return 1.0
    return p


def _plus_probability(state: QubitState, axis: BlochAxis) -> float:
    plus, _ = basis_states(axis)
    # <+n|rho|+n> = Tr[rho P+] = vdot(P+, rho) since P+ is Hermitian
    return snap_probability(np.vdot(plus.rho, state.rho).real)


def measure(state: QubitState, axis: BlochAxis, rng_draw: float):
    """Ideal projective readout along ``axis``.

    The outcome is ``+`` iff ``rng_draw < p_plus``. Returns
    ``(outcome, post_state, probability_of_outcome)``.
    """
    plus, minus = basis_states(axis)
    p_plus = _plus_probability(state, axis)
    if rng_draw < p_plus:
        return Outcome.PLUS, plus, p_plus
    return Outcome.MINUS, minus, 1.0 - p_plus


def outcome_probabilities(state: QubitState, axis: BlochAxis) -> tuple[float, float]:
    p_plus = _plus_probability(state, axis)
    return p_plus, 1.0 - p_plus


def dephase(state: QubitState, axis: BlochAxis) -> QubitState:
    """Non-selective measurement channel along ``axis``."""
    plus, minus = basis_states(axis)
    p_plus = _plus_probability(state, axis)
    return QubitState(p_plus * plus.rho + (1.0 - p_plus) * minus.rho)


def internal_energy(state: QubitState) -> float:
    """Tr[rho H0] in units of hbar omega0."""
    return float(state.rho[0, 0].real)


def shannon_entropy_bits(p):
    """Binary Shannon entropy H2(p) in bits; exact zero at the endpoints.

    Accepts a scalar or an array. Values outside [0, 1] raise ``ValueError``.
    """
    if isinstance(p, (float, int)) or np.ndim(p) == 0:
        x = float(p)
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"probability outside [0, 1]: {p!r}")
        if x == 0.0 or x == 1.0:
            return 0.0
        return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)
    arr = np.asarray(p, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError(f"probability outside [0, 1]: {p!r}")
    out = np.zeros_like(arr)
    inner = (arr > 0.0) & (arr < 1.0)
    x = arr[inner]
    out[inner] = -x * np.log2(x) - (1.0 - x) * np.log2(1.0 - x)
    return out
