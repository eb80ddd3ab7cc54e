"""Hot inner loops, each with a numba and a pure-numpy implementation.

The public wrappers (:func:`open_loop_signs`, :func:`jc_propagate`) dispatch
on :data:`mpengine._accel.USE_NUMBA`. Both implementations consume exactly the
same inputs and are required to agree bit for bit on the integer outputs and
to rounding on the floating ones.
"""

import numpy as np

from . import _accel
from ._accel import njit

# ---------------------------------------------------------------------------
# Open-loop (or closed-loop) stroboscopic x-measurement chain
# ---------------------------------------------------------------------------


@njit(cache=True)
def _open_loop_numba(uniforms, p_keep, p_flip, feedback):
    n_real, n_cyc = uniforms.shape
    signs = np.empty((n_real, n_cyc), dtype=np.int8)
    outcomes = np.empty((n_real, n_cyc), dtype=np.int8)
    for r in range(n_real):
        s = 1
        for k in range(n_cyc):
            signs[r, k] = s
            # outcome + iff draw < p(+); p(+) depends on the pre-drive state
            p_plus = p_keep if s == 1 else p_flip
            o = 1 if uniforms[r, k] < p_plus else -1
            outcomes[r, k] = o
            s = 1 if feedback else o
    return signs, outcomes


def _open_loop_numpy(uniforms, p_keep, p_flip, feedback):
    n_real, n_cyc = uniforms.shape
    signs = np.empty((n_real, n_cyc), dtype=np.int8)
    outcomes = np.empty((n_real, n_cyc), dtype=np.int8)
    s = np.ones(n_real, dtype=np.int8)
    for k in range(n_cyc):
        signs[:, k] = s
        p_plus = np.where(s == 1, p_keep, p_flip)
        o = np.where(uniforms[:, k] < p_plus, 1, -1).astype(np.int8)
        outcomes[:, k] = o
        s = np.ones(n_real, dtype=np.int8) if feedback else o
    return signs, outcomes


def open_loop_signs(uniforms, p_keep, p_flip, feedback):
    """Run the +/-x measurement chain for a batch of realizations.

    Every realization starts in |+x>. ``uniforms[r, k]`` is the draw used by
    the measurement of cycle ``k``. Returns ``(signs, outcomes)`` as int8
    arrays of +1/-1: ``signs[r, k]`` is the eigenstate occupied while the
    drive of cycle ``k`` acts, ``outcomes[r, k]`` the readout that ends it.
    """
    uniforms = np.ascontiguousarray(uniforms, dtype=np.float64)
    if uniforms.ndim != 2:
        raise ValueError("uniforms must be a 2-D array (realizations, cycles)")
    fn = _open_loop_numba if _accel.USE_NUMBA else _open_loop_numpy
    return fn(uniforms, float(p_keep), float(p_flip), bool(feedback))


# ---------------------------------------------------------------------------
# Jaynes-Cummings propagator, one 2x2 rotation per excitation manifold
# ---------------------------------------------------------------------------


@njit(cache=True)
def _jc_numba(excited, ground, omega0, t):
    n = excited.shape[0]
    e_out = excited.copy()
    g_out = ground.copy()
    # manifold k = n + 1 couples |1, n> with |0, n + 1>; |1, n_max> has no
    # partner inside the truncated space and is left untouched
    for m in range(n - 1):
        a = 0.5 * omega0 * np.sqrt(m + 1.0) * t
        c = np.cos(a)
        s = np.sin(a)
        e = excited[m]
        g = ground[m + 1]
        e_out[m] = c * e - s * g
        g_out[m + 1] = s * e + c * g
    return e_out, g_out


def _jc_numpy(excited, ground, omega0, t):
    n = excited.shape[0]
    a = 0.5 * omega0 * np.sqrt(np.arange(1, n, dtype=np.float64)) * t
    c = np.cos(a)
    s = np.sin(a)
    e = excited[:-1]
    g = ground[1:]
    e_out = excited.copy()
    g_out = ground.copy()
    e_out[:-1] = c * e - s * g
    g_out[1:] = s * e + c * g
    return e_out, g_out


def jc_propagate(excited, ground, omega0, t):
    """Exact resonant JC propagator on the truncated product space.

    ``excited[n]`` and ``ground[n]`` are the amplitudes of |1, n> and |0, n>.
    """
    excited = np.ascontiguousarray(excited, dtype=np.complex128)
    ground = np.ascontiguousarray(ground, dtype=np.complex128)
    if excited.shape != ground.shape or excited.ndim != 1:
        raise ValueError("branch amplitude vectors must be 1-D and equal length")
    fn = _jc_numba if _accel.USE_NUMBA else _jc_numpy
    return fn(excited, ground, float(omega0), float(t))


KERNELS = {
    "open_loop": {"numba": _open_loop_numba, "numpy": _open_loop_numpy},
    "jc": {"numba": _jc_numba, "numpy": _jc_numpy},
}
