import os
import subprocess
import sys

import numpy as np
import pytest

from mpengine import _accel
from mpengine._kernels import KERNELS, jc_propagate, open_loop_signs

needs_numba = pytest.mark.skipif(not _accel.NUMBA_AVAILABLE, reason="numba not installed")


@needs_numba
@pytest.mark.parametrize("feedback", [False, True])
@pytest.mark.parametrize("p_flip", [0.0, 1e-4, 0.3, 0.5, 1.0])
def test_open_loop_backends_agree(feedback, p_flip):
    u = np.random.default_rng(3).random((64, 500))
    a = KERNELS["open_loop"]["numba"](u, 1.0 - p_flip, p_flip, feedback)
    b = KERNELS["open_loop"]["numpy"](u, 1.0 - p_flip, p_flip, feedback)
    for x, y in zip(a, b):
        assert x.dtype == y.dtype == np.int8
        assert np.array_equal(x, y)


@needs_numba
@pytest.mark.parametrize("n_max", [1, 2, 40, 700])
def test_jc_backends_agree(n_max):
    rng = np.random.default_rng(n_max)
    e = rng.normal(size=n_max + 1) + 1j * rng.normal(size=n_max + 1)
    g = rng.normal(size=n_max + 1) + 1j * rng.normal(size=n_max + 1)
    a = KERNELS["jc"]["numba"](e, g, 0.8, 1.3)
    b = KERNELS["jc"]["numpy"](e, g, 0.8, 1.3)
    assert np.allclose(a[0], b[0], rtol=0, atol=1e-14)
    assert np.allclose(a[1], b[1], rtol=0, atol=1e-14)
    # inputs are not modified
    assert not np.shares_memory(a[0], e)


def test_wrappers_validate_shapes():
    with pytest.raises(ValueError):
        open_loop_signs(np.zeros(5), 1.0, 0.0, False)
    with pytest.raises(ValueError):
        jc_propagate(np.zeros(4), np.zeros(5), 1.0, 1.0)


def test_first_sign_is_plus():
    signs, _ = open_loop_signs(np.full((3, 4), 0.99), 0.5, 0.5, False)
    assert np.all(signs[:, 0] == 1)
    assert np.all(signs[:, 1:] == -1)


def _backend_in_subprocess(flag):
    env = dict(os.environ)
    env.pop("MPENGINE_DISABLE_NUMBA", None)
    if flag is not None:
        env["MPENGINE_DISABLE_NUMBA"] = flag
    out = subprocess.run(
        [sys.executable, "-c", "import mpengine; print(mpengine.backend())"],
        env=env, capture_output=True, text=True, check=True,
    )
    return out.stdout.strip()


def test_env_flag_selects_numpy_backend():
    assert _backend_in_subprocess("1") == "numpy"
    assert _backend_in_subprocess("true") == "numpy"
    expected = "numba" if _accel.NUMBA_AVAILABLE else "numpy"
    assert _backend_in_subprocess(None) == expected
    assert _backend_in_subprocess("0") == expected


def test_trajectory_results_independent_of_backend():
    code = (
        "from mpengine.trajectories import physical_config, run_ensemble;"
        "s = run_ensemble(physical_config(n_cycles=300, n_realizations=200, seed=4));"
        "import sys; sys.stdout.write(s.mean_power.tobytes().hex())"
    )
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, MPENGINE_DISABLE_NUMBA=flag)
        outs.append(subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                                   text=True, check=True).stdout)
    assert outs[0] == outs[1]
