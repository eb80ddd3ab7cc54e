"""Time the numba and numpy kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both implementations are called directly, so the env flag is irrelevant
here; outputs are checked for agreement before timing.
"""

import argparse
import math
import timeit

import numpy as np

from mpengine import _accel
from mpengine._kernels import KERNELS
from mpengine.cavity import coherent_state
from mpengine.qubit import X_AXIS


def open_loop_case():
    # desk-scale ensemble: 1024 realizations x 2000 cycles at theta = 0.014
    u = np.random.default_rng(0).random((1024, 2000))
    p_flip = math.sin(0.007) ** 2
    return (u, 1.0 - p_flip, p_flip, False), "open_loop 1024 x 2000"


def jc_case():
    field = coherent_state(math.sqrt(400.0), 4000)
    q = X_AXIS.ket()
    e = np.ascontiguousarray(q[0] * field.amplitudes)
    g = np.ascontiguousarray(q[1] * field.amplitudes)
    return (e, g, 1.0, 0.002), "jc n_max = 4000"


def check(name, args):
    a = KERNELS[name]["numba"](*args)
    b = KERNELS[name]["numpy"](*args)
    for x, y in zip(a, b):
        if x.dtype.kind == "i":
            assert np.array_equal(x, y)
        else:
            assert np.allclose(x, y, rtol=0, atol=1e-14)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not _accel.NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':<24}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, case in (("open_loop", open_loop_case), ("jc", jc_case)):
        kargs, label = case()
        check(name, kargs)  # also triggers compilation
        best = {}
        for impl in ("numba", "numpy"):
            fn = KERNELS[name][impl]
            number = 3 if name == "open_loop" else 200
            t = min(timeit.repeat(lambda: fn(*kargs), number=number, repeat=args.repeat)) / number
            best[impl] = 1e3 * t
        print(f"{label:<24}{best['numba']:>12.3f}{best['numpy']:>12.3f}{best['numpy'] / best['numba']:>10.1f}x")


if __name__ == "__main__":
    main()
