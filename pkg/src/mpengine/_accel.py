"""Backend selection for the hot kernels.

Kernels are compiled with numba when it is importable. Setting the
environment variable ``MPENGINE_DISABLE_NUMBA=1`` (read at import time)
routes every kernel call to its vectorized numpy twin instead.
"""

import os

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]

        def decorator(func):
            return func

        return decorator


def _flag(name):
    return os.environ.get(name, "").strip().lower() in ("1", "true", "yes", "on")


USE_NUMBA = NUMBA_AVAILABLE and not _flag("MPENGINE_DISABLE_NUMBA")


def backend():
    """Name of the backend used by the dispatching kernel wrappers."""
    return "numba" if USE_NUMBA else "numpy"
