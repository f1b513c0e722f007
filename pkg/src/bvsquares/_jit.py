"""JIT switch.

Kernels in :mod:`bvsquares.kernels` are written twice: a numba version and a
vectorised numpy version.  Set ``BVSQUARES_DISABLE_JIT=1`` before import to
force the numpy path (useful for debugging and for the benchmark).
"""

import os

_FLAG = os.environ.get("BVSQUARES_DISABLE_JIT", "").strip().lower()

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAS_NUMBA = False

USE_JIT = HAS_NUMBA and _FLAG not in ("1", "true", "yes", "on")


def njit(*args, **kwargs):
    """``numba.njit`` with caching; identity decorator when numba is absent."""
    if not HAS_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    kwargs.setdefault("nogil", True)
    return numba.njit(*args, **kwargs)
