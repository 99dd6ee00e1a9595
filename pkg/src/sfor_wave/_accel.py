"""Numba detection.

Set ``SFOR_WAVE_DISABLE_JIT=1`` to force the pure-numpy kernels even when
numba is installed. The flag is read once at import time.
"""

import os

_FALSY = {"", "0", "false", "no", "off"}

DISABLE_JIT = os.environ.get("SFOR_WAVE_DISABLE_JIT", "").strip().lower() not in _FALSY

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is optional
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not DISABLE_JIT


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity decorator otherwise."""
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        return numba.njit(*args, **kwargs)

    def deco(f):
        return f

    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return deco


__all__ = ["njit", "HAVE_NUMBA", "USE_NUMBA", "DISABLE_JIT"]
