"""Numba switch.

Set ``INSPECTROUTE_DISABLE_NUMBA=1`` before import to run every kernel through
the pure numpy / interpreted path instead of the jitted one.
"""
import os
import warnings

_FLAG = "INSPECTROUTE_DISABLE_NUMBA"


def _disabled_by_env():
    return os.environ.get(_FLAG, "").strip().lower() not in ("", "0", "false", "no")


try:
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _disabled_by_env()

if not HAVE_NUMBA and not _disabled_by_env():  # pragma: no cover
    warnings.warn("numba could not be imported; falling back to the numpy kernels")


def njit(func):
    """Jit ``func`` in nopython/nogil mode, or hand it back untouched when disabled."""
    if not USE_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)
