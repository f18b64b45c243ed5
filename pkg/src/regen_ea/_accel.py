"""Optional numba acceleration.

Set ``REGEN_EA_DISABLE_NUMBA=1`` to force the pure-numpy code paths.  The
flag is read once at import time.
"""
import os

_DISABLED = os.environ.get("REGEN_EA_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError("numba disabled by REGEN_EA_DISABLE_NUMBA")
    from numba import njit as _njit

    HAS_NUMBA = True
except ImportError:
    _njit = None
    HAS_NUMBA = False


def njit(func):
    """Compile ``func`` with numba when available, otherwise return ``None``.

    Callers keep a numpy implementation next to every kernel and dispatch on
    the return value.
    """
    if not HAS_NUMBA:
        return None
    return _njit(cache=True, nogil=True)(func)


def backend() -> str:
    return "numba" if HAS_NUMBA else "numpy"
