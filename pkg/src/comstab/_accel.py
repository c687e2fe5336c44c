"""Optional numba acceleration for the hot numeric kernels.

Kernels are written once in the numba-compatible subset of numpy and
decorated with :func:`kernel`.  Setting ``COMSTAB_DISABLE_NUMBA=1`` (or
running without numba installed) leaves them as plain Python functions,
which is the reference path the parity tests compare against.
"""
import os

_FLAG = os.environ.get("COMSTAB_DISABLE_NUMBA", "").strip().lower()
DISABLED = _FLAG in ("1", "true", "yes", "on")

try:
    if DISABLED:
        raise ImportError
    from numba import njit as _njit
    USING_NUMBA = True
except ImportError:
    USING_NUMBA = False
    _njit = None


def kernel(func):
    """Compile ``func`` with numba when enabled, else return it unchanged."""
    if USING_NUMBA:
        return _njit(cache=True, nogil=True)(func)
    return func


def python_impl(func):
    """Pure-Python body of a (possibly compiled) kernel."""
    return getattr(func, "py_func", func)
