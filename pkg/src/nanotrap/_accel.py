"""Backend selection for the hot kernels.

Every hot kernel exists twice: a vectorised numpy implementation and an
explicit-loop implementation compiled with ``numba.njit``.  The loop version
is the default when numba imports cleanly.  Set ``NANOTRAP_NO_NUMBA=1`` to
force the numpy path (useful for debugging, or on platforms without llvmlite).
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("NANOTRAP_NO_NUMBA", "").strip().lower() in ("", "0", "false", "no")


def njit(func):
    """``numba.njit(cache=True)`` when numba is importable, identity otherwise."""
    if not HAVE_NUMBA:
        return func
    return numba.njit(cache=True)(func)


def backend():
    return "numba" if USE_NUMBA else "numpy"
