"""Numba switch.

Hot loops are written once in a numba-compatible subset of Python and compiled
with ``@njit`` when numba is importable.  Setting the environment variable
``GRAPHON_CENTRALITY_DISABLE_NUMBA=1`` (read at import time) routes every
kernel to its pure-numpy counterpart instead.
"""
import os

ENV_FLAG = "GRAPHON_CENTRALITY_DISABLE_NUMBA"

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

HAVE_NUMBA = _numba is not None
NUMBA_DISABLED = os.environ.get(ENV_FLAG, "").strip().lower() not in ("", "0", "false", "no")
USE_NUMBA = HAVE_NUMBA and not NUMBA_DISABLED


def njit(func):
    """Compile ``func`` in nopython mode, or return None without numba."""
    if not HAVE_NUMBA:
        return None
    return _numba.njit(cache=True, nogil=True)(func)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
