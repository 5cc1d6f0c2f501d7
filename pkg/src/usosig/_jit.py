"""Numba toggle.

Set ``USOSIG_NO_NUMBA=1`` to run every kernel through its pure numpy/Python
fallback. The flag is read once at import time.
"""

import os

try:
    from numba import njit as _numba_njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("USOSIG_NO_NUMBA", "0") in ("", "0")


def njit(func):
    """Compile ``func`` with numba when enabled, otherwise return it unchanged."""
    if USE_NUMBA:
        return _numba_njit(cache=True, nogil=True)(func)
    return func


def backend():
    return "numba" if USE_NUMBA else "numpy"
