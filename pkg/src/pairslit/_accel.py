"""Numba switch for the hot kernels.

Set ``PAIRSLIT_DISABLE_NUMBA=1`` before importing :mod:`pairslit` to run the
pure-numpy paths instead of the compiled loops.
"""

import os

_FLAG = os.environ.get("PAIRSLIT_DISABLE_NUMBA", "").strip().lower()

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on")


def njit(fn):
    """Compile ``fn`` with numba when available; otherwise return it as-is.

    Compilation happens regardless of ``USE_NUMBA`` so the benchmark can time
    both paths in one process. The flag only picks which path the public API
    dispatches to.
    """
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)
