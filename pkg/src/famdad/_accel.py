"""Optional numba acceleration.

Set ``FAMDAD_DISABLE_NUMBA=1`` to force the pure-numpy code paths. If numba
cannot be imported the fallback is used automatically.
"""

from __future__ import annotations

import os

_DISABLED = os.environ.get("FAMDAD_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if _DISABLED:
        raise ImportError
    import numba

    NUMBA_ENABLED = True
except ImportError:  # pragma: no cover - depends on environment
    numba = None
    NUMBA_ENABLED = False


def njit(func):
    """Compile ``func`` with ``numba.njit(cache=True)`` when available.

    The undecorated function stays reachable as ``.py_func`` either way, so
    tests can compare both paths.
    """
    if NUMBA_ENABLED:
        return numba.njit(cache=True)(func)
    func.py_func = func
    return func
