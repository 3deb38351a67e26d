"""JIT selection for the numeric kernels.

Set ``ORBITCERT_DISABLE_NUMBA=1`` before import to run the pure-numpy path.
"""
from __future__ import annotations

import os

_FLAG = os.environ.get("ORBITCERT_DISABLE_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None

USE_NUMBA = numba is not None and _FLAG not in ("1", "true", "yes", "on")


def jit(fn):
    """Compile ``fn`` with numba in nopython mode, or return it untouched."""
    if USE_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
