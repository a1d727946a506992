"""Stencil kernel dispatch.

The compiled extension is used when it was built; otherwise the NumPy
fallback is selected at import time. ``use_backend`` switches explicitly,
which the benchmark and the backend-agreement tests rely on.
"""

from __future__ import annotations

import numpy as np

from sbpquad import _kernels_py

try:
    from sbpquad import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled

BACKEND = "compiled" if _compiled is not None else "python"
_impl = _BACKENDS[BACKEND]


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def use_backend(name: str) -> str:
    """Select a kernel backend; returns the previously active name."""
    global BACKEND, _impl
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {available_backends()}")
    previous = BACKEND
    BACKEND, _impl = name, _BACKENDS[name]
    return previous


def diff_lines(u: np.ndarray, block: np.ndarray, alpha: np.ndarray, inv_h: float) -> np.ndarray:
    """Apply the SBP first-derivative stencil along the last axis of a 2-D array."""
    out = np.empty(u.shape, dtype=np.float64)
    _impl.diff_lines(u, block, alpha, float(inv_h), out)
    return out
