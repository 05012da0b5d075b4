"""Pick the compiled kernels when available, else the pure-Python ones."""

import os

from corrclust import _pykernels

try:
    from corrclust import _kernels as _compiled
except ImportError:
    _compiled = None

AVAILABLE = ("cython", "python") if _compiled is not None else ("python",)

_NAMES = ("maxflow", "residual_reach", "icm_sweep", "roof_labels")


def select(name):
    """Route kernel calls to ``name`` ("cython" or "python"); returns the previous choice."""
    global BACKEND
    if name not in AVAILABLE:
        raise ValueError(f"backend {name!r} unavailable; have {AVAILABLE}")
    module = _compiled if name == "cython" else _pykernels
    previous = globals().get("BACKEND")
    for attr in _NAMES:
        globals()[attr] = getattr(module, attr)
    BACKEND = name
    return previous


select("python" if os.environ.get("CORRCLUST_PURE_PYTHON") or _compiled is None else "cython")
