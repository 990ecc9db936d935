"""Hot loops with a compiled backend and a pure-Python fallback.

The compiled extension is used when it imports; set ``TAXOGRAPH_PURE_PYTHON=1``
to force the fallback. ``BACKEND`` names the active one.
"""

import os

from . import _pykernels

try:
    if os.environ.get("TAXOGRAPH_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-python backend requested")
    from . import _ckernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"


def compiled_available():
    try:
        from . import _ckernels  # noqa: F401
    except ImportError:
        return False
    return True


def get_backend(name=None):
    """Return the kernel module for ``name`` (``"cython"``/``"python"``) or the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")


pair_keys = _impl.pair_keys
heavy_edge_matching = _impl.heavy_edge_matching
greedy_refine = _impl.greedy_refine
fm_pass = _impl.fm_pass

__all__ = [
    "BACKEND",
    "compiled_available",
    "get_backend",
    "pair_keys",
    "heavy_edge_matching",
    "greedy_refine",
    "fm_pass",
]
