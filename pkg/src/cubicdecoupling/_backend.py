"""Kernel selection: compiled Cython core when importable, else pure Python.

Set ``CUBICDECOUPLING_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

try:
    if os.environ.get("CUBICDECOUPLING_PURE_PYTHON"):
        raise ImportError("pure Python forced by environment")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

DEFAULT = "compiled" if _compiled is not None else "python"


def available() -> list[str]:
    return ["compiled", "python"] if _compiled is not None else ["python"]


def get(name: str | None = None):
    """Return the kernel module for ``name`` ("compiled", "python", or None for default)."""
    name = name or DEFAULT
    if name == "python":
        return _pykernels
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not available in this build")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")
