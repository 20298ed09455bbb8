"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
twin is used. ``KPP_BACKEND=python`` forces the fallback.
"""
from __future__ import annotations

import os

from . import _pykernels as python_kernels

native_kernels = None
if os.environ.get("KPP_BACKEND", "").lower() != "python":
    try:
        from . import _kernels as native_kernels
    except ImportError:  # extension not built
        native_kernels = None

kernels = native_kernels if native_kernels is not None else python_kernels
BACKEND = "cython" if native_kernels is not None else "python"


def get_kernels(name: str | None = None):
    """Return a kernel module by name (``"cython"``, ``"python"`` or default)."""
    if name is None:
        return kernels
    if name == "python":
        return python_kernels
    if name == "cython":
        if native_kernels is None:
            raise RuntimeError("compiled kernels are not available")
        return native_kernels
    raise ValueError(f"unknown backend {name!r}")
