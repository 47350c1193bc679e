"""Kernel backend selection.

The compiled extension is used when it imports; setting
``GIRGMOTIF_PURE_PYTHON=1`` forces the numpy/Python kernels.
"""

from __future__ import annotations

import os

from . import _pykernels

python_kernels = _pykernels
compiled_kernels = None

try:
    from . import _ckernels as compiled_kernels  # type: ignore[no-redef]
except ImportError:  # pragma: no cover - depends on build
    compiled_kernels = None

if compiled_kernels is not None and not os.environ.get("GIRGMOTIF_PURE_PYTHON"):
    kernels = compiled_kernels
    BACKEND = "compiled"
else:
    kernels = python_kernels
    BACKEND = "python"


def get_kernels(name: str | None = None):
    """Return the kernel module ``name`` (``"compiled"``/``"python"``), or the active one."""
    if name is None:
        return kernels
    if name == "python":
        return python_kernels
    if name == "compiled":
        if compiled_kernels is None:
            raise ImportError("compiled kernels are not built")
        return compiled_kernels
    raise ValueError(f"unknown backend {name!r}")
