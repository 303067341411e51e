"""Kernel selection: the compiled search core if it was built, else pure Python.

Set ``SKEWGEN_PURE_PYTHON=1`` to force the fallback.
"""
import os

from ._search import partitions, state_rank
from . import _search as python_kernel

try:
    if os.environ.get("SKEWGEN_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python kernel requested")
    from . import _search_ext as compiled_kernel
except ImportError:
    compiled_kernel = None

if compiled_kernel is not None:
    bfs = compiled_kernel.bfs
    expand = compiled_kernel.expand
    KERNEL = "compiled"
else:
    bfs = python_kernel.bfs
    expand = python_kernel.expand
    KERNEL = "python"

__all__ = ["bfs", "expand", "partitions", "state_rank", "KERNEL",
           "python_kernel", "compiled_kernel"]
