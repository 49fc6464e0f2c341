"""Selects the compiled kernels when available, else the pure-Python ones.

Set ``ISOCLOUDS_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels as python_kernels

if os.environ.get("ISOCLOUDS_PURE_PYTHON", "") not in ("", "0"):
    compiled_kernels = None
else:
    try:
        from . import _ckernels as compiled_kernels
    except ImportError:
        compiled_kernels = None

kernels = compiled_kernels if compiled_kernels is not None else python_kernels
BACKEND = "cython" if compiled_kernels is not None else "python"
