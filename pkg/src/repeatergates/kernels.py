"""Select the compiled grid sweep when available.

Set ``REPEATERGATES_PURE=1`` to force the numpy implementation.
"""
from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "numpy"
grid_minimize = _kernels_py.grid_minimize

if os.environ.get("REPEATERGATES_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        grid_minimize = _compiled.grid_minimize
        BACKEND = "cython"
