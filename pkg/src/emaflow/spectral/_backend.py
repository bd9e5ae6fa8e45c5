"""Kernel backend selection.

Prefers the compiled extension, falls back to the pure-Python twin.
EMAFLOW_PURE_PYTHON=1 forces the fallback regardless of availability
(useful for cross-checking the two and for debugging).
"""

import os

if os.environ.get("EMAFLOW_PURE_PYTHON") == "1":
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # compiled extension
    except ImportError:
        from . import _kernels_py as kernels

BACKEND = kernels.BACKEND_NAME
