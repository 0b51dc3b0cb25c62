"""Backend selection for the quadrature kernel.

The compiled extension is used when it imports; set ``ORDALG_PURE_PYTHON=1``
to force the pure-Python fallback.
"""

import os

from . import _kernels_py

if os.environ.get("ORDALG_PURE_PYTHON"):
    adaptive_integrate = _kernels_py.adaptive_integrate
    BACKEND = "python"
else:
    try:
        from ._kernels import adaptive_integrate
        BACKEND = "cython"
    except ImportError:
        adaptive_integrate = _kernels_py.adaptive_integrate
        BACKEND = "python"

__all__ = ["adaptive_integrate", "BACKEND"]
