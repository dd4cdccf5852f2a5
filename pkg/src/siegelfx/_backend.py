"""Select the kernel backend at import time.

The compiled ``_kernels`` extension is used when it was built; otherwise the
numpy implementation in ``_kernels_py`` takes over. Setting the environment
variable ``SIEGELFX_PURE_PYTHON=1`` forces the fallback.
"""

import os

if os.environ.get("SIEGELFX_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels

BACKEND: str = kernels.NAME

__all__ = ["kernels", "BACKEND"]
