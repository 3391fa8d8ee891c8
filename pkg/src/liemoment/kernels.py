"""Numeric kernel selection: compiled extension if importable, numpy otherwise.

Set ``LIEMOMENT_PURE=1`` to force the numpy implementation.
"""

import os

if os.environ.get("LIEMOMENT_PURE", "") not in ("", "0"):
    from ._kernels_py import BACKEND, eval_batch, eval_system, rk4
else:
    try:
        from ._kernels import BACKEND, eval_batch, eval_system, rk4
    except ImportError:  # pragma: no cover - depends on the build
        from ._kernels_py import BACKEND, eval_batch, eval_system, rk4

__all__ = ["BACKEND", "eval_batch", "eval_system", "rk4"]
