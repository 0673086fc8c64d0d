"""Hot numeric kernels: compiled core with a pure numpy fallback.

The Cython extension ``hoidet.kernels._speedups`` is used when it was
built; otherwise the numpy implementations in ``hoidet.kernels.pure``
take over. Set ``HOIDET_PURE_KERNELS=1`` to force the fallback (used by
the backend-equivalence tests and the benchmark).
"""

from __future__ import annotations

import os

from . import pure as _pure
from .pure import conv_out_size

if os.environ.get("HOIDET_PURE_KERNELS", "") not in ("", "0"):
    _backend = _pure
    BACKEND = "pure"
else:
    try:
        from . import _speedups as _backend  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _backend = _pure
        BACKEND = "pure"

im2col = _backend.im2col
col2im = _backend.col2im
maxpool_forward = _backend.maxpool_forward
maxpool_backward = _backend.maxpool_backward
draw_segments = _backend.draw_segments

__all__ = [
    "BACKEND",
    "conv_out_size",
    "im2col",
    "col2im",
    "maxpool_forward",
    "maxpool_backward",
    "draw_segments",
]
