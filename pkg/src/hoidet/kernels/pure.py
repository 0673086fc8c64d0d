"""Pure numpy implementations of the hot kernels.

These are the fallback twins of the compiled routines in ``_speedups``.
Pixel-selection kernels (im2col, maxpool, draw_segments) are bit-identical
across backends; col2im accumulates in a different order and agrees to
floating-point roundoff.
"""

from __future__ import annotations

import numpy as np


def conv_out_size(size: int, k: int, stride: int, pad: int) -> int:
    return (size + 2 * pad - k) // stride + 1


def im2col(x: np.ndarray, kh: int, kw: int, stride: int, pad: int) -> np.ndarray:
    """Unfold (B, C, H, W) into (B, OH*OW, C*kh*kw) patches."""
    b, c, h, w = x.shape
    oh = conv_out_size(h, kh, stride, pad)
    ow = conv_out_size(w, kw, stride, pad)
    if pad:
        xp = np.zeros((b, c, h + 2 * pad, w + 2 * pad), dtype=np.float64)
        xp[:, :, pad : pad + h, pad : pad + w] = x
    else:
        xp = np.ascontiguousarray(x, dtype=np.float64)
    s0, s1, s2, s3 = xp.strides
    win = np.lib.stride_tricks.as_strided(
        xp,
        shape=(b, c, oh, ow, kh, kw),
        strides=(s0, s1, s2 * stride, s3 * stride, s2, s3),
        writeable=False,
    )
    cols = win.transpose(0, 2, 3, 1, 4, 5).reshape(b, oh * ow, c * kh * kw)
    return np.ascontiguousarray(cols)


def col2im(
    cols: np.ndarray, c: int, h: int, w: int, kh: int, kw: int, stride: int, pad: int
) -> np.ndarray:
    """Scatter-add patch gradients back to (B, C, H, W)."""
    b = cols.shape[0]
    oh = conv_out_size(h, kh, stride, pad)
    ow = conv_out_size(w, kw, stride, pad)
    xp = np.zeros((b, c, h + 2 * pad, w + 2 * pad), dtype=np.float64)
    patches = cols.reshape(b, oh, ow, c, kh, kw)
    for i in range(kh):
        for j in range(kw):
            xp[:, :, i : i + oh * stride : stride, j : j + ow * stride : stride] += (
                patches[:, :, :, :, i, j].transpose(0, 3, 1, 2)
            )
    if pad:
        return np.ascontiguousarray(xp[:, :, pad : pad + h, pad : pad + w])
    return xp


def maxpool_forward(x: np.ndarray, wh: int, ww: int) -> tuple[np.ndarray, np.ndarray]:
    """Non-overlapping max pooling; remainder rows/cols are dropped.

    Returns the pooled values and the flat (H*W) input index of each
    maximum. Ties resolve to the lowest flat index.
    """
    b, c, h, w = x.shape
    oh, ow = h // wh, w // ww
    xt = x[:, :, : oh * wh, : ow * ww].reshape(b, c, oh, wh, ow, ww)
    win = xt.transpose(0, 1, 2, 4, 3, 5).reshape(b, c, oh, ow, wh * ww)
    ai = win.argmax(axis=-1)
    y = np.take_along_axis(win, ai[..., None], axis=-1)[..., 0]
    base_r = (np.arange(oh) * wh)[None, None, :, None]
    base_c = (np.arange(ow) * ww)[None, None, None, :]
    arg = (base_r + ai // ww) * w + (base_c + ai % ww)
    return np.ascontiguousarray(y), np.ascontiguousarray(arg.astype(np.int64))


def maxpool_backward(dy: np.ndarray, arg: np.ndarray, h: int, w: int) -> np.ndarray:
    """Route pooled gradients back to the argmax positions."""
    b, c = dy.shape[:2]
    dx = np.zeros((b, c, h * w), dtype=np.float64)
    bi = np.arange(b)[:, None, None]
    ci = np.arange(c)[None, :, None]
    # Windows are disjoint, so argmax indices never collide.
    dx[bi, ci, arg.reshape(b, c, -1)] = dy.reshape(b, c, -1)
    return dx.reshape(b, c, h, w)


def draw_segments(plane: np.ndarray, segs: np.ndarray, values: np.ndarray) -> None:
    """Rasterize 1-px line segments into ``plane`` in ascending order.

    ``segs`` holds int64 rows (x0, y0, x1, y1) of in-bounds pixel
    coordinates. Pixels along segment s are set to ``values[s]``; later
    segments overwrite earlier ones. The traversal steps the major axis
    one pixel at a time and rounds the minor coordinate half-up:
    ``minor = minor0 + sign * ((2*i*d_minor + n) // (2*n))``.
    """
    for s in range(segs.shape[0]):
        x0, y0, x1, y1 = (int(v) for v in segs[s])
        dx, dy = x1 - x0, y1 - y0
        n = max(abs(dx), abs(dy))
        if n == 0:
            plane[y0, x0] = values[s]
            continue
        i = np.arange(n + 1, dtype=np.int64)
        sx = 1 if dx >= 0 else -1
        sy = 1 if dy >= 0 else -1
        xs = x0 + sx * ((2 * i * abs(dx) + n) // (2 * n))
        ys = y0 + sy * ((2 * i * abs(dy) + n) // (2 * n))
        plane[ys, xs] = values[s]
