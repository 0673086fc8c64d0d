"""Differentiable ops: dense, conv2d, max-pooling, activations, losses.

Convolution uses the cross-correlation convention. All array math is
float64; the conv/pool inner kernels come from :mod:`hoidet.kernels`.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .. import kernels
from .autograd import Var, accumulate

PROB_EPS = 1e-7


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g


def add(a: Var, b: Var) -> Var:
    out_val = a.value + b.value

    def _bw(dy: np.ndarray) -> None:
        accumulate(a, _unbroadcast(dy, a.value.shape))
        accumulate(b, _unbroadcast(dy, b.value.shape))

    return Var(out_val, (a, b), _bw)


def mul(a: Var, b: Var) -> Var:
    """Elementwise product with broadcasting; gradient flows to both."""
    av, bv = a.value, b.value
    out_val = av * bv

    def _bw(dy: np.ndarray) -> None:
        accumulate(a, _unbroadcast(dy * bv, av.shape))
        accumulate(b, _unbroadcast(dy * av, bv.shape))

    return Var(out_val, (a, b), _bw)


def scale(x: Var, c: float) -> Var:
    def _bw(dy: np.ndarray) -> None:
        accumulate(x, dy * c)

    return Var(x.value * c, (x,), _bw)


def dense(x: Var, W: Var, b: Var) -> Var:
    """y = x W^T + b for x of shape (B, n) or (n,), W (m, n), b (m,)."""
    xv = x.value
    single = xv.ndim == 1
    x2 = xv[None, :] if single else xv
    if x2.shape[1] != W.value.shape[1]:
        raise ValueError(f"dense shape mismatch: x {xv.shape} vs W {W.value.shape}")
    y = x2 @ W.value.T + b.value

    def _bw(dy: np.ndarray) -> None:
        dy2 = dy[None, :] if single else dy
        dx = dy2 @ W.value
        accumulate(x, dx[0] if single else dx)
        accumulate(W, dy2.T @ x2)
        accumulate(b, dy2.sum(axis=0))

    return Var(y[0] if single else y, (x, W, b), _bw)


def conv2d(x: Var, W: Var, b: Var, stride: int = 1, pad: int = 0) -> Var:
    """Cross-correlation of (B, C, H, W) input with (F, C, kh, kw) kernels."""
    xv = x.value
    single = xv.ndim == 3
    x4 = xv[None] if single else xv
    bsz, c, h, w = x4.shape
    f, wc, kh, kw = W.value.shape
    if wc != c:
        raise ValueError(f"conv2d channel mismatch: input {c} vs kernel {wc}")
    oh = kernels.conv_out_size(h, kh, stride, pad)
    ow = kernels.conv_out_size(w, kw, stride, pad)
    if oh < 1 or ow < 1:
        raise ValueError("conv2d output collapses to zero size")

    cols = kernels.im2col(np.ascontiguousarray(x4), kh, kw, stride, pad)
    w_mat = W.value.reshape(f, c * kh * kw)
    y = cols @ w_mat.T + b.value  # (B, OH*OW, F)
    y = np.ascontiguousarray(y.transpose(0, 2, 1).reshape(bsz, f, oh, ow))

    def _bw(dy: np.ndarray) -> None:
        dy4 = dy[None] if single else dy
        dym = dy4.reshape(bsz, f, oh * ow).transpose(0, 2, 1)  # (B, P, F)
        dw = np.tensordot(dym, cols, axes=([0, 1], [0, 1]))  # (F, C*kh*kw)
        accumulate(W, dw.reshape(W.value.shape))
        accumulate(b, dy4.sum(axis=(0, 2, 3)))
        dcols = np.ascontiguousarray(dym @ w_mat)
        dx = kernels.col2im(dcols, c, h, w, kh, kw, stride, pad)
        accumulate(x, dx[0] if single else dx)

    return Var(y[0] if single else y, (x, W, b), _bw)


def maxpool2d(x: Var, window: int) -> Var:
    """Non-overlapping max pooling; ties go to the lowest flat index."""
    xv = x.value
    single = xv.ndim == 3
    x4 = np.ascontiguousarray(xv[None] if single else xv)
    _, _, h, w = x4.shape
    y, arg = kernels.maxpool_forward(x4, window, window)

    def _bw(dy: np.ndarray) -> None:
        dy4 = np.ascontiguousarray(dy[None] if single else dy)
        dx = kernels.maxpool_backward(dy4, arg, h, w)
        accumulate(x, dx[0] if single else dx)

    return Var(y[0] if single else y, (x,), _bw)


def relu(x: Var) -> Var:
    mask = x.value > 0

    def _bw(dy: np.ndarray) -> None:
        accumulate(x, dy * mask)

    return Var(np.where(mask, x.value, 0.0), (x,), _bw)


def sigmoid(x: Var) -> Var:
    v = sigmoid_value(x.value)

    def _bw(dy: np.ndarray) -> None:
        accumulate(x, dy * v * (1.0 - v))

    return Var(v, (x,), _bw)


def sigmoid_value(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def concat(xs: Sequence[Var], axis: int = -1) -> Var:
    vals = [x.value for x in xs]
    out_val = np.concatenate(vals, axis=axis)
    sizes = [v.shape[axis] for v in vals]
    splits = np.cumsum(sizes)[:-1]

    def _bw(dy: np.ndarray) -> None:
        for x, piece in zip(xs, np.split(dy, splits, axis=axis)):
            accumulate(x, piece)

    return Var(out_val, tuple(xs), _bw)


def reshape(x: Var, shape: tuple[int, ...]) -> Var:
    def _bw(dy: np.ndarray) -> None:
        accumulate(x, dy.reshape(x.value.shape))

    return Var(x.value.reshape(shape), (x,), _bw)


def max_last(x: Var) -> Var:
    """Maximum over the last axis; ties route the gradient to the lowest
    index (argmax picks the first maximum)."""
    arg = x.value.argmax(axis=-1)
    out_val = np.take_along_axis(x.value, arg[..., None], axis=-1)[..., 0]

    def _bw(dy: np.ndarray) -> None:
        g = np.zeros_like(x.value)
        np.put_along_axis(g, arg[..., None], dy[..., None], axis=-1)
        accumulate(x, g)

    return Var(out_val, (x,), _bw)


def mean_all(x: Var) -> Var:
    n = x.value.size

    def _bw(dy: np.ndarray) -> None:
        accumulate(x, np.full_like(x.value, float(dy) / n))

    return Var(x.value.mean(), (x,), _bw)


def bce(p: Var, y: np.ndarray | float) -> Var:
    """Mean binary cross entropy of probabilities against {0,1} targets.

    Probabilities are clamped to [PROB_EPS, 1 - PROB_EPS]; the gradient is
    zero where the clamp is active.
    """
    yv = np.asarray(y, dtype=np.float64)
    pv = p.value
    pc = np.clip(pv, PROB_EPS, 1.0 - PROB_EPS)
    n = pc.size
    val = float(np.mean(-(yv * np.log(pc) + (1.0 - yv) * np.log(1.0 - pc))))
    inside = (pv > PROB_EPS) & (pv < 1.0 - PROB_EPS)

    def _bw(dy: np.ndarray) -> None:
        g = np.where(inside, (pc - yv) / (pc * (1.0 - pc)), 0.0) / n
        accumulate(p, g * float(dy))

    return Var(val, (p,), _bw)


def multilabel_bce(probs: Var, targets: np.ndarray) -> Var:
    """Mean per-category BCE for multi-hot targets."""
    return bce(probs, targets)


def mse(a: Var, b: Var) -> Var:
    """Mean squared error; gradients flow into both arguments."""
    diff = a.value - b.value
    n = diff.size
    val = float(np.mean(diff * diff))

    def _bw(dy: np.ndarray) -> None:
        g = (2.0 / n) * diff * float(dy)
        accumulate(a, g)
        accumulate(b, -g)

    return Var(val, (a, b), _bw)
