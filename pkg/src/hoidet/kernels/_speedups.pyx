# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of the kernels in :mod:`hoidet.kernels.pure`.

Semantics match the pure versions: im2col/maxpool/draw_segments are
bit-identical; col2im performs the same scatter-add with a per-patch
accumulation order.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def conv_out_size(int size, int k, int stride, int pad):
    return (size + 2 * pad - k) // stride + 1


def im2col(cnp.ndarray x, int kh, int kw, int stride, int pad):
    cdef double[:, :, :, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t b = xv.shape[0], c = xv.shape[1], h = xv.shape[2], w = xv.shape[3]
    cdef Py_ssize_t oh = (h + 2 * pad - kh) // stride + 1
    cdef Py_ssize_t ow = (w + 2 * pad - kw) // stride + 1
    out = np.zeros((b, oh * ow, c * kh * kw), dtype=np.float64)
    cdef double[:, :, ::1] cols = out
    cdef Py_ssize_t bi, ci, oy, ox, ky, kx, iy, ix, pos, col0
    for bi in range(b):
        for oy in range(oh):
            for ox in range(ow):
                pos = oy * ow + ox
                for ci in range(c):
                    col0 = ci * kh * kw
                    for ky in range(kh):
                        iy = oy * stride + ky - pad
                        if iy < 0 or iy >= h:
                            continue
                        for kx in range(kw):
                            ix = ox * stride + kx - pad
                            if ix < 0 or ix >= w:
                                continue
                            cols[bi, pos, col0 + ky * kw + kx] = xv[bi, ci, iy, ix]
    return out


def col2im(cnp.ndarray cols_arr, int c, int h, int w, int kh, int kw, int stride, int pad):
    cdef double[:, :, ::1] cols = np.ascontiguousarray(cols_arr, dtype=np.float64)
    cdef Py_ssize_t b = cols.shape[0]
    cdef Py_ssize_t oh = (h + 2 * pad - kh) // stride + 1
    cdef Py_ssize_t ow = (w + 2 * pad - kw) // stride + 1
    out = np.zeros((b, c, h, w), dtype=np.float64)
    cdef double[:, :, :, ::1] xv = out
    cdef Py_ssize_t bi, ci, oy, ox, ky, kx, iy, ix, pos, col0
    for bi in range(b):
        for oy in range(oh):
            for ox in range(ow):
                pos = oy * ow + ox
                for ci in range(c):
                    col0 = ci * kh * kw
                    for ky in range(kh):
                        iy = oy * stride + ky - pad
                        if iy < 0 or iy >= h:
                            continue
                        for kx in range(kw):
                            ix = ox * stride + kx - pad
                            if ix < 0 or ix >= w:
                                continue
                            xv[bi, ci, iy, ix] += cols[bi, pos, col0 + ky * kw + kx]
    return out


def maxpool_forward(cnp.ndarray x, int wh, int ww):
    cdef double[:, :, :, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t b = xv.shape[0], c = xv.shape[1], h = xv.shape[2], w = xv.shape[3]
    cdef Py_ssize_t oh = h // wh, ow = w // ww
    y_arr = np.empty((b, c, oh, ow), dtype=np.float64)
    a_arr = np.empty((b, c, oh, ow), dtype=np.int64)
    cdef double[:, :, :, ::1] y = y_arr
    cdef long long[:, :, :, ::1] arg = a_arr
    cdef Py_ssize_t bi, ci, oy, ox, ky, kx, iy, ix
    cdef double best, v
    cdef Py_ssize_t best_idx
    for bi in range(b):
        for ci in range(c):
            for oy in range(oh):
                for ox in range(ow):
                    best = xv[bi, ci, oy * wh, ox * ww]
                    best_idx = (oy * wh) * w + ox * ww
                    for ky in range(wh):
                        iy = oy * wh + ky
                        for kx in range(ww):
                            ix = ox * ww + kx
                            v = xv[bi, ci, iy, ix]
                            if v > best:
                                best = v
                                best_idx = iy * w + ix
                    y[bi, ci, oy, ox] = best
                    arg[bi, ci, oy, ox] = best_idx
    return y_arr, a_arr


def maxpool_backward(cnp.ndarray dy_arr, cnp.ndarray arg_arr, int h, int w):
    cdef double[:, :, :, ::1] dy = np.ascontiguousarray(dy_arr, dtype=np.float64)
    cdef long long[:, :, :, ::1] arg = np.ascontiguousarray(arg_arr, dtype=np.int64)
    cdef Py_ssize_t b = dy.shape[0], c = dy.shape[1], oh = dy.shape[2], ow = dy.shape[3]
    out = np.zeros((b, c, h, w), dtype=np.float64)
    cdef double[:, :, :, ::1] dx = out
    cdef Py_ssize_t bi, ci, oy, ox
    cdef long long flat
    for bi in range(b):
        for ci in range(c):
            for oy in range(oh):
                for ox in range(ow):
                    flat = arg[bi, ci, oy, ox]
                    dx[bi, ci, flat // w, flat % w] = dy[bi, ci, oy, ox]
    return out


def draw_segments(cnp.ndarray plane_arr, cnp.ndarray segs_arr, cnp.ndarray values_arr):
    cdef double[:, ::1] plane = plane_arr
    cdef long long[:, ::1] segs = np.ascontiguousarray(segs_arr, dtype=np.int64)
    cdef double[::1] values = np.ascontiguousarray(values_arr, dtype=np.float64)
    cdef Py_ssize_t s, i
    cdef long long x0, y0, x1, y1, dx, dy, adx, ady, n, sx, sy, px, py
    cdef double v
    for s in range(segs.shape[0]):
        x0 = segs[s, 0]
        y0 = segs[s, 1]
        x1 = segs[s, 2]
        y1 = segs[s, 3]
        v = values[s]
        dx = x1 - x0
        dy = y1 - y0
        adx = dx if dx >= 0 else -dx
        ady = dy if dy >= 0 else -dy
        n = adx if adx >= ady else ady
        if n == 0:
            plane[y0, x0] = v
            continue
        sx = 1 if dx >= 0 else -1
        sy = 1 if dy >= 0 else -1
        for i in range(n + 1):
            px = x0 + sx * ((2 * i * adx + n) // (2 * n))
            py = y0 + sy * ((2 * i * ady + n) // (2 * n))
            plane[py, px] = v
    return None
