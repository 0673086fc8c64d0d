"""Kernel correctness plus compiled/pure backend equivalence."""

import numpy as np
import pytest

import hoidet.kernels as kernels
import hoidet.kernels.pure as pure

try:
    import hoidet.kernels._speedups as speedups
except ImportError:
    speedups = None

needs_compiled = pytest.mark.skipif(speedups is None, reason="compiled kernels not built")


def _naive_im2col(x, kh, kw, stride, pad):
    b, c, h, w = x.shape
    oh = (h + 2 * pad - kh) // stride + 1
    ow = (w + 2 * pad - kw) // stride + 1
    out = np.zeros((b, oh * ow, c * kh * kw))
    for bi in range(b):
        for oy in range(oh):
            for ox in range(ow):
                patch = []
                for ci in range(c):
                    for ky in range(kh):
                        for kx in range(kw):
                            iy, ix = oy * stride + ky - pad, ox * stride + kx - pad
                            patch.append(
                                x[bi, ci, iy, ix] if 0 <= iy < h and 0 <= ix < w else 0.0
                            )
                out[bi, oy * ow + ox] = patch
    return out


class TestPureKernels:
    def test_im2col_matches_naive(self, rng):
        x = rng.normal(size=(2, 3, 7, 6))
        for stride, pad, k in ((1, 0, 3), (2, 1, 3), (2, 2, 5)):
            got = pure.im2col(x, k, k, stride, pad)
            assert np.array_equal(got, _naive_im2col(x, k, k, stride, pad))

    def test_col2im_adjoint_of_im2col(self, rng):
        # <im2col(x), g> == <x, col2im(g)> since both are linear transposes
        x = rng.normal(size=(2, 3, 8, 8))
        for stride, pad, k in ((1, 0, 3), (2, 1, 3), (2, 2, 5)):
            cols = pure.im2col(x, k, k, stride, pad)
            g = rng.normal(size=cols.shape)
            lhs = float((cols * g).sum())
            rhs = float((x * pure.col2im(g, 3, 8, 8, k, k, stride, pad)).sum())
            assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_maxpool_values_and_indices(self, rng):
        x = rng.normal(size=(2, 2, 6, 6))
        y, arg = pure.maxpool_forward(x, 2, 2)
        assert y.shape == (2, 2, 3, 3)
        for bi in range(2):
            for ci in range(2):
                for oy in range(3):
                    for ox in range(3):
                        win = x[bi, ci, oy * 2 : oy * 2 + 2, ox * 2 : ox * 2 + 2]
                        assert y[bi, ci, oy, ox] == win.max()
                        flat = arg[bi, ci, oy, ox]
                        assert x[bi, ci, flat // 6, flat % 6] == win.max()

    def test_maxpool_tie_lowest_flat_index(self):
        x = np.ones((1, 1, 4, 4))
        _, arg = pure.maxpool_forward(x, 2, 2)
        assert arg[0, 0].tolist() == [[0, 2], [8, 10]]

    def test_maxpool_remainder_dropped(self, rng):
        x = rng.normal(size=(1, 1, 5, 7))
        y, _ = pure.maxpool_forward(x, 2, 2)
        assert y.shape == (1, 1, 2, 3)

    def test_maxpool_backward_routing(self):
        x = np.array([[[[1.0, 5.0, 3.0, 2.0]]]])
        y, arg = pure.maxpool_forward(x, 1, 4)
        assert y[0, 0, 0, 0] == 5.0
        dx = pure.maxpool_backward(np.ones_like(y), arg, 1, 4)
        assert dx[0, 0, 0].tolist() == [0.0, 1.0, 0.0, 0.0]

    def test_draw_straight_lines(self):
        plane = np.zeros((8, 8))
        segs = np.array([[1, 2, 5, 2], [3, 0, 3, 4]], dtype=np.int64)
        pure.draw_segments(plane, segs, np.array([0.5, 0.7]))
        assert np.all(plane[2, 1:6][np.array([0, 1, 3, 4])] == 0.5)
        assert np.all(plane[0:5, 3] == 0.7)  # drawn later, overwrites crossing
        assert plane[2, 3] == 0.7

    def test_draw_diagonal_endpoints(self, rng):
        for _ in range(25):
            x0, y0, x1, y1 = rng.integers(0, 16, size=4)
            plane = np.zeros((16, 16))
            pure.draw_segments(
                plane, np.array([[x0, y0, x1, y1]], dtype=np.int64), np.array([1.0])
            )
            assert plane[y0, x0] == 1.0 and plane[y1, x1] == 1.0
            rows, cols = np.nonzero(plane)
            assert rows.min() >= min(y0, y1) and rows.max() <= max(y0, y1)
            assert cols.min() >= min(x0, x1) and cols.max() <= max(x0, x1)
            # one pixel per major-axis step
            n = max(abs(x1 - x0), abs(y1 - y0))
            assert len(rows) == n + 1


@needs_compiled
class TestBackendEquivalence:
    def test_im2col_bit_identical(self, rng):
        x = rng.normal(size=(3, 4, 9, 11))
        for stride, pad, k in ((1, 0, 1), (1, 1, 3), (2, 2, 5), (3, 0, 2)):
            a = pure.im2col(x, k, k, stride, pad)
            b = speedups.im2col(x, k, k, stride, pad)
            assert np.array_equal(a, b)

    def test_col2im_matches_to_roundoff(self, rng):
        for stride, pad, k in ((1, 0, 3), (2, 1, 3), (2, 2, 5)):
            oh = (10 + 2 * pad - k) // stride + 1
            ow = (12 + 2 * pad - k) // stride + 1
            g = rng.normal(size=(2, oh * ow, 3 * k * k))
            a = pure.col2im(g, 3, 10, 12, k, k, stride, pad)
            b = speedups.col2im(g, 3, 10, 12, k, k, stride, pad)
            np.testing.assert_allclose(a, b, atol=1e-12)

    def test_maxpool_bit_identical(self, rng):
        x = rng.normal(size=(2, 3, 12, 10))
        x[0, 0, :2, :2] = 1.0  # exercise ties
        for w in (2, 3):
            ya, aa = pure.maxpool_forward(x, w, w)
            yb, ab = speedups.maxpool_forward(x, w, w)
            assert np.array_equal(ya, yb) and np.array_equal(aa, ab)
            dy = rng.normal(size=ya.shape)
            da = pure.maxpool_backward(dy, aa, 12, 10)
            db = speedups.maxpool_backward(dy, ab, 12, 10)
            assert np.array_equal(da, db)

    def test_draw_segments_bit_identical(self, rng):
        segs = rng.integers(0, 64, size=(40, 4)).astype(np.int64)
        vals = rng.uniform(0.1, 1.0, size=40)
        a = np.zeros((64, 64))
        b = np.zeros((64, 64))
        pure.draw_segments(a, segs, vals)
        speedups.draw_segments(b, segs, vals)
        assert np.array_equal(a, b)


def test_backend_selection_reports():
    assert kernels.BACKEND in ("compiled", "pure")
    assert kernels.conv_out_size(64, 5, 2, 2) == 32
