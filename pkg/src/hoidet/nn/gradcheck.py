"""Central finite-difference gradient verification."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .autograd import Var, backward


def grad_check(
    f: Callable[..., Var],
    points: Sequence[np.ndarray],
    eps: float = 1e-5,
) -> float:
    """Max relative error between analytic and numerical gradients.

    ``f`` maps one Var per point to a scalar Var. The relative error per
    element is |g_a - g_n| / max(1e-8, |g_a| + |g_n|).
    """
    leaves = [Var(np.array(p, dtype=np.float64)) for p in points]
    out = f(*leaves)
    backward(out)
    analytic = [
        v.grad.copy() if v.grad is not None else np.zeros_like(v.value) for v in leaves
    ]

    worst = 0.0
    base = [l.value.copy() for l in leaves]
    for k, point in enumerate(base):
        flat = point.reshape(-1)
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + eps
            hi = _eval(f, base)
            flat[idx] = orig - eps
            lo = _eval(f, base)
            flat[idx] = orig
            g_n = (hi - lo) / (2.0 * eps)
            g_a = analytic[k].reshape(-1)[idx]
            rel = abs(g_a - g_n) / max(1e-8, abs(g_a) + abs(g_n))
            worst = max(worst, rel)
    return worst


def _eval(f: Callable[..., Var], points: Sequence[np.ndarray]) -> float:
    return float(f(*(Var(p.copy()) for p in points)).value)
