"""SGD with momentum under a cosine-decay warm-restart schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .autograd import Var


@dataclass(frozen=True)
class CosineRestarts:
    """lr(t) follows a cosine from lr0 down to lr_min within each restart
    period; period i+1 is period_mult times longer than period i."""

    lr0: float
    lr_min: float = 0.0
    period0: int = 1000
    period_mult: float = 2.0

    def __post_init__(self) -> None:
        if not self.lr0 > self.lr_min >= 0.0:
            raise ValueError("require lr0 > lr_min >= 0")
        if self.period0 < 1 or self.period_mult < 1.0:
            raise ValueError("require period0 >= 1 and period_mult >= 1")

    def lr(self, t: int) -> float:
        if t < 0:
            raise ValueError("step index must be >= 0")
        t_cur = float(t)
        period = float(self.period0)
        while t_cur >= period:
            t_cur -= period
            period *= self.period_mult
        return self.lr_min + 0.5 * (self.lr0 - self.lr_min) * (
            1.0 + math.cos(math.pi * t_cur / period)
        )


class SgdMomentum:
    """v <- momentum * v - lr * g;  p <- p + v."""

    def __init__(self, params: Iterable[Var], schedule: CosineRestarts, momentum: float = 0.9):
        seen: set[int] = set()
        self.params: list[Var] = []
        for p in params:
            if id(p) not in seen:
                seen.add(id(p))
                self.params.append(p)
        self.schedule = schedule
        self.momentum = momentum
        self._velocity = [np.zeros_like(p.value) for p in self.params]

    def step(self, t: int) -> float:
        lr = self.schedule.lr(t)
        for p, vel in zip(self.params, self._velocity):
            if p.grad is None:
                continue
            vel *= self.momentum
            vel -= lr * p.grad
            p.value += vel
        return lr

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None
