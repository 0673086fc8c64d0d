"""Reverse-mode differentiation over a fixed set of array ops.

Every op returns a :class:`Var` holding a float64 ndarray plus a closure
that routes the incoming gradient to its parents. ``backward`` replays
those closures in reverse topological order. There is no generic
autodiff beyond the ops defined in :mod:`hoidet.nn.ops`.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np


class Var:
    __slots__ = ("value", "grad", "parents", "_backward", "name")

    def __init__(
        self,
        value: np.ndarray | float,
        parents: Sequence["Var"] = (),
        backward: Optional[Callable[[np.ndarray], None]] = None,
        name: str = "",
    ):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad: Optional[np.ndarray] = None
        self.parents = tuple(parents)
        self._backward = backward
        self.name = name

    @property
    def shape(self) -> tuple[int, ...]:
        return self.value.shape

    def item(self) -> float:
        return float(self.value)

    def __repr__(self) -> str:
        tag = f" {self.name!r}" if self.name else ""
        return f"Var{tag}(shape={self.value.shape})"


def accumulate(var: Var, g: np.ndarray) -> None:
    if var.grad is None:
        var.grad = np.zeros_like(var.value)
    var.grad += g


def backward(root: Var) -> None:
    """Propagate d(root)/d(leaf) into every reachable Var's ``grad``."""
    if root.value.size != 1:
        raise ValueError("backward expects a scalar root")
    order: list[Var] = []
    seen: set[int] = set()
    stack: list[tuple[Var, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node.parents:
            if id(p) not in seen:
                stack.append((p, False))

    accumulate(root, np.ones_like(root.value))
    for node in reversed(order):
        if node._backward is not None:
            node._backward(node.grad)
