"""Shared stream building blocks: instance trunks and map conv streams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..nn import ParamStore, Var, he_init
from ..nn.ops import conv2d, dense, maxpool2d, relu, reshape
from ..raster import MAP_SIZE

CONV1_CHANNELS = 4
CONV2_CHANNELS = 8
# 64 -> conv(5, stride 2, pad 2) -> 32 -> pool2 -> 16 -> conv(3, pad 1) -> 16 -> pool2 -> 8
MAP_FLAT = CONV2_CHANNELS * (MAP_SIZE // 8) * (MAP_SIZE // 8)


@dataclass(frozen=True)
class NetConfig:
    feature_dim: int = 16
    hidden: int = 64
    n_categories: int = 12
    shared_part_classifier: bool = False
    fusion: str = "mean"  # "mean" averages human/object logits, "sum" adds them

    def __post_init__(self) -> None:
        if self.fusion not in ("mean", "sum"):
            raise ValueError(f"unknown fusion mode {self.fusion!r}")


def add_instance_trunk(
    store: ParamStore, prefix: str, feature_dim: int, hidden: int, rng: np.random.Generator
) -> None:
    store.param(f"{prefix}.fc1.W", he_init(rng, (hidden, feature_dim), feature_dim))
    store.param(f"{prefix}.fc1.b", np.zeros(hidden))
    store.param(f"{prefix}.fc2.W", he_init(rng, (hidden, hidden), hidden))
    store.param(f"{prefix}.fc2.b", np.zeros(hidden))


def instance_trunk(store: ParamStore, prefix: str, x: Var) -> Var:
    h = relu(dense(x, store[f"{prefix}.fc1.W"], store[f"{prefix}.fc1.b"]))
    return relu(dense(h, store[f"{prefix}.fc2.W"], store[f"{prefix}.fc2.b"]))


def trunk_param_names(prefix: str) -> list[str]:
    return [f"{prefix}.fc{i}.{p}" for i in (1, 2) for p in ("W", "b")]


def add_map_stream(
    store: ParamStore, prefix: str, in_channels: int, hidden: int, rng: np.random.Generator
) -> None:
    store.param(
        f"{prefix}.conv1.W",
        he_init(rng, (CONV1_CHANNELS, in_channels, 5, 5), in_channels * 25),
    )
    store.param(f"{prefix}.conv1.b", np.zeros(CONV1_CHANNELS))
    store.param(
        f"{prefix}.conv2.W",
        he_init(rng, (CONV2_CHANNELS, CONV1_CHANNELS, 3, 3), CONV1_CHANNELS * 9),
    )
    store.param(f"{prefix}.conv2.b", np.zeros(CONV2_CHANNELS))
    store.param(f"{prefix}.fc1.W", he_init(rng, (hidden, MAP_FLAT), MAP_FLAT))
    store.param(f"{prefix}.fc1.b", np.zeros(hidden))
    store.param(f"{prefix}.fc2.W", he_init(rng, (hidden, hidden), hidden))
    store.param(f"{prefix}.fc2.b", np.zeros(hidden))


def map_stream(store: ParamStore, prefix: str, maps: Var) -> Var:
    """Two conv layers with max-pooling, then two dense layers."""
    h = relu(conv2d(maps, store[f"{prefix}.conv1.W"], store[f"{prefix}.conv1.b"], stride=2, pad=2))
    h = maxpool2d(h, 2)
    h = relu(conv2d(h, store[f"{prefix}.conv2.W"], store[f"{prefix}.conv2.b"], stride=1, pad=1))
    h = maxpool2d(h, 2)
    flat = reshape(h, (h.shape[0], MAP_FLAT))
    flat = relu(dense(flat, store[f"{prefix}.fc1.W"], store[f"{prefix}.fc1.b"]))
    return relu(dense(flat, store[f"{prefix}.fc2.W"], store[f"{prefix}.fc2.b"]))


def add_two_layer_head(
    store: ParamStore, prefix: str, in_dim: int, hidden: int, out_dim: int, rng: np.random.Generator
) -> None:
    store.param(f"{prefix}.fc1.W", he_init(rng, (hidden, in_dim), in_dim))
    store.param(f"{prefix}.fc1.b", np.zeros(hidden))
    store.param(f"{prefix}.fc2.W", he_init(rng, (out_dim, hidden), hidden))
    store.param(f"{prefix}.fc2.b", np.zeros(out_dim))


def two_layer_head(store: ParamStore, prefix: str, x: Var) -> Var:
    h = relu(dense(x, store[f"{prefix}.fc1.W"], store[f"{prefix}.fc1.b"]))
    return dense(h, store[f"{prefix}.fc2.W"], store[f"{prefix}.fc2.b"])
