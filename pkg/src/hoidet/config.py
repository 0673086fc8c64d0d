"""Run configuration: defaults, config-file parsing, flag overrides.

Config files are plain ``key = value`` lines (``#`` comments allowed).
Every key can be overridden from the command line via ``--set key=value``
or a dedicated flag.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields

from .data.features import FeatureProviderSpec
from .models.streams import NetConfig
from .suppression import LisParams


@dataclass
class RunConfig:
    # features / model
    feature_dim: int = 16
    hidden: int = 64
    shared_part_classifier: bool = False
    fusion: str = "mean"
    # optimization
    lr0: float = 1e-4
    lr_min: float = 0.0
    momentum: float = 0.9
    epochs: int = 25
    neg_ratio: int = 4
    restart_period_epochs: int = 5
    restart_mult: float = 2.0
    # suppression
    alpha: float = 0.1
    lis_T: float = 8.4
    lis_k: float = 12.0
    lis_w: float = 10.0
    nis: bool = True
    lis: bool = True
    # pairing / part boxes
    human_thresh: float = 0.6
    object_thresh: float = 0.4
    gamma: float = 0.6
    # run control
    seed: int = 7
    mode: str = "joint"  # joint | transfer
    d_train: str = "A"  # comma-separated dataset names
    c_train: str = "A"
    test_set: str = ""  # empty -> same as c_train
    data_dir: str = "data"
    out_dir: str = "out"

    def __post_init__(self) -> None:
        if self.mode not in ("joint", "transfer"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not self.test_set:
            self.test_set = self.c_train
        if self.test_set != self.c_train:
            raise ValueError("the classifier train set must match the test set")
        if self.mode == "joint" and self.d_train_sets() != (self.c_train,):
            raise ValueError("joint mode trains both networks on the same dataset")

    def d_train_sets(self) -> tuple[str, ...]:
        return tuple(s for s in self.d_train.split(",") if s)

    def lis_params(self) -> LisParams:
        return LisParams(self.lis_T, self.lis_k, self.lis_w)

    def net_config(self, n_categories: int) -> NetConfig:
        return NetConfig(
            feature_dim=self.feature_dim,
            hidden=self.hidden,
            n_categories=n_categories,
            shared_part_classifier=self.shared_part_classifier,
            fusion=self.fusion,
        )

    def provider_spec(self) -> FeatureProviderSpec:
        return FeatureProviderSpec(mode="file", dim=self.feature_dim, seed=self.seed)

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            lines.append(f"{f.name} = {getattr(self, f.name)}")
        return "\n".join(lines) + "\n"


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _coerce(name: str, kind: type, raw: str):
    raw = raw.strip()
    if kind is bool:
        low = raw.lower()
        if low in _BOOL_TRUE:
            return True
        if low in _BOOL_FALSE:
            return False
        raise ValueError(f"config key {name!r}: {raw!r} is not a boolean")
    try:
        return kind(raw)
    except ValueError:
        raise ValueError(f"config key {name!r}: cannot parse {raw!r} as {kind.__name__}") from None


def apply_overrides(cfg: RunConfig, pairs: list[tuple[str, str]]) -> RunConfig:
    """New config with ``(key, value-string)`` overrides applied."""
    kinds = {f.name: f.type for f in fields(RunConfig)}
    types = {"int": int, "float": float, "bool": bool, "str": str}
    updates = {}
    for key, raw in pairs:
        if key not in kinds:
            raise ValueError(f"unknown config key {key!r}")
        kind = types[kinds[key]] if isinstance(kinds[key], str) else kinds[key]
        updates[key] = _coerce(key, kind, raw)
    merged = {f.name: getattr(cfg, f.name) for f in fields(RunConfig)}
    merged.update(updates)
    if "test_set" not in updates and ("c_train" in updates or "mode" in updates):
        merged["test_set"] = ""  # re-derive from c_train
    return RunConfig(**merged)


def load_config_file(path: str, base: RunConfig | None = None) -> RunConfig:
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line.rstrip()!r}")
            key, raw = text.split("=", 1)
            pairs.append((key.strip(), raw))
    return apply_overrides(base or RunConfig(), pairs)
