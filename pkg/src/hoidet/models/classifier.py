"""Multi-label HOI classifier with three streams and late fusion.

Human and object streams score every category from instance features;
the spatial stream scores them from the two-plane map. Stream scores are
fused multiplicatively: sigmoid of the (averaged) human/object logits
gated by the sigmoid of the spatial logits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data.features import FeatureBatch
from ..nn import ParamStore, Var, he_init
from ..nn.ops import add, dense, multilabel_bce, mul, scale, sigmoid
from .streams import (
    NetConfig,
    add_instance_trunk,
    add_map_stream,
    instance_trunk,
    map_stream,
    trunk_param_names,
)


@dataclass
class ClassifierOut:
    z_h: Var  # (B, K) human-stream logits
    z_o: Var  # (B, K)
    z_sp: Var  # (B, K)
    s_c: Var  # (B, K) fused scores in [0, 1]


def late_fusion(z_h: Var, z_o: Var, z_sp: Var, mode: str = "mean") -> Var:
    """sigmoid of the combined instance logits, gated by the spatial
    stream. ``mean`` halves the sum so both streams keep equal weight."""
    if z_h.shape != z_o.shape or z_h.shape != z_sp.shape:
        raise ValueError("fusion inputs must share their shape")
    combined = add(z_h, z_o)
    if mode == "mean":
        combined = scale(combined, 0.5)
    elif mode != "sum":
        raise ValueError(f"unknown fusion mode {mode!r}")
    return mul(sigmoid(combined), sigmoid(z_sp))


class HoiClassifierNet:
    def __init__(self, cfg: NetConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.store = ParamStore()
        add_instance_trunk(self.store, "human_trunk", cfg.feature_dim, cfg.hidden, rng)
        add_instance_trunk(self.store, "object_trunk", cfg.feature_dim, cfg.hidden, rng)
        add_map_stream(self.store, "spatial_stream", 2, cfg.hidden, rng)
        for head in ("head_h", "head_o", "head_sp"):
            self.store.param(
                f"{head}.W", he_init(rng, (cfg.n_categories, cfg.hidden), cfg.hidden)
            )
            self.store.param(f"{head}.b", np.zeros(cfg.n_categories))

    def forward(self, batch: FeatureBatch) -> ClassifierOut:
        f_h = instance_trunk(self.store, "human_trunk", Var(batch.f_h))
        f_o = instance_trunk(self.store, "object_trunk", Var(batch.f_o))
        f_sp = map_stream(
            self.store, "spatial_stream", Var(np.ascontiguousarray(batch.maps[:, :2]))
        )
        z_h = dense(f_h, self.store["head_h.W"], self.store["head_h.b"])
        z_o = dense(f_o, self.store["head_o.W"], self.store["head_o.b"])
        z_sp = dense(f_sp, self.store["head_sp.W"], self.store["head_sp.b"])
        return ClassifierOut(z_h, z_o, z_sp, late_fusion(z_h, z_o, z_sp, self.cfg.fusion))

    def loss(self, out: ClassifierOut, multihot: np.ndarray) -> Var:
        return multilabel_bce(out.s_c, np.asarray(multihot, dtype=np.float64))


def share_trunks(d_net, c_net, mode: str = "joint") -> ParamStore:
    """Link (or verify unlinked) human/object trunks and return the union
    parameter view used by the optimizer.

    Joint mode rebinds the classifier's trunk entries to the
    discriminator's Vars, so one update moves both networks. Transfer
    mode requires fully disjoint parameter sets.
    """
    if mode == "joint":
        for prefix in ("human_trunk", "object_trunk"):
            for name in trunk_param_names(prefix):
                c_net.store.rebind(name, d_net.store[name])
    elif mode == "transfer":
        d_ids = {id(v) for v in d_net.store.unique_vars()}
        if any(id(v) in d_ids for v in c_net.store.unique_vars()):
            raise ValueError("transfer mode requires disjoint parameter sets")
    else:
        raise ValueError(f"unknown mode {mode!r}")
    view = ParamStore()
    for name, var in d_net.store.items():
        view.adopt(f"D.{name}", var)
    for name, var in c_net.store.items():
        view.adopt(f"C.{name}", var)
    return view
