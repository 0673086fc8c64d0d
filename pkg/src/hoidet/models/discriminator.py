"""Binary interactiveness discriminator.

Four streams (human, object, spatial-pose, part) feed eleven compact
classifiers: one per body part and one instance-level. Part
probabilities reweight the part features before the instance classifier,
and the instance logit is tied to the max part logit by a consistency
loss, realizing the multi-instance view (a human interacts iff at least
one part does).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data.features import FeatureBatch
from ..nn import ParamStore, Var
from ..nn.ops import add, bce, concat, max_last, mse, mul, reshape, sigmoid
from ..types import N_PARTS
from .streams import (
    NetConfig,
    add_instance_trunk,
    add_map_stream,
    add_two_layer_head,
    instance_trunk,
    map_stream,
    two_layer_head,
)


@dataclass
class DiscriminatorOut:
    """Forward results as graph nodes; values are (B, ...) arrays."""

    f_h: Var
    f_o: Var
    f_sp: Var
    s_part: Var  # (B, N_PARTS) logits
    p_part: Var  # (B, N_PARTS)
    s_agg: Var  # (B,) max part logit
    s_inst: Var  # (B,)
    p_inst: Var  # (B,)


@dataclass
class DiscriminatorLoss:
    instance: Var  # BCE on the instance probability
    aggregated: Var  # BCE on sigmoid(max part logit)
    consistency: Var  # MSE between instance and max part logits
    total: Var


class InteractivenessNet:
    def __init__(self, cfg: NetConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.store = ParamStore()
        add_instance_trunk(self.store, "human_trunk", cfg.feature_dim, cfg.hidden, rng)
        add_instance_trunk(self.store, "object_trunk", cfg.feature_dim, cfg.hidden, rng)
        add_map_stream(self.store, "sp_stream", 3, cfg.hidden, rng)
        part_in = cfg.feature_dim + 3 * cfg.hidden
        for name in self._part_classifier_names():
            add_two_layer_head(self.store, name, part_in, cfg.hidden, 1, rng)
        inst_in = 3 * cfg.hidden + N_PARTS * cfg.feature_dim
        add_two_layer_head(self.store, "inst_cls", inst_in, cfg.hidden, 1, rng)

    def _part_classifier_names(self) -> list[str]:
        if self.cfg.shared_part_classifier:
            return ["part_cls"]
        return [f"part_cls{i}" for i in range(N_PARTS)]

    def _part_classifier(self, i: int) -> str:
        return "part_cls" if self.cfg.shared_part_classifier else f"part_cls{i}"

    def forward(self, batch: FeatureBatch) -> DiscriminatorOut:
        b = len(batch)
        f_h = instance_trunk(self.store, "human_trunk", Var(batch.f_h))
        f_o = instance_trunk(self.store, "object_trunk", Var(batch.f_o))
        f_sp = map_stream(self.store, "sp_stream", Var(batch.maps))

        part_logits = []
        reweighted = []
        for i in range(N_PARTS):
            f_p = Var(np.ascontiguousarray(batch.f_p[:, i, :]))
            z = concat([f_p, f_h, f_o, f_sp], axis=-1)
            s_i = two_layer_head(self.store, self._part_classifier(i), z)  # (B, 1)
            part_logits.append(s_i)
            reweighted.append(mul(sigmoid(s_i), f_p))

        s_part = concat(part_logits, axis=-1)  # (B, N_PARTS)
        p_part = sigmoid(s_part)
        s_agg = max_last(s_part)

        inst_in = concat([f_sp] + reweighted + [f_h, f_o], axis=-1)
        s_inst = reshape(two_layer_head(self.store, "inst_cls", inst_in), (b,))
        return DiscriminatorOut(
            f_h=f_h,
            f_o=f_o,
            f_sp=f_sp,
            s_part=s_part,
            p_part=p_part,
            s_agg=s_agg,
            s_inst=s_inst,
            p_inst=sigmoid(s_inst),
        )

    def loss(self, out: DiscriminatorOut, labels: np.ndarray) -> DiscriminatorLoss:
        """Three equally weighted terms: instance BCE, aggregated-part BCE,
        and the logit-level consistency MSE."""
        y = np.asarray(labels, dtype=np.float64)
        l_inst = bce(out.p_inst, y)
        l_agg = bce(sigmoid(out.s_agg), y)
        l_cons = mse(out.s_inst, out.s_agg)
        total = add(add(l_inst, l_agg), l_cons)
        return DiscriminatorLoss(l_inst, l_agg, l_cons, total)
