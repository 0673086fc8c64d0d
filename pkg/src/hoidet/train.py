"""Training orchestration: default joint learning and transfer learning.

Joint mode trains the discriminator and the classifier together on one
dataset with shared human/object trunks, minimizing the sum of both
losses. Transfer mode trains the discriminator on the union of one or
more datasets using only binary labels, trains the classifier on the
test vocabulary's own train split, and composes the two at inference.
"""

from __future__ import annotations

import csv
import os
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import RunConfig
from .data.manifest import DatasetManifest, load_manifest
from .data.pipeline import PreparedImage, prepare_manifest
from .evaluation import (
    EvalResult,
    interactiveness_map,
    part_pattern_rows,
    pattern_table_text,
    reduction_stats,
    role_map,
)
from .infer import InferenceResult, run_inference, write_dumps
from .models import HoiClassifierNet, InteractivenessNet, NetConfig, share_trunks
from .nn import CosineRestarts, ParamStore, SgdMomentum, backward
from .nn.ops import add
from .types import N_PARTS, EvalRecord, PatternRow

# Fixed per-stage offsets under the root seed.
SEED_D_INIT = 1
SEED_C_INIT = 2
SEED_SHUFFLE = 3
SEED_SAMPLE = 4

# Part classifiers start with a positive bias so the attention gates are
# open early; collapsed gates starve the part features of gradient.
PART_BIAS_INIT = 1.5


@dataclass(frozen=True)
class TransferMode:
    d_train_sets: tuple[str, ...]
    c_train_set: str
    test_set: str

    def __post_init__(self) -> None:
        if self.test_set != self.c_train_set:
            raise ValueError("the classifier is dataset-specific: c_train_set must equal test_set")
        if not self.d_train_sets:
            raise ValueError("need at least one discriminator train set")


@dataclass
class EvalReport:
    interactiveness_ap: float
    reduction_pct: Optional[float]
    map_full: float  # NIS + LIS as configured
    map_no_nis: float
    map_no_lis: float
    map_baseline: float  # no NIS, no LIS
    per_category: dict[int, float]
    pattern_rows: list[PatternRow]

    def to_dict(self) -> dict:
        return {
            "interactiveness_ap": self.interactiveness_ap,
            "reduction_pct": self.reduction_pct,
            "mAP": {
                "full": self.map_full,
                "no_nis": self.map_no_nis,
                "no_lis": self.map_no_lis,
                "no_nis_no_lis": self.map_baseline,
            },
            "per_category_ap": {str(k): v for k, v in sorted(self.per_category.items())},
            "pattern_rows": [
                {"hoi_id": r.hoi_id, "values": list(r.values), "degenerate": r.degenerate}
                for r in self.pattern_rows
            ],
        }

    def to_text(self) -> str:
        red = "n/a" if self.reduction_pct is None else f"-{self.reduction_pct:.2f}%"
        lines = [
            f"interactiveness AP        {self.interactiveness_ap:.4f}",
            f"non-interactive reduction {red}",
            f"mAP (as configured)       {self.map_full:.4f}",
            f"mAP w/o NIS               {self.map_no_nis:.4f}",
            f"mAP w/o LIS               {self.map_no_lis:.4f}",
            f"mAP w/o NIS & LIS         {self.map_baseline:.4f}",
            "",
            pattern_table_text(self.pattern_rows),
        ]
        return "\n".join(lines)


@dataclass
class RunResult:
    cfg: RunConfig
    d_net: InteractivenessNet
    c_net: HoiClassifierNet
    history: list[dict]
    report: EvalReport
    inference: InferenceResult
    out_paths: dict[str, str] = field(default_factory=dict)


class DatasetRepo:
    """Named manifests, from a directory of <name>_<split>.jsonl files or
    handed in directly (tests, synthetic pipelines)."""

    def __init__(self, data_dir: Optional[str] = None):
        self.data_dir = data_dir
        self._cache: dict[tuple[str, str], DatasetManifest] = {}

    @classmethod
    def from_manifests(cls, manifests: dict[str, DatasetManifest]) -> "DatasetRepo":
        repo = cls(None)
        for key, manifest in manifests.items():
            name, split = key.rsplit("_", 1)
            repo._cache[(name, split)] = manifest
        return repo

    def get(self, name: str, split: str) -> DatasetManifest:
        key = (name, split)
        if key not in self._cache:
            if self.data_dir is None:
                raise KeyError(f"dataset {name}_{split} not provided")
            path = os.path.join(self.data_dir, f"{name}_{split}.jsonl")
            self._cache[key] = load_manifest(path)
        return self._cache[key]


def _balance_indices(labels: np.ndarray, ratio: int, rng: np.random.Generator) -> np.ndarray:
    pos = np.flatnonzero(labels)
    neg = np.flatnonzero(~labels)
    n_neg = min(ratio * len(pos) if len(pos) else ratio, len(neg))
    if n_neg:
        picked = np.sort(rng.choice(len(neg), size=n_neg, replace=False))
        return np.concatenate([pos, neg[picked]])
    return pos


def _init_discriminator(cfg: RunConfig, net_cfg: NetConfig) -> InteractivenessNet:
    net = InteractivenessNet(net_cfg, np.random.default_rng([cfg.seed, SEED_D_INIT]))
    names = ["part_cls"] if net_cfg.shared_part_classifier else [f"part_cls{i}" for i in range(N_PARTS)]
    for name in names:
        net.store[f"{name}.fc2.b"].value[:] = PART_BIAS_INIT
    return net


def _train_loop(
    cfg: RunConfig,
    images: list[PreparedImage],
    d_net: Optional[InteractivenessNet],
    c_net: Optional[HoiClassifierNet],
    view: ParamStore,
    stage: int,
) -> list[dict]:
    images = [img for img in images if len(img)]
    if not images:
        raise ValueError("no images with candidate pairs to train on")
    period = max(1, cfg.restart_period_epochs * len(images))
    sched = CosineRestarts(cfg.lr0, cfg.lr_min, period0=period, period_mult=cfg.restart_mult)
    opt = SgdMomentum(view.unique_vars(), sched, cfg.momentum)
    shuffle_rng = np.random.default_rng([cfg.seed, SEED_SHUFFLE, stage])

    history = []
    t = 0
    for epoch in range(cfg.epochs):
        t0 = time.time()
        sums = {"loss_d": 0.0, "loss_c": 0.0, "loss": 0.0}
        n_batches = 0
        for idx in shuffle_rng.permutation(len(images)):
            img = images[idx]
            sample_rng = np.random.default_rng([cfg.seed, SEED_SAMPLE, stage, epoch, int(idx)])
            sel = _balance_indices(img.labels, cfg.neg_ratio, sample_rng)
            if len(sel) == 0:
                continue
            batch = img.feature_batch(sel)
            total = None
            if d_net is not None:
                d_loss = d_net.loss(d_net.forward(batch), img.labels[sel].astype(float))
                sums["loss_d"] += d_loss.total.item()
                total = d_loss.total
            if c_net is not None:
                c_loss = c_net.loss(c_net.forward(batch), img.multihot[sel])
                sums["loss_c"] += c_loss.item()
                total = c_loss if total is None else add(total, c_loss)
            view.zero_grad()
            backward(total)
            lr = opt.step(t)
            t += 1
            sums["loss"] += total.item()
            n_batches += 1
        n = max(n_batches, 1)
        history.append(
            {
                "epoch": epoch + 1,
                "loss": sums["loss"] / n,
                "loss_d": sums["loss_d"] / n,
                "loss_c": sums["loss_c"] / n,
                "lr": lr,
                "seconds": time.time() - t0,
            }
        )
    return history


def _union_store(*nets) -> ParamStore:
    view = ParamStore()
    for tag, net in nets:
        for name, var in net.store.items():
            view.adopt(f"{tag}.{name}", var)
    return view


def interactiveness_eval_records(
    result: InferenceResult, prepared: list[PreparedImage]
) -> tuple[list[EvalRecord], list[EvalRecord]]:
    """Binary detection records: every candidate scored by p_inst, ground
    truth from the derived binary labels."""
    boxes = {}
    gts = []
    for img in prepared:
        for i, pair in enumerate(img.pairs):
            boxes[(img.record.image_id, pair.h_index, pair.o_index)] = (
                pair.human.box,
                pair.obj.box,
            )
            if img.labels[i]:
                gts.append(
                    EvalRecord(img.record.image_id, 1, pair.human.box, pair.obj.box, 0.0)
                )
    preds = [
        EvalRecord(e.image_id, 1, *boxes[(e.image_id, e.h_index, e.o_index)], e.p_inst)
        for e in result.edges
    ]
    return preds, gts


def part_pattern_table(
    d_net: InteractivenessNet,
    prepared: list[PreparedImage],
    table,
    hoi_ids: Optional[list[int]] = None,
) -> list[PatternRow]:
    """Average part probabilities over ground-truth interactive pairs of
    each HOI, folded and minimax-rescaled."""
    probs = []
    hois = []
    flagged = table.no_interaction_ids
    for img in prepared:
        keep = [i for i in range(len(img)) if img.labels[i]]
        if not keep:
            continue
        out = d_net.forward(img.feature_batch(keep))
        for row, i in enumerate(keep):
            probs.append(out.p_part.value[row])
            hois.append(frozenset((img.pairs[i].gt_hois or frozenset()) - flagged))
    if not probs:
        return []
    ids = hoi_ids if hoi_ids is not None else [c.id for c in table if not c.no_interaction]
    return part_pattern_rows(np.asarray(probs), hois, ids)


def evaluate(
    cfg: RunConfig,
    d_net: InteractivenessNet,
    c_net: HoiClassifierNet,
    manifest: DatasetManifest,
    prepared: Optional[list[PreparedImage]] = None,
) -> tuple[EvalReport, InferenceResult]:
    if prepared is None:
        prepared = prepare_manifest(
            manifest, cfg.provider_spec(), cfg.human_thresh, cfg.object_thresh, cfg.gamma
        )
    gt_records = manifest.gt_eval_records()

    def run_with(nis: bool, lis: bool) -> tuple[EvalResult, InferenceResult]:
        from .config import apply_overrides

        sub = apply_overrides(cfg, [("nis", str(nis)), ("lis", str(lis))])
        res = run_inference(sub, d_net, c_net, manifest, prepared)
        return role_map(res.eval_records, gt_records), res

    main_eval, main_res = run_with(cfg.nis, cfg.lis)
    no_nis_eval, _ = run_with(False, cfg.lis)
    no_lis_eval, _ = run_with(cfg.nis, False)
    baseline_eval, _ = run_with(False, False)

    preds, gts = interactiveness_eval_records(main_res, prepared)
    report = EvalReport(
        interactiveness_ap=interactiveness_map(preds, gts),
        reduction_pct=reduction_stats(main_res.edges, main_res.gt_interactive),
        map_full=main_eval.mean_ap,
        map_no_nis=no_nis_eval.mean_ap,
        map_no_lis=no_lis_eval.mean_ap,
        map_baseline=baseline_eval.mean_ap,
        per_category=main_eval.per_category,
        pattern_rows=part_pattern_table(d_net, prepared, manifest.table),
    )
    return report, main_res


def run_mode(cfg: RunConfig, repo: DatasetRepo, out_dir: Optional[str] = None) -> RunResult:
    """Train per the configured mode, then evaluate on the test split with
    the suppression ablation columns."""
    mode = TransferMode(cfg.d_train_sets(), cfg.c_train, cfg.test_set)
    test_manifest = repo.get(mode.test_set, "test")
    n_categories = len(test_manifest.table)
    net_cfg = cfg.net_config(n_categories)
    provider = cfg.provider_spec()

    def prep(manifest: DatasetManifest) -> list[PreparedImage]:
        return prepare_manifest(
            manifest, provider, cfg.human_thresh, cfg.object_thresh, cfg.gamma
        )

    d_net = _init_discriminator(cfg, net_cfg)
    c_net = HoiClassifierNet(net_cfg, np.random.default_rng([cfg.seed, SEED_C_INIT]))

    if cfg.mode == "joint":
        view = share_trunks(d_net, c_net, "joint")
        images = prep(repo.get(mode.c_train_set, "train"))
        history = _train_loop(cfg, images, d_net, c_net, view, stage=0)
    else:
        share_trunks(d_net, c_net, "transfer")
        d_images: list[PreparedImage] = []
        for name in mode.d_train_sets:
            d_images.extend(prep(repo.get(name, "train")))
        d_history = _train_loop(cfg, d_images, d_net, None, _union_store(("D", d_net)), stage=1)
        c_images = prep(repo.get(mode.c_train_set, "train"))
        c_history = _train_loop(cfg, c_images, None, c_net, _union_store(("C", c_net)), stage=2)
        history = [
            {**d_row, "loss_c": c_row["loss_c"], "loss": d_row["loss_d"] + c_row["loss_c"]}
            for d_row, c_row in zip(d_history, c_history)
        ]

    report, inference = evaluate(cfg, d_net, c_net, test_manifest)

    out_paths: dict[str, str] = {}
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        out_paths["d_ckpt"] = os.path.join(out_dir, "d.ckpt")
        out_paths["c_ckpt"] = os.path.join(out_dir, "c.ckpt")
        d_net.store.save(out_paths["d_ckpt"])
        c_net.store.save(out_paths["c_ckpt"])
        out_paths["loss_curve"] = os.path.join(out_dir, "loss_curve.csv")
        with open(out_paths["loss_curve"], "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(history[0].keys()))
            writer.writeheader()
            writer.writerows(history)
        out_paths.update(write_dumps(inference, out_dir))
        out_paths["eval_report_json"] = os.path.join(out_dir, "eval_report.json")
        with open(out_paths["eval_report_json"], "w", encoding="utf-8") as fh:
            import json

            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
        out_paths["eval_report_txt"] = os.path.join(out_dir, "eval_report.txt")
        with open(out_paths["eval_report_txt"], "w", encoding="utf-8") as fh:
            fh.write(report.to_text())
        out_paths["config"] = os.path.join(out_dir, "run_config.txt")
        with open(out_paths["config"], "w", encoding="utf-8") as fh:
            fh.write(cfg.to_text())
    return RunResult(cfg, d_net, c_net, history, report, inference, out_paths)
