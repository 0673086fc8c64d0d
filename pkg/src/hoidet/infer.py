"""Two-stage inference over a manifest plus the dump writers.

Per image: exhaustive pairing, discriminator scoring, LIS modulation,
NIS filtering, HOI classification, and score fusion. Dump files:

- ``predictions.jsonl``: one line per surviving edge,
  ``{image_id, h, o, s_inst, s_lis, scores{cat: fused score}}``
- ``d_scores.jsonl``: one line per candidate edge,
  ``{pair_id, s_part[10], s_inst, s_agg}``
- ``c_scores.jsonl``: one line per candidate edge,
  ``{pair_id, s_c{cat: score}}`` sparse above 1e-4
- ``suppression_report.txt``
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import RunConfig
from .data.manifest import DatasetManifest
from .data.pipeline import PreparedImage, prepare_manifest
from .evaluation import reduction_stats
from .models import HoiClassifierNet, InteractivenessNet
from .suppression import EdgeScores, SuppressionReport, lis_weight, modulate, nis_filter
from .types import EvalRecord

SPARSE_EPS = 1e-4


@dataclass
class InferenceResult:
    edges: list[EdgeScores]  # every candidate edge, suppression flags set
    kept: list[EdgeScores]
    report: SuppressionReport
    gt_interactive: list[bool]
    d_rows: list[dict]  # discriminator dump rows
    c_rows: list[dict]  # classifier dump rows
    eval_records: list[EvalRecord]  # fused predictions, for role AP


def pair_id(image_id: str, h: int, o: int) -> str:
    return f"{image_id}:{h}:{o}"


def run_inference(
    cfg: RunConfig,
    d_net: InteractivenessNet,
    c_net: HoiClassifierNet,
    manifest: DatasetManifest,
    prepared: Optional[list[PreparedImage]] = None,
) -> InferenceResult:
    if prepared is None:
        prepared = prepare_manifest(
            manifest, cfg.provider_spec(), cfg.human_thresh, cfg.object_thresh, cfg.gamma
        )
    table = manifest.table
    cat_ids = [c.id for c in table.categories]
    lis_p = cfg.lis_params()

    edges: list[EdgeScores] = []
    labels: list[bool] = []
    d_rows: list[dict] = []
    c_rows: list[dict] = []
    box_of: dict[int, tuple] = {}
    edge_id = 0
    for img in prepared:
        if not len(img):
            continue
        fb = img.feature_batch(list(range(len(img))))
        d_out = d_net.forward(fb)
        c_out = c_net.forward(fb)
        for i, pair in enumerate(img.pairs):
            p_inst = float(d_out.p_inst.value[i])
            weight = lis_weight(pair.human.score, pair.obj.score, lis_p) if cfg.lis else 1.0
            s_lis = modulate(p_inst, weight)
            s_c = c_out.s_c.value[i]
            edge = EdgeScores(
                edge_id=edge_id,
                image_id=img.record.image_id,
                h_index=pair.h_index,
                o_index=pair.o_index,
                p_inst=p_inst,
                s_lis=s_lis,
                hoi_scores={cat: float(s_c[k]) for k, cat in enumerate(cat_ids)},
            )
            edges.append(edge)
            labels.append(bool(img.labels[i]))
            box_of[edge_id] = (pair.human.box, pair.obj.box)
            pid = pair_id(img.record.image_id, pair.h_index, pair.o_index)
            d_rows.append(
                {
                    "pair_id": pid,
                    "s_part": [float(v) for v in d_out.s_part.value[i]],
                    "s_inst": float(d_out.s_inst.value[i]),
                    "s_agg": float(d_out.s_agg.value[i]),
                }
            )
            c_rows.append(
                {
                    "pair_id": pid,
                    "s_c": {
                        str(cat): float(s_c[k])
                        for k, cat in enumerate(cat_ids)
                        if s_c[k] > SPARSE_EPS
                    },
                }
            )
            edge_id += 1

    alpha = cfg.alpha if cfg.nis else 0.0
    kept, report = nis_filter(edges, alpha, table, gt_interactive=labels)
    eval_records = []
    for edge in kept:
        # fuse after filtering: surviving categories get S_C * s_lis
        edge.hoi_scores = {cat: s * edge.s_lis for cat, s in edge.hoi_scores.items()}
        hbox, obox = box_of[edge.edge_id]
        for cat, score in edge.hoi_scores.items():
            eval_records.append(EvalRecord(edge.image_id, cat, hbox, obox, score))
    return InferenceResult(edges, kept, report, labels, d_rows, c_rows, eval_records)


def write_dumps(result: InferenceResult, out_dir: str) -> dict[str, str]:
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "predictions": os.path.join(out_dir, "predictions.jsonl"),
        "d_scores": os.path.join(out_dir, "d_scores.jsonl"),
        "c_scores": os.path.join(out_dir, "c_scores.jsonl"),
        "suppression_report": os.path.join(out_dir, "suppression_report.txt"),
    }
    with open(paths["predictions"], "w", encoding="utf-8") as fh:
        for edge in result.kept:
            fh.write(
                json.dumps(
                    {
                        "image_id": edge.image_id,
                        "h": edge.h_index,
                        "o": edge.o_index,
                        "s_inst": edge.p_inst,
                        "s_lis": edge.s_lis,
                        "scores": {str(c): s for c, s in sorted(edge.hoi_scores.items())},
                    }
                )
                + "\n"
            )
    with open(paths["d_scores"], "w", encoding="utf-8") as fh:
        for row in result.d_rows:
            fh.write(json.dumps(row) + "\n")
    with open(paths["c_scores"], "w", encoding="utf-8") as fh:
        for row in result.c_rows:
            fh.write(json.dumps(row) + "\n")
    with open(paths["suppression_report"], "w", encoding="utf-8") as fh:
        fh.write(result.report.to_text())
        red = reduction_stats(result.edges, result.gt_interactive)
        if red is not None:
            fh.write(f"  (recomputed from labels: -{red:.2f}%)\n")
    return paths
