"""Dense-graph pairing, label derivation, and minibatch balancing."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .geometry import build_part_boxes, iou, union_box
from .types import (
    Detection,
    GtPair,
    HoiCategoryTable,
    HoiGraph,
    PairCandidate,
    PoseKeypoints,
)


def exhaustive_pairing(
    detections: Sequence[Detection],
    human_thresh: float = 0.6,
    object_thresh: float = 0.4,
    keypoints: Optional[dict[int, PoseKeypoints]] = None,
    gamma: float = 0.6,
    include_human_objects: bool = False,
) -> HoiGraph:
    """Every retained human crossed with every retained object.

    By default object candidates are the non-human detections above
    ``object_thresh``; with ``include_human_objects`` humans also serve
    as object candidates for other humans' pairs. A detection is never
    paired with itself. ``keypoints`` maps human detection indices to
    poses and, when given, attaches part boxes.
    """
    if not (0.0 <= human_thresh <= 1.0 and 0.0 <= object_thresh <= 1.0):
        raise ValueError("pairing thresholds must lie in [0, 1]")

    humans = [i for i, d in enumerate(detections) if d.is_human and d.score >= human_thresh]
    objects = [
        i
        for i, d in enumerate(detections)
        if d.score >= object_thresh and (include_human_objects or not d.is_human)
    ]

    edges = []
    for hi in humans:
        human = detections[hi]
        parts = None
        if keypoints is not None and hi in keypoints:
            parts = build_part_boxes(keypoints[hi], gamma)
        for oi in objects:
            if oi == hi:
                continue
            obj = detections[oi]
            edges.append(
                PairCandidate(
                    human=human,
                    obj=obj,
                    h_index=hi,
                    o_index=oi,
                    union=union_box(human.box, obj.box),
                    part_boxes=parts,
                )
            )
    return HoiGraph(nodes=list(detections), edges=edges)


def derive_hoi_labels(
    pair: PairCandidate, gt_pairs: Sequence[GtPair], iou_min: float = 0.5
) -> frozenset[int]:
    """Union of category ids over every ground-truth pair both of whose
    boxes overlap the candidate with IoU >= ``iou_min``."""
    cats: set[int] = set()
    for gt in gt_pairs:
        if iou(pair.human.box, gt.human_box) >= iou_min and iou(pair.obj.box, gt.object_box) >= iou_min:
            cats.update(gt.category_ids)
    return frozenset(cats)


def derive_binary_label(
    pair: PairCandidate,
    gt_pairs: Sequence[GtPair],
    table: HoiCategoryTable,
    iou_min: float = 0.5,
) -> bool:
    """True iff the candidate matches a ground-truth pair carrying at
    least one category not flagged as no-interaction."""
    cats = derive_hoi_labels(pair, gt_pairs, iou_min)
    return bool(cats - table.no_interaction_ids)


def assign_labels(
    graph: HoiGraph,
    gt_pairs: Sequence[GtPair],
    table: HoiCategoryTable,
    iou_min: float = 0.5,
) -> None:
    """Fill gt_interactive / gt_hois on every edge in place."""
    for edge in graph.edges:
        cats = derive_hoi_labels(edge, gt_pairs, iou_min)
        edge.gt_hois = cats
        edge.gt_interactive = bool(cats - table.no_interaction_ids)


def balance_sampling(
    pairs: Sequence[PairCandidate],
    ratio_neg_per_pos: int = 4,
    seed: int = 0,
) -> list[PairCandidate]:
    """Per-image minibatch: all positives plus up to ratio * #pos
    negatives, sampled without replacement. With no positives, up to
    ``ratio_neg_per_pos`` negatives are kept. Requires labels assigned.
    """
    pos = [p for p in pairs if p.gt_interactive]
    neg = [p for p in pairs if not p.gt_interactive]
    n_neg = ratio_neg_per_pos * len(pos) if pos else ratio_neg_per_pos
    n_neg = min(n_neg, len(neg))
    rng = np.random.default_rng(seed)
    picked = sorted(rng.choice(len(neg), size=n_neg, replace=False).tolist()) if n_neg else []
    return pos + [neg[i] for i in picked]
