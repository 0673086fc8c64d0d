"""Detection-style metrics: role AP, binary interactiveness AP, NIS
reduction statistics, and the body-part attention pattern table."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import iou
from .suppression import EdgeScores
from .types import PATTERN_COLUMNS, PART_GROUPS, EvalRecord, PatternRow


@dataclass
class EvalResult:
    per_category: dict[int, float]
    mean_ap: float

    def to_text(self) -> str:
        lines = ["category      AP"]
        for cat in sorted(self.per_category):
            lines.append(f"{cat:<10d}  {self.per_category[cat]:.4f}")
        lines.append(f"mAP         {self.mean_ap:.4f}")
        return "\n".join(lines) + "\n"


def _pair_overlap(p: EvalRecord, g: EvalRecord) -> float:
    return min(iou(p.human_box, g.human_box), iou(p.object_box, g.object_box))


def average_precision(
    predictions: Sequence[EvalRecord],
    gts: Sequence[EvalRecord],
    iou_min: float = 0.5,
) -> float:
    """All-point-interpolation AP with greedy highest-score-first matching.

    A prediction is a true positive when both its boxes overlap an
    unmatched same-image ground truth with IoU >= iou_min; among
    qualifying ground truths the one with the largest min-IoU wins, ties
    by ground-truth index. Score ties break by prediction order.
    """
    if not gts:
        return 0.0
    order = sorted(range(len(predictions)), key=lambda i: (-predictions[i].score, i))
    matched = [False] * len(gts)
    tp = np.zeros(len(order))
    for rank, i in enumerate(order):
        pred = predictions[i]
        best, best_ov = -1, -1.0
        for j, gt in enumerate(gts):
            if matched[j] or gt.image_id != pred.image_id:
                continue
            ov = _pair_overlap(pred, gt)
            if ov >= iou_min and ov > best_ov:
                best, best_ov = j, ov
        if best >= 0:
            matched[best] = True
            tp[rank] = 1.0
    cum_tp = np.cumsum(tp)
    recall = cum_tp / len(gts)
    precision = cum_tp / np.arange(1, len(order) + 1)

    mrec = np.concatenate(([0.0], recall))
    mpre = np.concatenate(([0.0], precision))
    for i in range(len(mpre) - 1, 0, -1):
        mpre[i - 1] = max(mpre[i - 1], mpre[i])
    changed = np.flatnonzero(mrec[1:] != mrec[:-1])
    return float(np.sum((mrec[changed + 1] - mrec[changed]) * mpre[changed + 1]))


def role_map(
    predictions: Sequence[EvalRecord],
    gts: Sequence[EvalRecord],
    iou_min: float = 0.5,
) -> EvalResult:
    """Per-category AP plus the mean over categories with ground truth."""
    cats = sorted({g.category_id for g in gts})
    per_cat = {}
    for cat in cats:
        per_cat[cat] = average_precision(
            [p for p in predictions if p.category_id == cat],
            [g for g in gts if g.category_id == cat],
            iou_min,
        )
    mean = float(np.mean(list(per_cat.values()))) if per_cat else 0.0
    return EvalResult(per_cat, mean)


def interactiveness_map(
    predictions: Sequence[EvalRecord],
    gts: Sequence[EvalRecord],
    iou_min: float = 0.5,
) -> float:
    """Binary interactiveness detection AP (single-category role AP)."""
    return average_precision(predictions, gts, iou_min)


def reduction_stats(
    edges: Sequence[EdgeScores], gt_interactive: Sequence[bool]
) -> Optional[float]:
    """Percentage of non-interactive edges removed by suppression; None
    when the image set has no non-interactive edges."""
    n_neg = n_sup_neg = 0
    for edge, label in zip(edges, gt_interactive):
        if not label:
            n_neg += 1
            if edge.suppressed:
                n_sup_neg += 1
    if n_neg == 0:
        return None
    return 100.0 * n_sup_neg / n_neg


def part_pattern_rows(
    part_probs: np.ndarray,
    pair_hois: Sequence[frozenset[int]],
    hoi_ids: Sequence[int],
) -> list[PatternRow]:
    """Average part interactiveness per HOI, folded over left/right and
    minimax-rescaled to [0, 1].

    ``part_probs`` is (N, 10) with one row per ground-truth-positive pair.
    HOIs with no pairs are skipped; an all-equal row cannot be rescaled
    and is emitted as zeros with the degenerate flag set.
    """
    probs = np.asarray(part_probs, dtype=np.float64)
    rows = []
    for hoi in hoi_ids:
        mask = np.array([hoi in hois for hois in pair_hois], dtype=bool)
        if not mask.any():
            continue
        avg = probs[mask].mean(axis=0)
        six = np.array(
            [np.mean([avg[p] for p in PART_GROUPS[col]]) for col in PATTERN_COLUMNS]
        )
        spread = six.max() - six.min()
        if spread == 0.0:
            rows.append(PatternRow(hoi, (0.0,) * 6, degenerate=True))
        else:
            scaled = (six - six.min()) / spread
            rows.append(PatternRow(hoi, tuple(float(v) for v in scaled)))
    return rows


def pattern_table_text(rows: Sequence[PatternRow]) -> str:
    header = "hoi_id  " + "  ".join(f"{c:>10}" for c in PATTERN_COLUMNS)
    lines = [header]
    for row in rows:
        cells = "  ".join(f"{v:>10.3f}" for v in row.values)
        suffix = "  (degenerate)" if row.degenerate else ""
        lines.append(f"{row.hoi_id:<6d}  {cells}{suffix}")
    return "\n".join(lines) + "\n"
