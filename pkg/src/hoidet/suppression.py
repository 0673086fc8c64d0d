"""Detection-quality reweighting and non-interaction suppression.

The low-grade instance suppressive curve P(x) = T / (1 + exp(k - w*x))
downweights pairs built on weak detections; pairs whose modulated
interactiveness falls below the threshold alpha are suppressed before
HOI classification, except for categories flagged no-interaction, whose
scores are always retained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .types import HoiCategoryTable


@dataclass(frozen=True)
class LisParams:
    T: float = 8.4
    k: float = 12.0
    w: float = 10.0

    def __post_init__(self) -> None:
        if not (self.T > 0 and self.w > 0):
            raise ValueError("require T > 0 and w > 0")


def lis_P(x: float, p: LisParams = LisParams()) -> float:
    """Logistic-segment weight for a single detection score."""
    return p.T / (1.0 + math.exp(p.k - p.w * x))


def lis_weight(s_h: float, s_o: float, p: LisParams = LisParams()) -> float:
    """Pair weight: product of the per-detection curves. Symmetric and
    increasing in each argument."""
    return lis_P(s_h, p) * lis_P(s_o, p)


def modulate(s_inst: float, L: float) -> float:
    """Scale an interactiveness score by a non-negative LIS weight."""
    if L < 0:
        raise ValueError("LIS weight must be >= 0")
    return s_inst * L


@dataclass
class EdgeScores:
    """Per-edge state flowing through suppression and fusion."""

    edge_id: int
    image_id: str
    h_index: int
    o_index: int
    p_inst: float
    s_lis: float
    hoi_scores: dict[int, float] = field(default_factory=dict)  # category -> S_C entry
    suppressed: bool = False


@dataclass
class SuppressionReport:
    total: int
    interactive: int
    non_interactive: int
    suppressed: int
    suppressed_non_interactive: int
    suppressed_interactive: int
    alpha: float

    @property
    def non_interactive_reduction_pct(self) -> Optional[float]:
        if self.non_interactive == 0:
            return None
        return 100.0 * self.suppressed_non_interactive / self.non_interactive

    def to_text(self) -> str:
        red = self.non_interactive_reduction_pct
        red_s = "n/a" if red is None else f"-{red:.2f}%"
        rows = [
            ("total edges", self.total),
            ("interactive (gt)", self.interactive),
            ("non-interactive (gt)", self.non_interactive),
            ("suppressed", self.suppressed),
            ("suppressed non-interactive", self.suppressed_non_interactive),
            ("suppressed interactive", self.suppressed_interactive),
        ]
        width = max(len(r[0]) for r in rows)
        lines = [f"suppression report (alpha={self.alpha})"]
        lines += [f"  {name:<{width}}  {count}" for name, count in rows]
        lines.append(f"  non-interactive reduction: {red_s}")
        return "\n".join(lines) + "\n"


def nis_filter(
    edges: Sequence[EdgeScores],
    alpha: float,
    table: HoiCategoryTable,
    gt_interactive: Optional[Sequence[Optional[bool]]] = None,
) -> tuple[list[EdgeScores], SuppressionReport]:
    """Mark edges with s_lis < alpha as suppressed and return the kept set.

    Suppressed edges lose their scores for every category except the
    flagged no-interaction ones, which survive suppression. With
    alpha = 0 nothing is suppressed. ``gt_interactive`` (when labels are
    known) feeds the reduction statistics only.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    kept = []
    n_sup = n_sup_neg = n_sup_pos = n_pos = n_neg = 0
    labels = gt_interactive if gt_interactive is not None else [None] * len(edges)
    for edge, label in zip(edges, labels):
        if label is True:
            n_pos += 1
        elif label is False:
            n_neg += 1
        if edge.s_lis < alpha:
            edge.suppressed = True
            n_sup += 1
            if label is True:
                n_sup_pos += 1
            elif label is False:
                n_sup_neg += 1
            edge.hoi_scores = {
                cat: s for cat, s in edge.hoi_scores.items() if cat in table.no_interaction_ids
            }
            if edge.hoi_scores:
                kept.append(edge)
        else:
            kept.append(edge)
    report = SuppressionReport(
        total=len(edges),
        interactive=n_pos,
        non_interactive=n_neg,
        suppressed=n_sup,
        suppressed_non_interactive=n_sup_neg,
        suppressed_interactive=n_sup_pos,
        alpha=alpha,
    )
    return kept, report


def final_score(s_c: np.ndarray, s_lis: float) -> np.ndarray:
    """Fused per-category scores: the HOI vector scaled by the modulated
    interactiveness. Positive scaling preserves within-pair ranking."""
    return np.asarray(s_c, dtype=np.float64) * s_lis
