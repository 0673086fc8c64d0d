"""Domain types shared across the detection pipeline.

Coordinates are pixel units with the origin at the top-left corner and
boxes stored as (x1, y1, x2, y2) corners. Keypoints follow the COCO-17
ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

N_KEYPOINTS = 17
N_PARTS = 10

# COCO-17 joint indices.
NOSE = 0
L_EYE, R_EYE = 1, 2
L_EAR, R_EAR = 3, 4
L_SHOULDER, R_SHOULDER = 5, 6
L_ELBOW, R_ELBOW = 7, 8
L_WRIST, R_WRIST = 9, 10
L_HIP, R_HIP = 11, 12
L_KNEE, R_KNEE = 13, 14
L_ANKLE, R_ANKLE = 15, 16

PART_NAMES = (
    "head",
    "left_upper_arm",
    "right_upper_arm",
    "left_hand",
    "right_hand",
    "hip",
    "left_thigh",
    "right_thigh",
    "left_foot",
    "right_foot",
)

# Joint anchoring each part box. -1 marks the pelvis, which COCO-17 lacks
# and which is synthesized as the midpoint of the two hip joints.
PART_ANCHOR_JOINTS = (
    NOSE,
    L_ELBOW,
    R_ELBOW,
    L_WRIST,
    R_WRIST,
    -1,
    L_KNEE,
    R_KNEE,
    L_ANKLE,
    R_ANKLE,
)

# Symmetric part groups, in the column order used by the attention
# pattern table.
PART_GROUPS = {
    "feet": (8, 9),
    "thighs": (6, 7),
    "hip": (5,),
    "upper_arms": (1, 2),
    "hands": (3, 4),
    "head": (0,),
}
PATTERN_COLUMNS = ("feet", "thighs", "hip", "upper_arms", "hands", "head")

JOINT_CONF_MIN = 0.05


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box with strictly positive width and height."""

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self) -> None:
        vals = (self.x1, self.y1, self.x2, self.y2)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite box {vals}")
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise ValueError(f"degenerate box {vals}")

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x1 + self.x2), 0.5 * (self.y1 + self.y2))

    def contains(self, other: "BBox") -> bool:
        return (
            self.x1 <= other.x1
            and self.y1 <= other.y1
            and self.x2 >= other.x2
            and self.y2 >= other.y2
        )

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x1, self.y1, self.x2, self.y2)


@dataclass(frozen=True)
class Detection:
    box: BBox
    class_id: int
    score: float
    is_human: bool

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"detection score {self.score} outside [0, 1]")


class PoseKeypoints:
    """17 COCO-ordered joints, each (x, y, confidence)."""

    __slots__ = ("pts",)

    def __init__(self, pts: Sequence[Sequence[float]] | np.ndarray):
        arr = np.asarray(pts, dtype=np.float64)
        if arr.shape != (N_KEYPOINTS, 3):
            raise ValueError(f"expected {N_KEYPOINTS}x3 keypoints, got {arr.shape}")
        self.pts = arr

    def xy(self, joint: int) -> tuple[float, float]:
        return (float(self.pts[joint, 0]), float(self.pts[joint, 1]))

    def confidence(self, joint: int) -> float:
        return float(self.pts[joint, 2])

    def shifted(self, dx: float, dy: float) -> "PoseKeypoints":
        out = self.pts.copy()
        out[:, 0] += dx
        out[:, 1] += dy
        return PoseKeypoints(out)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PoseKeypoints) and np.array_equal(self.pts, other.pts)

    def __repr__(self) -> str:
        return f"PoseKeypoints({self.pts.tolist()!r})"


@dataclass(frozen=True)
class PartBox:
    part_id: int
    box: BBox
    valid: bool

    def __post_init__(self) -> None:
        if not 0 <= self.part_id < N_PARTS:
            raise ValueError(f"part_id {self.part_id} outside [0, {N_PARTS})")


@dataclass
class PairCandidate:
    """One human-object edge of the dense interaction graph.

    ``h_index``/``o_index`` identify the underlying detections within
    their image, which keeps edges addressable through suppression and
    in prediction dumps.
    """

    human: Detection
    obj: Detection
    h_index: int
    o_index: int
    union: BBox
    part_boxes: Optional[tuple[PartBox, ...]] = None
    gt_interactive: Optional[bool] = None
    gt_hois: Optional[frozenset[int]] = None

    def __post_init__(self) -> None:
        if not self.human.is_human:
            raise ValueError("pair human slot holds a non-human detection")
        if not (self.union.contains(self.human.box) and self.union.contains(self.obj.box)):
            raise ValueError("union box does not contain both detections")


@dataclass
class HoiGraph:
    nodes: list[Detection]
    edges: list[PairCandidate]


@dataclass(frozen=True)
class HoiCategory:
    id: int
    verb: str
    object_class: int
    no_interaction: bool = False


class HoiCategoryTable:
    """Category vocabulary with the no-interaction flags used by NIS."""

    def __init__(self, categories: Sequence[HoiCategory]):
        ids = [c.id for c in categories]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate category ids")
        self.categories = tuple(categories)
        self.by_id = {c.id: c for c in categories}
        self.no_interaction_ids = frozenset(c.id for c in categories if c.no_interaction)

    def __len__(self) -> int:
        return len(self.categories)

    def __iter__(self):
        return iter(self.categories)

    def __contains__(self, cat_id: int) -> bool:
        return cat_id in self.by_id

    def ids(self) -> list[int]:
        return [c.id for c in self.categories]

    def index_of(self, cat_id: int) -> int:
        # Position in the table defines the score-vector layout.
        try:
            return self._index[cat_id]
        except AttributeError:
            self._index = {c.id: i for i, c in enumerate(self.categories)}
            return self._index[cat_id]


@dataclass(frozen=True)
class GtPair:
    """Ground-truth annotated pair used for label derivation and eval."""

    human_box: BBox
    object_box: BBox
    category_ids: frozenset[int]


@dataclass(frozen=True)
class EvalRecord:
    image_id: str
    category_id: int
    human_box: BBox
    object_box: BBox
    score: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.score):
            raise ValueError("non-finite eval score")


@dataclass(frozen=True)
class PatternRow:
    hoi_id: int
    values: tuple[float, float, float, float, float, float]
    degenerate: bool = False
