"""Rasterized map inputs for the spatial(-pose) streams.

All maps live on a fixed 64x64 grid covering the human-object union box.
The human/object planes are binary occupancy masks; the pose plane holds
skeleton segments drawn with per-segment gray values. Rasterization is
deterministic and translation-invariant whenever the shift is exactly
representable (the grid mapping subtracts the union origin, so rounding
in shifted coordinates could otherwise move a point across a pixel edge).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .types import JOINT_CONF_MIN, BBox, PairCandidate, PoseKeypoints

MAP_SIZE = 64

# Skeleton segments over COCO-17 joints. The list order defines the gray
# index: segment i is drawn with GRAY_VALUES[i], later segments overwrite
# earlier ones.
SKELETON_SEGMENTS = (
    (0, 1),
    (0, 2),
    (1, 3),
    (2, 4),
    (0, 5),
    (0, 6),
    (5, 7),
    (7, 9),
    (6, 8),
    (8, 10),
    (5, 11),
    (6, 12),
    (11, 13),
    (13, 15),
    (12, 14),
    (14, 16),
    (11, 12),
)

GRAY_VALUES = tuple(0.15 + 0.05 * i for i in range(len(SKELETON_SEGMENTS)))


@dataclass
class MapStack:
    """(3, 64, 64) planes: human mask, object mask, pose map.

    The HOI classifier consumes only the first two planes; the
    interactiveness discriminator consumes all three.
    """

    channels: np.ndarray

    def __post_init__(self) -> None:
        if self.channels.shape != (3, MAP_SIZE, MAP_SIZE):
            raise ValueError(f"bad map stack shape {self.channels.shape}")

    @property
    def spatial(self) -> np.ndarray:
        return self.channels[:2]

    @property
    def pose(self) -> np.ndarray:
        return self.channels[2]


def _pixel_range(lo: float, hi: float, size: int) -> tuple[int, int]:
    # Pixels whose centers land in [lo, hi]; if the interval misses every
    # center, fall back to the single pixel containing its midpoint.
    first = math.ceil(lo - 0.5)
    last = math.floor(hi - 0.5)
    if first > last:
        mid = min(size - 1, max(0, math.floor(0.5 * (lo + hi))))
        return mid, mid
    return max(0, first), min(size - 1, last)


def _to_grid(box: BBox, union: BBox) -> tuple[float, float, float, float]:
    sx = MAP_SIZE / union.width
    sy = MAP_SIZE / union.height
    return (
        (box.x1 - union.x1) * sx,
        (box.y1 - union.y1) * sy,
        (box.x2 - union.x1) * sx,
        (box.y2 - union.y1) * sy,
    )


def _fill_box(plane: np.ndarray, box: BBox, union: BBox) -> None:
    gx1, gy1, gx2, gy2 = _to_grid(box, union)
    c1, c2 = _pixel_range(gx1, gx2, MAP_SIZE)
    r1, r2 = _pixel_range(gy1, gy2, MAP_SIZE)
    plane[r1 : r2 + 1, c1 : c2 + 1] = 1.0


def spatial_maps(pair: PairCandidate) -> np.ndarray:
    """Binary human/object occupancy planes, shape (2, 64, 64)."""
    planes = np.zeros((2, MAP_SIZE, MAP_SIZE), dtype=np.float64)
    _fill_box(planes[0], pair.human.box, pair.union)
    _fill_box(planes[1], pair.obj.box, pair.union)
    return planes


def _joint_pixel(x: float, y: float, union: BBox) -> tuple[int, int]:
    gx = math.floor((x - union.x1) / union.width * MAP_SIZE)
    gy = math.floor((y - union.y1) / union.height * MAP_SIZE)
    return (
        min(MAP_SIZE - 1, max(0, gx)),
        min(MAP_SIZE - 1, max(0, gy)),
    )


def pose_map(kp: PoseKeypoints, union: BBox) -> np.ndarray:
    """Skeleton rasterized into the union-box frame, shape (64, 64)."""
    plane = np.zeros((MAP_SIZE, MAP_SIZE), dtype=np.float64)
    segs = []
    vals = []
    for i, (a, b) in enumerate(SKELETON_SEGMENTS):
        if kp.confidence(a) < JOINT_CONF_MIN or kp.confidence(b) < JOINT_CONF_MIN:
            continue
        ax, ay = _joint_pixel(*kp.xy(a), union)
        bx, by = _joint_pixel(*kp.xy(b), union)
        segs.append((ax, ay, bx, by))
        vals.append(GRAY_VALUES[i])
    if segs:
        kernels.draw_segments(
            plane, np.asarray(segs, dtype=np.int64), np.asarray(vals, dtype=np.float64)
        )
    return plane


def make_map_stack(pair: PairCandidate, kp: PoseKeypoints) -> MapStack:
    planes = np.empty((3, MAP_SIZE, MAP_SIZE), dtype=np.float64)
    planes[:2] = spatial_maps(pair)
    planes[2] = pose_map(kp, pair.union)
    return MapStack(planes)


def dump_plane(plane: np.ndarray) -> str:
    """Golden-file format: rows of 64 space-separated 2-decimal values."""
    return "\n".join(" ".join(f"{v:.2f}" for v in row) for row in plane) + "\n"
