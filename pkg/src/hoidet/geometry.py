"""Box geometry and part-box construction."""

from __future__ import annotations

import math

from .types import (
    JOINT_CONF_MIN,
    L_HIP,
    L_SHOULDER,
    N_PARTS,
    PART_ANCHOR_JOINTS,
    R_HIP,
    R_SHOULDER,
    BBox,
    PartBox,
    PoseKeypoints,
)


def iou(a: BBox, b: BBox) -> float:
    """Intersection over union of two boxes, in [0, 1]."""
    ix1 = max(a.x1, b.x1)
    iy1 = max(a.y1, b.y1)
    ix2 = min(a.x2, b.x2)
    iy2 = min(a.y2, b.y2)
    if ix2 <= ix1 or iy2 <= iy1:
        return 0.0
    inter = (ix2 - ix1) * (iy2 - iy1)
    union = a.area + b.area - inter
    return inter / union


def union_box(a: BBox, b: BBox) -> BBox:
    """Smallest box containing both inputs."""
    return BBox(
        min(a.x1, b.x1),
        min(a.y1, b.y1),
        max(a.x2, b.x2),
        max(a.y2, b.y2),
    )


def neck_point(kp: PoseKeypoints) -> tuple[float, float, float]:
    """Synthesized neck: shoulder midpoint, confidence = min of the two."""
    lx, ly = kp.xy(L_SHOULDER)
    rx, ry = kp.xy(R_SHOULDER)
    conf = min(kp.confidence(L_SHOULDER), kp.confidence(R_SHOULDER))
    return (0.5 * (lx + rx), 0.5 * (ly + ry), conf)


def pelvis_point(kp: PoseKeypoints) -> tuple[float, float, float]:
    """Synthesized pelvis: hip midpoint, confidence = min of the two."""
    lx, ly = kp.xy(L_HIP)
    rx, ry = kp.xy(R_HIP)
    conf = min(kp.confidence(L_HIP), kp.confidence(R_HIP))
    return (0.5 * (lx + rx), 0.5 * (ly + ry), conf)


def _invalid_part(part_id: int, cx: float, cy: float) -> PartBox:
    # Placeholder 1-px square at the joint; downstream feature slots are
    # zeroed for invalid parts so the box itself is never consumed.
    return PartBox(part_id, BBox(cx, cy, cx + 1.0, cy + 1.0), valid=False)


def build_part_boxes(kp: PoseKeypoints, gamma: float = 0.6) -> tuple[PartBox, ...]:
    """Square part boxes centered on anchor joints.

    The side length is ``gamma`` times the neck-pelvis distance. A part is
    invalid when its anchor joint confidence falls below ``JOINT_CONF_MIN``
    or when the torso scale degenerates (zero neck-pelvis distance or
    non-positive side).
    """
    nx, ny, nconf = neck_point(kp)
    px, py, pconf = pelvis_point(kp)
    torso = math.hypot(nx - px, ny - py)
    side = gamma * torso
    scale_ok = side > 0.0 and nconf >= JOINT_CONF_MIN and pconf >= JOINT_CONF_MIN

    parts = []
    for part_id in range(N_PARTS):
        joint = PART_ANCHOR_JOINTS[part_id]
        if joint < 0:
            cx, cy, conf = px, py, pconf
        else:
            cx, cy = kp.xy(joint)
            conf = kp.confidence(joint)
        if not scale_ok or conf < JOINT_CONF_MIN:
            parts.append(_invalid_part(part_id, cx, cy))
            continue
        half = 0.5 * side
        parts.append(
            PartBox(part_id, BBox(cx - half, cy - half, cx + half, cy + half), valid=True)
        )
    return tuple(parts)
