import math

import numpy as np
import pytest

from hoidet.geometry import build_part_boxes, iou, union_box
from hoidet.types import (
    JOINT_CONF_MIN,
    N_PARTS,
    NOSE,
    BBox,
    PartBox,
    PoseKeypoints,
)

from conftest import random_box


class TestIou:
    def test_identity(self):
        b = BBox(3, 4, 10, 12)
        assert iou(b, b) == 1.0

    def test_disjoint(self):
        assert iou(BBox(0, 0, 1, 1), BBox(5, 5, 6, 6)) == 0.0

    def test_hand_case(self):
        # inter = 1x2 = 2, union = 4 + 4 - 2 = 6
        assert iou(BBox(0, 0, 2, 2), BBox(1, 0, 3, 2)) == pytest.approx(1 / 3, abs=1e-15)

    def test_symmetric_and_bounded(self, rng):
        for _ in range(200):
            a, b = random_box(rng), random_box(rng)
            v = iou(a, b)
            assert v == iou(b, a)
            assert 0.0 <= v <= 1.0


class TestUnionBox:
    def test_self(self):
        b = BBox(1, 2, 3, 4)
        assert union_box(b, b) == b

    def test_nested(self):
        outer = BBox(0, 0, 10, 10)
        inner = BBox(2, 2, 5, 5)
        assert union_box(outer, inner) == outer

    def test_minmax_oracle(self, rng):
        for _ in range(100):
            a, b = random_box(rng), random_box(rng)
            u = union_box(a, b)
            assert u.x1 == min(a.x1, b.x1)
            assert u.y1 == min(a.y1, b.y1)
            assert u.x2 == max(a.x2, b.x2)
            assert u.y2 == max(a.y2, b.y2)
            assert u.contains(a) and u.contains(b)


def _pose_with(neck_xy, pelvis_xy, nose_xy, conf=0.9):
    """Pose whose shoulder/hip midpoints give the requested neck/pelvis."""
    pts = np.full((17, 3), conf)
    pts[:, 0] = neck_xy[0]
    pts[:, 1] = neck_xy[1]
    nx, ny = neck_xy
    px, py = pelvis_xy
    pts[5, :2] = (nx - 10, ny)
    pts[6, :2] = (nx + 10, ny)
    pts[11, :2] = (px - 5, py)
    pts[12, :2] = (px + 5, py)
    pts[0, :2] = nose_xy
    return PoseKeypoints(pts)


class TestPartBoxes:
    def test_hand_geometry(self):
        # neck (50,20), pelvis (50,60) -> torso 40, gamma 0.6 -> side 24
        kp = _pose_with((50, 20), (50, 60), nose_xy=(50, 10))
        parts = build_part_boxes(kp, gamma=0.6)
        assert len(parts) == N_PARTS
        head = parts[0]
        assert head.valid
        assert head.box.width == pytest.approx(24.0)
        assert head.box.height == pytest.approx(24.0)
        assert head.box.center == (pytest.approx(50.0), pytest.approx(10.0))
        # hip part is anchored at the synthesized pelvis
        assert parts[5].box.center == (pytest.approx(50.0), pytest.approx(60.0))

    def test_all_joints_unconfident(self):
        pts = np.zeros((17, 3))
        pts[:, 0] = np.arange(17)
        pts[:, 1] = np.arange(17) * 2.0
        parts = build_part_boxes(PoseKeypoints(pts), gamma=0.6)
        assert all(not p.valid for p in parts)

    def test_zero_gamma_invalid(self):
        kp = _pose_with((50, 20), (50, 60), nose_xy=(50, 10))
        parts = build_part_boxes(kp, gamma=0.0)
        assert all(not p.valid for p in parts)

    def test_coincident_neck_pelvis_invalid(self):
        kp = _pose_with((50, 20), (50, 20), nose_xy=(50, 10))
        assert all(not p.valid for p in build_part_boxes(kp))

    def test_single_low_confidence_joint(self):
        kp = _pose_with((50, 20), (50, 60), nose_xy=(50, 10))
        pts = kp.pts.copy()
        pts[NOSE, 2] = JOINT_CONF_MIN / 2
        parts = build_part_boxes(PoseKeypoints(pts))
        assert not parts[0].valid
        assert all(p.valid for p in parts[1:])

    def test_translation_equivariance(self, rng):
        kp = _pose_with((50, 20), (50, 60), nose_xy=(48, 11))
        base = build_part_boxes(kp, gamma=0.7)
        for _ in range(20):
            dx, dy = rng.uniform(-30, 30, size=2)
            moved = build_part_boxes(kp.shifted(dx, dy), gamma=0.7)
            for p0, p1 in zip(base, moved):
                assert p1.valid == p0.valid
                assert p1.box.x1 == pytest.approx(p0.box.x1 + dx)
                assert p1.box.y1 == pytest.approx(p0.box.y1 + dy)
                assert p1.box.x2 == pytest.approx(p0.box.x2 + dx)
                assert p1.box.y2 == pytest.approx(p0.box.y2 + dy)

    def test_valid_boxes_are_square(self, rng):
        kp = _pose_with((40, 25), (55, 70), nose_xy=(42, 12))
        for gamma in (0.3, 0.6, 1.1):
            for p in build_part_boxes(kp, gamma=gamma):
                if p.valid:
                    assert p.box.width == pytest.approx(p.box.height)


def test_bbox_validation():
    with pytest.raises(ValueError):
        BBox(0, 0, 0, 1)
    with pytest.raises(ValueError):
        BBox(0, 0, 1, math.inf)
    with pytest.raises(ValueError):
        PartBox(part_id=10, box=BBox(0, 0, 1, 1), valid=True)
