import numpy as np
import pytest

from hoidet.geometry import union_box
from hoidet.raster import (
    GRAY_VALUES,
    MAP_SIZE,
    SKELETON_SEGMENTS,
    dump_plane,
    make_map_stack,
    pose_map,
    spatial_maps,
)
from hoidet.types import BBox, PairCandidate, PoseKeypoints

from conftest import det, random_box, upright_pose


def _pair(hbox, obox):
    return PairCandidate(
        det(hbox, 0.9, 0, is_human=True), det(obox, 0.9, 2), 0, 1, union_box(hbox, obox)
    )


def _oracle_mask(box, union):
    """Independent per-pixel-center containment test."""
    mask = np.zeros((MAP_SIZE, MAP_SIZE))
    sx = MAP_SIZE / union.width
    sy = MAP_SIZE / union.height
    gx1, gx2 = (box.x1 - union.x1) * sx, (box.x2 - union.x1) * sx
    gy1, gy2 = (box.y1 - union.y1) * sy, (box.y2 - union.y1) * sy
    for r in range(MAP_SIZE):
        for c in range(MAP_SIZE):
            if gx1 <= c + 0.5 <= gx2 and gy1 <= r + 0.5 <= gy2:
                mask[r, c] = 1.0
    return mask


class TestSpatialMaps:
    def test_human_box_equals_union(self):
        pair = _pair(BBox(0, 0, 40, 40), BBox(10, 10, 20, 20))
        planes = spatial_maps(pair)
        assert planes.shape == (2, MAP_SIZE, MAP_SIZE)
        assert np.all(planes[0] == 1.0)

    def test_degenerate_object_still_marks_one_pixel(self):
        # object narrower than one grid cell after mapping
        pair = _pair(BBox(0, 0, 1000, 1000), BBox(500.1, 500.1, 500.2, 500.2))
        planes = spatial_maps(pair)
        assert planes[1].sum() >= 1.0

    def test_matches_pixel_center_oracle(self, rng):
        for _ in range(25):
            hbox, obox = random_box(rng), random_box(rng)
            pair = _pair(hbox, obox)
            planes = spatial_maps(pair)
            for plane, box in ((planes[0], hbox), (planes[1], obox)):
                oracle = _oracle_mask(box, pair.union)
                if oracle.sum() > 0:
                    assert np.array_equal(plane, oracle)
                else:
                    assert plane.sum() == 1.0

    def test_binary_values(self, rng):
        pair = _pair(random_box(rng), random_box(rng))
        planes = spatial_maps(pair)
        assert set(np.unique(planes)) <= {0.0, 1.0}

    def test_translation_invariance(self, rng):
        hbox, obox = random_box(rng), random_box(rng)
        ref = spatial_maps(_pair(hbox, obox))
        for _ in range(10):
            # quarter-pixel shifts stay exactly representable, so the
            # shifted subtractions reproduce bit-identical grid coords
            dx, dy = rng.integers(-200, 200, 2) * 0.25
            shifted = _pair(
                BBox(hbox.x1 + dx, hbox.y1 + dy, hbox.x2 + dx, hbox.y2 + dy),
                BBox(obox.x1 + dx, obox.y1 + dy, obox.x2 + dx, obox.y2 + dy),
            )
            assert np.array_equal(spatial_maps(shifted), ref)


class TestPoseMap:
    def test_all_joints_invalid(self):
        pts = np.zeros((17, 3))
        pts[:, :2] = np.arange(17)[:, None]
        plane = pose_map(PoseKeypoints(pts), BBox(0, 0, 64, 64))
        assert np.all(plane == 0.0)

    def test_gray_endpoints(self):
        assert GRAY_VALUES[0] == pytest.approx(0.15)
        assert GRAY_VALUES[16] == pytest.approx(0.95)
        assert np.allclose(np.diff(GRAY_VALUES), 0.05)

    def test_single_segment_value(self):
        # only the hip joints confident -> only segment 16 (11, 12) drawn
        pts = np.zeros((17, 3))
        pts[:, :2] = 5.0
        pts[11] = (10.0, 30.0, 0.9)
        pts[12] = (50.0, 34.0, 0.9)
        plane = pose_map(PoseKeypoints(pts), BBox(0, 0, 64, 64))
        vals = set(np.unique(plane))
        assert vals == {0.0, GRAY_VALUES[16]}

    def test_values_from_canonical_set(self, rng):
        union = BBox(0, 0, 100, 120)
        allowed = {0.0} | set(GRAY_VALUES)
        for _ in range(10):
            kp = upright_pose(cx=rng.uniform(20, 80), top=rng.uniform(0, 30), height=80)
            plane = pose_map(kp, union)
            assert set(np.unique(plane)) <= allowed
            assert plane.sum() > 0

    def test_later_segments_overwrite(self):
        # segments 0 (0,1) and 1 (0,2) share the nose pixel; 1 wins
        pts = np.zeros((17, 3))
        pts[0] = (32.0, 32.0, 0.9)
        pts[1] = (10.0, 32.0, 0.9)
        pts[2] = (54.0, 32.0, 0.9)
        plane = pose_map(PoseKeypoints(pts), BBox(0, 0, 64, 64))
        assert plane[32, 32] == GRAY_VALUES[1]

    def test_translation_invariance(self, rng):
        kp = upright_pose()
        union = BBox(10, 5, 110, 125)
        ref = pose_map(kp, union)
        for _ in range(10):
            dx, dy = rng.integers(-160, 160, 2) * 0.25
            moved_union = BBox(union.x1 + dx, union.y1 + dy, union.x2 + dx, union.y2 + dy)
            assert np.array_equal(pose_map(kp.shifted(dx, dy), moved_union), ref)

    def test_deterministic(self):
        kp = upright_pose()
        union = BBox(0, 0, 100, 100)
        assert np.array_equal(pose_map(kp, union), pose_map(kp, union))


def test_skeleton_table():
    assert len(SKELETON_SEGMENTS) == 17
    assert SKELETON_SEGMENTS[0] == (0, 1)
    assert SKELETON_SEGMENTS[-1] == (11, 12)
    assert all(0 <= a < 17 and 0 <= b < 17 for a, b in SKELETON_SEGMENTS)


def test_map_stack_and_dump():
    pair = _pair(BBox(0, 0, 80, 100), BBox(30, 40, 60, 90))
    stack = make_map_stack(pair, upright_pose(cx=40, top=5, height=90))
    assert stack.channels.shape == (3, MAP_SIZE, MAP_SIZE)
    assert stack.spatial.shape == (2, MAP_SIZE, MAP_SIZE)
    text = dump_plane(stack.pose)
    lines = text.strip("\n").split("\n")
    assert len(lines) == MAP_SIZE
    assert all(len(line.split()) == MAP_SIZE for line in lines)
