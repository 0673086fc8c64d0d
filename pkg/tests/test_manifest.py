import json

import numpy as np
import pytest

from hoidet.data.manifest import (
    DatasetManifest,
    GtIndexPair,
    ImageRecord,
    ManifestError,
    load_manifest,
    save_manifest,
)
from hoidet.types import BBox, Detection, HoiCategory, HoiCategoryTable, PoseKeypoints

from conftest import upright_pose


def _table():
    return HoiCategoryTable(
        [
            HoiCategory(0, "use_hands", 1),
            HoiCategory(1, "no_interaction", 1, no_interaction=True),
        ]
    )


def _manifest(rng):
    dets = [
        Detection(BBox(10, 10, 60, 150), 0, 0.95, is_human=True),
        Detection(BBox(80, 40, 120, 90), 1, 0.9, is_human=False),
    ]
    rec = ImageRecord(
        image_id="im000",
        detections=dets,
        keypoints=[upright_pose(cx=35, top=12, height=130)],
        gt_pairs=[GtIndexPair(0, 1, frozenset({0}))],
        features={0: rng.normal(size=11 * 4), 1: rng.normal(size=4)},
    )
    return DatasetManifest("toy", _table(), [rec])


class TestRoundTrip:
    def test_lossless(self, rng, tmp_path):
        manifest = _manifest(rng)
        path = str(tmp_path / "toy.jsonl")
        save_manifest(manifest, path)
        back = load_manifest(path)
        assert back.name == "toy"
        assert [c.id for c in back.table] == [0, 1]
        assert back.table.no_interaction_ids == frozenset({1})
        rec0, rec1 = manifest.images[0], back.images[0]
        assert rec1.image_id == rec0.image_id
        assert rec1.detections == rec0.detections
        assert rec1.gt_pairs == rec0.gt_pairs
        assert np.array_equal(rec1.keypoints[0].pts, rec0.keypoints[0].pts)
        for k in rec0.features:
            assert np.array_equal(rec1.features[k], rec0.features[k])

    def test_save_load_save_identical_bytes(self, rng, tmp_path):
        manifest = _manifest(rng)
        p1, p2 = str(tmp_path / "a.jsonl"), str(tmp_path / "b.jsonl")
        save_manifest(manifest, p1)
        save_manifest(load_manifest(p1), p2)
        assert open(p1, "rb").read() == open(p2, "rb").read()


class TestErrors:
    def test_missing_keypoints_field(self, rng, tmp_path):
        manifest = _manifest(rng)
        path = str(tmp_path / "bad.jsonl")
        save_manifest(manifest, path)
        lines = open(path).read().splitlines()
        rec = json.loads(lines[1])
        del rec["keypoints"]
        open(path, "w").write(lines[0] + "\n" + json.dumps(rec) + "\n")
        with pytest.raises(ManifestError, match="keypoints"):
            load_manifest(path)

    def test_dangling_gt_index_names_pair(self, rng, tmp_path):
        manifest = _manifest(rng)
        manifest.images[0].gt_pairs = [GtIndexPair(0, 5, frozenset({0}))]
        path = str(tmp_path / "bad.jsonl")
        with pytest.raises(ManifestError, match=r"\(0,5\)"):
            save_manifest(manifest, path)

    def test_unknown_category_named(self, rng, tmp_path):
        manifest = _manifest(rng)
        manifest.images[0].gt_pairs = [GtIndexPair(0, 1, frozenset({42}))]
        with pytest.raises(ManifestError, match="42"):
            save_manifest(manifest, str(tmp_path / "bad.jsonl"))

    def test_parse_error_reports_line(self, tmp_path):
        path = str(tmp_path / "broken.jsonl")
        open(path, "w").write('{"dataset": "x", "categories": []}\n{oops\n')
        with pytest.raises(ManifestError, match=":2"):
            load_manifest(path)

    def test_keypoint_count_mismatch(self, rng, tmp_path):
        manifest = _manifest(rng)
        manifest.images[0].keypoints = []
        with pytest.raises(ManifestError, match="keypoint"):
            save_manifest(manifest, str(tmp_path / "bad.jsonl"))

    def test_gt_human_slot_must_be_human(self, rng, tmp_path):
        manifest = _manifest(rng)
        manifest.images[0].gt_pairs = [GtIndexPair(1, 0, frozenset({0}))]
        with pytest.raises(ManifestError, match="not a human"):
            save_manifest(manifest, str(tmp_path / "bad.jsonl"))


def test_gt_eval_records(rng):
    manifest = _manifest(rng)
    recs = manifest.gt_eval_records()
    assert len(recs) == 1
    assert recs[0].category_id == 0
    assert recs[0].image_id == "im000"
