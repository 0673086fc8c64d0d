"""Dataset manifest schema and JSON-lines round-trip I/O.

A manifest file holds one header line with the dataset name and category
table, followed by one line per image. Field names are part of the file
contract; see ``save_manifest`` for the exact layout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..types import (
    BBox,
    Detection,
    EvalRecord,
    GtPair,
    HoiCategory,
    HoiCategoryTable,
    PoseKeypoints,
)


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class GtIndexPair:
    h: int
    o: int
    hois: frozenset[int]


@dataclass
class ImageRecord:
    image_id: str
    detections: list[Detection]
    keypoints: list[PoseKeypoints]  # aligned with human detections, in order
    gt_pairs: list[GtIndexPair]
    features: dict[int, np.ndarray] = field(default_factory=dict)

    def human_indices(self) -> list[int]:
        return [i for i, d in enumerate(self.detections) if d.is_human]

    def keypoints_by_detection(self) -> dict[int, PoseKeypoints]:
        return dict(zip(self.human_indices(), self.keypoints))

    def gt_box_pairs(self) -> list[GtPair]:
        return [
            GtPair(
                self.detections[g.h].box,
                self.detections[g.o].box,
                g.hois,
            )
            for g in self.gt_pairs
        ]


@dataclass
class DatasetManifest:
    name: str
    table: HoiCategoryTable
    images: list[ImageRecord]

    def gt_eval_records(self) -> list[EvalRecord]:
        out = []
        for rec in self.images:
            for g in rec.gt_pairs:
                for cat in sorted(g.hois):
                    out.append(
                        EvalRecord(
                            rec.image_id,
                            cat,
                            self.detections_box(rec, g.h),
                            self.detections_box(rec, g.o),
                            0.0,
                        )
                    )
        return out

    @staticmethod
    def detections_box(rec: ImageRecord, idx: int) -> BBox:
        return rec.detections[idx].box


def _validate_record(rec: ImageRecord, table: HoiCategoryTable, where: str) -> None:
    n = len(rec.detections)
    humans = rec.human_indices()
    if len(rec.keypoints) != len(humans):
        raise ManifestError(
            f"{where}: {len(rec.keypoints)} keypoint sets for {len(humans)} human detections"
        )
    for g in rec.gt_pairs:
        if not (0 <= g.h < n and 0 <= g.o < n):
            raise ManifestError(f"{where}: gt pair ({g.h},{g.o}) references a missing detection")
        if not rec.detections[g.h].is_human:
            raise ManifestError(f"{where}: gt pair ({g.h},{g.o}) human slot is not a human")
        for cat in g.hois:
            if cat not in table:
                raise ManifestError(f"{where}: gt pair ({g.h},{g.o}) uses unknown category {cat}")
    for idx in rec.features:
        if not 0 <= idx < n:
            raise ManifestError(f"{where}: feature vector for missing detection {idx}")


def validate_manifest(manifest: DatasetManifest) -> None:
    ids = set()
    for rec in manifest.images:
        if rec.image_id in ids:
            raise ManifestError(f"duplicate image id {rec.image_id!r}")
        ids.add(rec.image_id)
        _validate_record(rec, manifest.table, f"image {rec.image_id!r}")


def save_manifest(manifest: DatasetManifest, path: str) -> None:
    validate_manifest(manifest)
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "dataset": manifest.name,
            "categories": [
                {
                    "id": c.id,
                    "verb": c.verb,
                    "object": c.object_class,
                    "no_interaction": c.no_interaction,
                }
                for c in manifest.table
            ],
        }
        fh.write(json.dumps(header) + "\n")
        for rec in manifest.images:
            line = {
                "image_id": rec.image_id,
                "detections": [
                    {
                        "box": list(d.box.as_tuple()),
                        "class": d.class_id,
                        "score": d.score,
                        "is_human": d.is_human,
                    }
                    for d in rec.detections
                ],
                "keypoints": [kp.pts.tolist() for kp in rec.keypoints],
                "gt_pairs": [
                    {"h": g.h, "o": g.o, "hois": sorted(g.hois)} for g in rec.gt_pairs
                ],
                "features": {str(i): v.tolist() for i, v in sorted(rec.features.items())},
            }
            fh.write(json.dumps(line) + "\n")


def load_manifest(path: str) -> DatasetManifest:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ManifestError(f"{path}:1: empty manifest")

    def parse(lineno: int, text: str) -> dict:
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None

    header = parse(1, lines[0])
    for key in ("dataset", "categories"):
        if key not in header:
            raise ManifestError(f"{path}:1: header missing field {key!r}")
    table = HoiCategoryTable(
        [
            HoiCategory(c["id"], c["verb"], c["object"], bool(c.get("no_interaction", False)))
            for c in header["categories"]
        ]
    )

    images = []
    for lineno, text in enumerate(lines[1:], start=2):
        if not text.strip():
            continue
        raw = parse(lineno, text)
        for key in ("image_id", "detections", "keypoints", "gt_pairs"):
            if key not in raw:
                raise ManifestError(f"{path}:{lineno}: missing field {key!r}")
        try:
            detections = [
                Detection(
                    BBox(*d["box"]),
                    int(d["class"]),
                    float(d["score"]),
                    bool(d["is_human"]),
                )
                for d in raw["detections"]
            ]
            keypoints = [PoseKeypoints(k) for k in raw["keypoints"]]
        except (ValueError, KeyError, TypeError) as exc:
            raise ManifestError(f"{path}:{lineno}: {exc}") from None
        gt_pairs = [
            GtIndexPair(int(g["h"]), int(g["o"]), frozenset(int(c) for c in g["hois"]))
            for g in raw["gt_pairs"]
        ]
        features = {
            int(i): np.asarray(v, dtype=np.float64)
            for i, v in raw.get("features", {}).items()
        }
        rec = ImageRecord(raw["image_id"], detections, keypoints, gt_pairs, features)
        try:
            _validate_record(rec, table, f"image {rec.image_id!r}")
        except ManifestError as exc:
            raise ManifestError(f"{path}:{lineno}: {exc}") from None
        images.append(rec)
    return DatasetManifest(header["dataset"], table, images)
