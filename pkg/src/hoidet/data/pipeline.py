"""Per-image pair preparation shared by training and inference.

A PreparedImage owns the candidate edges, their derived labels, and the
precomputed feature vectors; map stacks are rasterized on demand when a
batch is assembled (they are cheap to rebuild and expensive to keep).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..pairing import assign_labels, exhaustive_pairing
from ..raster import make_map_stack
from ..types import HoiCategoryTable, PairCandidate
from .features import FeatureBatch, FeatureProviderSpec, detection_vector, split_human_vector
from .manifest import DatasetManifest, ImageRecord


@dataclass
class PreparedImage:
    record: ImageRecord
    pairs: list[PairCandidate]
    labels: np.ndarray  # (N,) bool
    multihot: np.ndarray  # (N, K) in table order
    f_h: np.ndarray  # (N, dim)
    f_o: np.ndarray  # (N, dim)
    f_p: np.ndarray  # (N, N_PARTS, dim)

    def __len__(self) -> int:
        return len(self.pairs)

    def feature_batch(self, indices: list[int] | np.ndarray) -> FeatureBatch:
        kp_by_det = self.record.keypoints_by_detection()
        maps = np.stack(
            [
                make_map_stack(self.pairs[i], kp_by_det[self.pairs[i].h_index]).channels
                for i in indices
            ]
        )
        idx = np.asarray(indices)
        return FeatureBatch(self.f_h[idx], self.f_o[idx], self.f_p[idx], maps)


def prepare_image(
    record: ImageRecord,
    table: HoiCategoryTable,
    provider: FeatureProviderSpec,
    human_thresh: float = 0.6,
    object_thresh: float = 0.4,
    gamma: float = 0.6,
    iou_min: float = 0.5,
) -> PreparedImage:
    kp_by_det = record.keypoints_by_detection()
    graph = exhaustive_pairing(
        record.detections, human_thresh, object_thresh, keypoints=kp_by_det, gamma=gamma
    )
    assign_labels(graph, record.gt_box_pairs(), table, iou_min)

    pairs = graph.edges
    n = len(pairs)
    dim = provider.dim
    cat_index = {c.id: i for i, c in enumerate(table.categories)}
    labels = np.zeros(n, dtype=bool)
    multihot = np.zeros((n, len(table)))
    f_h = np.zeros((n, dim))
    f_o = np.zeros((n, dim))
    f_p = np.zeros((n, 10, dim))
    for i, pair in enumerate(pairs):
        labels[i] = bool(pair.gt_interactive)
        for cat in pair.gt_hois or ():
            multihot[i, cat_index[cat]] = 1.0
        h_vec = detection_vector(provider, record, pair.h_index, is_human=True)
        inst, parts = split_human_vector(h_vec, dim)
        parts = parts.copy()
        if pair.part_boxes is not None:
            for pb in pair.part_boxes:
                if not pb.valid:
                    parts[pb.part_id] = 0.0
        f_h[i] = inst
        f_p[i] = parts
        f_o[i] = detection_vector(provider, record, pair.o_index, is_human=False)
    return PreparedImage(record, pairs, labels, multihot, f_h, f_o, f_p)


def prepare_manifest(
    manifest: DatasetManifest,
    provider: FeatureProviderSpec,
    human_thresh: float = 0.6,
    object_thresh: float = 0.4,
    gamma: float = 0.6,
) -> list[PreparedImage]:
    return [
        prepare_image(rec, manifest.table, provider, human_thresh, object_thresh, gamma)
        for rec in manifest.images
    ]
