"""Pluggable per-pair feature provision.

The provider stands in for a frozen backbone: it hands each pair its
human/object instance vectors, ten part vectors, and the rasterized map
stack. ``file`` mode reads vectors embedded in the manifest (a human
vector is 11 blocks of ``dim``: instance block then one block per part);
``synthetic`` mode derives vectors deterministically from the provider
seed for manifests without embedded features. Invalid parts contribute
zero vectors in either mode.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from ..raster import MAP_SIZE, MapStack, make_map_stack
from ..types import N_PARTS, PairCandidate, PoseKeypoints
from .manifest import ImageRecord


@dataclass(frozen=True)
class FeatureProviderSpec:
    mode: str = "file"  # "file" or "synthetic"
    dim: int = 16
    seed: int = 0

    def __post_init__(self) -> None:
        if self.mode not in ("file", "synthetic"):
            raise ValueError(f"unknown feature provider mode {self.mode!r}")
        if self.dim < 1:
            raise ValueError("feature dim must be >= 1")

    @property
    def human_len(self) -> int:
        return (1 + N_PARTS) * self.dim


@dataclass
class FeatureBundle:
    """Numeric inputs to both networks for one pair."""

    f_human: np.ndarray  # (dim,)
    f_object: np.ndarray  # (dim,)
    f_parts: np.ndarray  # (N_PARTS, dim); zero rows for invalid parts
    maps: MapStack


@dataclass
class FeatureBatch:
    f_h: np.ndarray  # (B, dim)
    f_o: np.ndarray  # (B, dim)
    f_p: np.ndarray  # (B, N_PARTS, dim)
    maps: np.ndarray  # (B, 3, MAP_SIZE, MAP_SIZE)

    def __len__(self) -> int:
        return self.f_h.shape[0]


def collate(bundles: list[FeatureBundle]) -> FeatureBatch:
    return FeatureBatch(
        f_h=np.stack([b.f_human for b in bundles]),
        f_o=np.stack([b.f_object for b in bundles]),
        f_p=np.stack([b.f_parts for b in bundles]),
        maps=np.stack([b.maps.channels for b in bundles]),
    )


def _synthetic_vector(spec: FeatureProviderSpec, image_id: str, det_index: int, length: int) -> np.ndarray:
    key = (spec.seed, zlib.crc32(image_id.encode("utf-8")), det_index)
    return np.random.default_rng(key).normal(size=length)


def detection_vector(
    spec: FeatureProviderSpec, record: ImageRecord, det_index: int, is_human: bool
) -> np.ndarray:
    length = spec.human_len if is_human else spec.dim
    if spec.mode == "file":
        if det_index not in record.features:
            raise KeyError(
                f"image {record.image_id!r}: no embedded features for detection {det_index}"
            )
        vec = record.features[det_index]
        if vec.shape != (length,):
            raise ValueError(
                f"image {record.image_id!r}: detection {det_index} feature length "
                f"{vec.shape} != ({length},)"
            )
        return vec
    return _synthetic_vector(spec, record.image_id, det_index, length)


def split_human_vector(vec: np.ndarray, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Instance block plus the ten part-indexed blocks."""
    inst = vec[:dim]
    parts = vec[dim:].reshape(N_PARTS, dim)
    return inst, parts


def build_bundle(
    spec: FeatureProviderSpec,
    record: ImageRecord,
    pair: PairCandidate,
    kp: PoseKeypoints,
) -> FeatureBundle:
    h_vec = detection_vector(spec, record, pair.h_index, is_human=True)
    o_vec = detection_vector(spec, record, pair.o_index, is_human=False)
    inst, parts = split_human_vector(h_vec, spec.dim)
    parts = parts.copy()
    if pair.part_boxes is not None:
        for pb in pair.part_boxes:
            if not pb.valid:
                parts[pb.part_id] = 0.0
    return FeatureBundle(
        f_human=inst,
        f_object=o_vec,
        f_parts=parts,
        maps=make_map_stack(pair, kp),
    )


def provide_features(
    manifest_images: list[ImageRecord],
    spec: FeatureProviderSpec,
    pairs_per_image: list[list[PairCandidate]],
) -> list[list[FeatureBundle]]:
    """Bundles for pre-built candidate lists, one list per image."""
    out = []
    for record, pairs in zip(manifest_images, pairs_per_image):
        kp_by_det = record.keypoints_by_detection()
        out.append([build_bundle(spec, record, p, kp_by_det[p.h_index]) for p in pairs])
    return out
