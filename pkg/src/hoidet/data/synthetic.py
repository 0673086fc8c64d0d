"""Synthetic scene generator with a known interactiveness rule.

A pair is interactive iff the box centers are closer than ``tau`` human
box diagonals AND the human's engagement value for the part group
designated by the object class is positive. Distance is relative to the
human's size so the union-normalized spatial maps carry the cue (the
64x64 frame erases absolute scale). Engagement values are sampled away
from zero by ``engagement_margin`` so the rule stays separable under
feature noise. Per-detection feature vectors encode the rule: the object
vector carries its class one-hot and geometry, each human part block
carries that group's engagement (scaled by ``engagement_scale``) plus
N(0, sigma) noise, and the maps carry geometry.

Two vocabulary variants ("A", "B") share the physical rule (same object
classes, same class-to-part-group map) but use disjoint category tables,
which is what makes binary interactiveness transfer while HOI categories
do not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..types import (
    N_KEYPOINTS,
    PART_GROUPS,
    PATTERN_COLUMNS,
    BBox,
    Detection,
    HoiCategory,
    HoiCategoryTable,
    PoseKeypoints,
)
from .manifest import DatasetManifest, GtIndexPair, ImageRecord

N_PART_GROUPS = len(PATTERN_COLUMNS)

# part id -> part group index, aligned with types.PART_GROUPS
PART_GROUPS_FLAT = [0] * 10
for _gi, _name in enumerate(PATTERN_COLUMNS):
    for _pid in PART_GROUPS[_name]:
        PART_GROUPS_FLAT[_pid] = _gi

# Normalized joint layout of an upright person inside its box
# (x fraction of width from center, y fraction of height from top).
_SKELETON_LAYOUT = (
    (0.00, 0.06),  # nose
    (-0.06, 0.045),
    (0.06, 0.045),
    (-0.11, 0.06),
    (0.11, 0.06),
    (-0.28, 0.20),  # shoulders
    (0.28, 0.20),
    (-0.36, 0.36),
    (0.36, 0.36),
    (-0.40, 0.50),  # wrists
    (0.40, 0.50),
    (-0.16, 0.52),  # hips
    (0.16, 0.52),
    (-0.17, 0.74),
    (0.17, 0.74),
    (-0.18, 0.96),  # ankles
    (0.18, 0.96),
)


@dataclass(frozen=True)
class SyntheticSpec:
    n_train_images: int = 400
    n_test_images: int = 100
    humans_per_image: tuple[int, int] = (2, 4)
    objects_per_image: tuple[int, int] = (3, 6)
    n_object_classes: int = 6
    feature_dim: int = 16
    noise_sigma: float = 0.3
    tau: float = 0.75  # in units of the human box diagonal
    tau_dead_zone: float = 0.12  # no pair lands within +-12% of the distance boundary
    engagement_margin: float = 0.4
    engagement_scale: float = 2.5  # feature amplitude of the engagement cue
    class_onehot_scale: float = 2.0
    image_size: tuple[int, int] = (640, 480)
    human_score_range: tuple[float, float] = (0.92, 1.0)
    object_score_range: tuple[float, float] = (0.90, 1.0)
    joint_drop_prob: float = 0.02
    flagged_gt_prob: float = 0.5

    def __post_init__(self) -> None:
        if self.feature_dim < 4 + self.n_object_classes:
            raise ValueError("feature_dim too small for geometry + class one-hot")
        if self.n_object_classes < 1:
            raise ValueError("need at least one object class")


def class_part_group(class_id: int) -> int:
    """Part group engaged by interactions with this object class. Shared
    across vocabulary variants; this is the transferable half of the rule."""
    return (class_id - 1) % N_PART_GROUPS


def make_category_table(variant: str, n_object_classes: int) -> HoiCategoryTable:
    """Disjoint per-variant vocabulary: one interactive category and one
    flagged no-interaction category per object class."""
    id_base = {"A": 0, "B": 100}.get(variant)
    if id_base is None:
        raise ValueError(f"unknown variant {variant!r}")
    cats = []
    for c in range(1, n_object_classes + 1):
        group = PATTERN_COLUMNS[class_part_group(c)]
        cats.append(
            HoiCategory(id_base + 2 * (c - 1), f"{variant.lower()}_use_{group}", c, False)
        )
        cats.append(
            HoiCategory(id_base + 2 * (c - 1) + 1, f"{variant.lower()}_no_interaction", c, True)
        )
    return HoiCategoryTable(cats)


@dataclass
class SceneHuman:
    box: BBox
    score: float
    pose: PoseKeypoints
    engagement: np.ndarray  # (N_PART_GROUPS,), each component away from 0


@dataclass
class SceneObject:
    box: BBox
    score: float
    class_id: int


@dataclass
class Scene:
    image_id: str
    humans: list[SceneHuman]
    objects: list[SceneObject]

    def close(self, h: int, o: int, spec: SyntheticSpec) -> bool:
        human, obj = self.humans[h], self.objects[o]
        hx, hy = human.box.center
        ox, oy = obj.box.center
        diag = math.hypot(human.box.width, human.box.height)
        return math.hypot(hx - ox, hy - oy) < spec.tau * diag

    def interactive(self, h: int, o: int, spec: SyntheticSpec) -> bool:
        """The generating rule, usable as an independent oracle."""
        if not self.close(h, o, spec):
            return False
        return self.humans[h].engagement[class_part_group(self.objects[o].class_id)] > 0.0


def _sample_box(rng, img_w, img_h, w_range, h_range) -> BBox:
    w = rng.uniform(*w_range)
    h = rng.uniform(*h_range)
    x1 = rng.uniform(0.0, img_w - w)
    y1 = rng.uniform(0.0, img_h - h)
    return BBox(x1, y1, x1 + w, y1 + h)


def _sample_pose(rng, box: BBox, spec: SyntheticSpec) -> PoseKeypoints:
    cx = 0.5 * (box.x1 + box.x2)
    pts = np.zeros((N_KEYPOINTS, 3))
    for j, (fx, fy) in enumerate(_SKELETON_LAYOUT):
        jx = cx + fx * box.width + rng.normal(0.0, 0.015 * box.width)
        jy = box.y1 + fy * box.height + rng.normal(0.0, 0.01 * box.height)
        conf = rng.uniform(0.0, 0.04) if rng.uniform() < spec.joint_drop_prob else rng.uniform(0.55, 1.0)
        pts[j] = (jx, jy, conf)
    return PoseKeypoints(pts)


def _sample_engagement(rng, spec: SyntheticSpec) -> np.ndarray:
    mag = rng.uniform(spec.engagement_margin, 1.0, size=N_PART_GROUPS)
    sign = np.where(rng.uniform(size=N_PART_GROUPS) < 0.5, -1.0, 1.0)
    return mag * sign


def sample_scenes(spec: SyntheticSpec, seed: int, n_images: int, id_prefix: str) -> list[Scene]:
    rng = np.random.default_rng(seed)
    img_w, img_h = spec.image_size
    scenes = []
    for i in range(n_images):
        humans = []
        for _ in range(int(rng.integers(spec.humans_per_image[0], spec.humans_per_image[1] + 1))):
            box = _sample_box(rng, img_w, img_h, (60, 120), (140, 240))
            humans.append(
                SceneHuman(
                    box=box,
                    score=float(rng.uniform(*spec.human_score_range)),
                    pose=_sample_pose(rng, box, spec),
                    engagement=_sample_engagement(rng, spec),
                )
            )
        objects = []
        for _ in range(int(rng.integers(spec.objects_per_image[0], spec.objects_per_image[1] + 1))):
            box = _sample_object_box(rng, humans, spec)
            objects.append(
                SceneObject(
                    box=box,
                    score=float(rng.uniform(*spec.object_score_range)),
                    class_id=int(rng.integers(1, spec.n_object_classes + 1)),
                )
            )
        scenes.append(Scene(f"{id_prefix}{i:05d}", humans, objects))
    return scenes


def _sample_object_box(rng, humans: list[SceneHuman], spec: SyntheticSpec) -> BBox:
    """Object boxes stay clear of every human's distance decision boundary
    so closeness is unambiguous (the generator is meant to be separable)."""
    img_w, img_h = spec.image_size
    lo, hi = (1.0 - spec.tau_dead_zone) * spec.tau, (1.0 + spec.tau_dead_zone) * spec.tau
    for _ in range(50):
        box = _sample_box(rng, img_w, img_h, (30, 110), (30, 110))
        cx, cy = box.center
        ok = True
        for h in humans:
            hx, hy = h.box.center
            diag = math.hypot(h.box.width, h.box.height)
            if lo * diag <= math.hypot(hx - cx, hy - cy) <= hi * diag:
                ok = False
                break
        if ok:
            return box
    return box


def _human_feature(rng, human: SceneHuman, spec: SyntheticSpec, img_w, img_h) -> np.ndarray:
    """Instance block followed by ten part blocks of ``feature_dim`` each."""
    dim = spec.feature_dim
    vec = rng.normal(0.0, spec.noise_sigma, size=(1 + len(PART_GROUPS_FLAT)) * dim)
    cx, cy = human.box.center
    vec[0] += cx / img_w
    vec[1] += cy / img_h
    vec[2] += human.box.width / img_w
    vec[3] += human.box.height / img_h
    for part_id, group in enumerate(PART_GROUPS_FLAT):
        vec[(1 + part_id) * dim] += spec.engagement_scale * human.engagement[group]
    return vec


def _object_feature(rng, obj: SceneObject, spec: SyntheticSpec, img_w, img_h) -> np.ndarray:
    vec = rng.normal(0.0, spec.noise_sigma, size=spec.feature_dim)
    cx, cy = obj.box.center
    vec[0] += cx / img_w
    vec[1] += cy / img_h
    vec[2] += obj.box.width / img_w
    vec[3] += obj.box.height / img_h
    vec[4 + obj.class_id - 1] += spec.class_onehot_scale
    return vec


def scenes_to_manifest(
    scenes: list[Scene],
    spec: SyntheticSpec,
    table: HoiCategoryTable,
    name: str,
    feature_seed: int,
) -> DatasetManifest:
    rng = np.random.default_rng(feature_seed)
    img_w, img_h = spec.image_size
    cat_for_class = {c.object_class: c.id for c in table if not c.no_interaction}
    flagged_for_class = {c.object_class: c.id for c in table if c.no_interaction}

    images = []
    for scene in scenes:
        detections = [
            Detection(h.box, 0, h.score, is_human=True) for h in scene.humans
        ] + [Detection(o.box, o.class_id, o.score, is_human=False) for o in scene.objects]
        keypoints = [h.pose for h in scene.humans]
        n_h = len(scene.humans)

        gt_pairs = []
        for hi, human in enumerate(scene.humans):
            for oi, obj in enumerate(scene.objects):
                if scene.interactive(hi, oi, spec):
                    gt_pairs.append(
                        GtIndexPair(hi, n_h + oi, frozenset({cat_for_class[obj.class_id]}))
                    )
                elif scene.close(hi, oi, spec) and rng.uniform() < spec.flagged_gt_prob:
                    gt_pairs.append(
                        GtIndexPair(hi, n_h + oi, frozenset({flagged_for_class[obj.class_id]}))
                    )

        features = {}
        for hi, human in enumerate(scene.humans):
            features[hi] = _human_feature(rng, human, spec, img_w, img_h)
        for oi, obj in enumerate(scene.objects):
            features[n_h + oi] = _object_feature(rng, obj, spec, img_w, img_h)

        images.append(ImageRecord(scene.image_id, detections, keypoints, gt_pairs, features))
    return DatasetManifest(name, table, images)


def synthetic_generate(
    spec: SyntheticSpec, seed: int, variant: str = "A", split: str = "train"
) -> DatasetManifest:
    """One manifest for a (variant, split) cell, deterministic in seed."""
    n = spec.n_train_images if split == "train" else spec.n_test_images
    # fixed offsets keep every (variant, split) stream independent
    offset = {"A": 0, "B": 1000}[variant] + {"train": 0, "test": 500}[split]
    scenes = sample_scenes(spec, seed + offset, n, id_prefix=f"{variant}_{split}_")
    table = make_category_table(variant, spec.n_object_classes)
    return scenes_to_manifest(scenes, spec, table, f"{variant}_{split}", feature_seed=seed + offset + 7)


def generate_dataset_pair(spec: SyntheticSpec, seed: int) -> dict[str, DatasetManifest]:
    """The four default manifests: A/B x train/test."""
    return {
        f"{variant}_{split}": synthetic_generate(spec, seed, variant, split)
        for variant in ("A", "B")
        for split in ("train", "test")
    }
