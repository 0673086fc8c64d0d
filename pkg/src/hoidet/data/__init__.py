from .features import FeatureBatch, FeatureBundle, FeatureProviderSpec, collate, provide_features
from .manifest import (
    DatasetManifest,
    GtIndexPair,
    ImageRecord,
    ManifestError,
    load_manifest,
    save_manifest,
)
from .pipeline import PreparedImage, prepare_image, prepare_manifest
from .synthetic import SyntheticSpec, generate_dataset_pair, make_category_table, synthetic_generate

__all__ = [
    "FeatureBatch",
    "FeatureBundle",
    "FeatureProviderSpec",
    "collate",
    "provide_features",
    "DatasetManifest",
    "GtIndexPair",
    "ImageRecord",
    "ManifestError",
    "load_manifest",
    "save_manifest",
    "PreparedImage",
    "prepare_image",
    "prepare_manifest",
    "SyntheticSpec",
    "generate_dataset_pair",
    "make_category_table",
    "synthetic_generate",
]
