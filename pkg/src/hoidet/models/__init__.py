from .classifier import ClassifierOut, HoiClassifierNet, late_fusion, share_trunks
from .discriminator import DiscriminatorLoss, DiscriminatorOut, InteractivenessNet
from .streams import NetConfig

__all__ = [
    "ClassifierOut",
    "HoiClassifierNet",
    "late_fusion",
    "share_trunks",
    "DiscriminatorLoss",
    "DiscriminatorOut",
    "InteractivenessNet",
    "NetConfig",
]
