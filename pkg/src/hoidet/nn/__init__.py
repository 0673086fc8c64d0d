from .autograd import Var, backward
from .gradcheck import grad_check
from .optim import CosineRestarts, SgdMomentum
from .params import ParamStore, he_init

__all__ = [
    "Var",
    "backward",
    "grad_check",
    "CosineRestarts",
    "SgdMomentum",
    "ParamStore",
    "he_init",
]
