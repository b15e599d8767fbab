from .aux import AuxDistribution, phi, phi_inv
from .base import Moments, ProcessModel
from .empirical import EmpiricalModel
from .factory import make_model
from .parametric import ParametricModel

__all__ = [
    "AuxDistribution", "EmpiricalModel", "Moments", "ParametricModel", "ProcessModel",
    "make_model", "phi", "phi_inv",
]
