from typing import Dict, Optional

import numpy.typing as npt

from ..exceptions import DomainError
from ..schema import Family
from .base import ProcessModel
from .empirical import EmpiricalModel
from .parametric import ParametricModel


def make_model(family, params: Optional[Dict[str, float]] = None,
               values: Optional[npt.ArrayLike] = None, interpolation: str = "step") -> ProcessModel:
    """Build a ProcessModel from a family name and its parameters (or a sample for 'empirical')."""
    try:
        fam = Family(family)
    except ValueError:
        raise DomainError(f"unknown family '{family}'; known: {[f.value for f in Family]}")
    if fam == Family.EMPIRICAL:
        if values is None:
            raise DomainError("the empirical family needs observations")
        return EmpiricalModel(values, interpolation=interpolation)
    return ParametricModel(fam, **(params or {}))
