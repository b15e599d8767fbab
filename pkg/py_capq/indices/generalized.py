"""
The generalized yield index family C_py, C_pyk and C_pTk.

C_py compares the process yield with the desired yield p0 of a natural
tolerance region; C_pyk and C_pTk split the comparison at the median or at
the target, one side per tail allowance.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional

from pydantic import BaseModel

from ..distributions.base import ProcessModel
from ..exceptions import DomainError
from ..schema import DesiredRegion, SpecLimits
from .yield_based import yield_summary

logger = logging.getLogger(__name__)


class SplitIndex(BaseModel):
    value: float
    upper: float
    lower: float


@dataclass(frozen=True)
class GeneralizedInputs:
    spec: SpecLimits
    desired: DesiredRegion
    model: ProcessModel
    target: Optional[float] = None
    # Evaluate the uniform CDF linearly beyond its support (F may leave [0, 1]).
    linear_extension: bool = False

    @property
    def cdf(self) -> Callable[[float], float]:
        if self.linear_extension:
            return self.model.extended_cdf
        return self.model.cdf

    def left_cdf(self, x: float) -> float:
        """P(X < x): the inclusive lower endpoint convention used for yields."""
        if self.linear_extension:
            return float(self.model.extended_cdf(x))
        return float(self.model.cdf(x)) - self.model.mass(x)

    def process_yield(self) -> float:
        if self.linear_extension:
            return float(self.cdf(self.spec.upper)) - float(self.cdf(self.spec.lower))
        return yield_summary(self.model, self.spec).p

    def p0(self) -> float:
        cdf = self.cdf if self.linear_extension else None
        return self.desired.p0(self.model, cdf)

    def tails(self):
        cdf = self.cdf if self.linear_extension else None
        return self.desired.tails(self.model, cdf)


def c_py(inputs: GeneralizedInputs) -> float:
    """C_py = p / p0."""
    p0 = inputs.p0()
    if not p0 > 0:
        raise DomainError(f"desired yield p0 must be positive, got {p0}")
    return inputs.process_yield() / p0


def _split(inputs: GeneralizedInputs, centre: float) -> SplitIndex:
    alpha1, alpha2 = inputs.tails()
    if not (alpha1 < 0.5 and alpha2 < 0.5):
        raise DomainError(f"split indices need alpha1, alpha2 < 0.5, got ({alpha1}, {alpha2})")
    f_centre = float(inputs.cdf(centre))
    upper = (float(inputs.cdf(inputs.spec.upper)) - f_centre) / (0.5 - alpha2)
    lower = (f_centre - inputs.left_cdf(inputs.spec.lower)) / (0.5 - alpha1)
    return SplitIndex(value=min(upper, lower), upper=upper, lower=lower)


def c_pyk(inputs: GeneralizedInputs) -> SplitIndex:
    """C_pyk, split at the process median μ_e."""
    median = inputs.model.median()
    logger.debug("c_pyk split at median %g", median)
    return _split(inputs, median)


def c_pTk(inputs: GeneralizedInputs) -> SplitIndex:
    """C_pTk, split at the target T (the explicit input target, else the spec target)."""
    target = inputs.target if inputs.target is not None else inputs.spec.target
    if target is None:
        raise DomainError("c_pTk needs a target T")
    return _split(inputs, target)


def c_pyk_symmetric_form(inputs: GeneralizedInputs) -> float:
    """
    Closed form of C_pyk for equal tail allowances α1 = α2 = α/2:

        ((F(U) - F(L))/2 - |F(M~) - 1/2|) / (1/2 (1 - α)),  F(M~) = (F(L) + F(U))/2

    It agrees with c_pyk whenever F(μ_e) = 1/2, i.e. for continuous models.
    """
    alpha1, alpha2 = inputs.tails()
    if abs(alpha1 - alpha2) > 1e-15:
        raise DomainError(f"symmetric form needs alpha1 == alpha2, got ({alpha1}, {alpha2})")
    alpha = alpha1 + alpha2
    f_lower = inputs.left_cdf(inputs.spec.lower)
    f_upper = float(inputs.cdf(inputs.spec.upper))
    f_mid = (f_lower + f_upper) / 2
    return ((f_upper - f_lower) / 2 - abs(f_mid - 0.5)) / (0.5 * (1 - alpha))
