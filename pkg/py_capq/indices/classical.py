"""
Moment-based capability indices: C_p, C_pk, C_pm, C_pmk, S_pk, the Vännman
C_p(u, v) superstructure and Spiring's C_p^(w).

All functions take a SpecLimits and ProcessMoments pair. A missing target
defaults to the specification midpoint M unless `require_target` is set.
"""
import logging
import math
from typing import Callable

from pydantic import BaseModel, Field
from scipy import special

from ..constants import QualityConstants as Q
from ..exceptions import ConfigError, DomainError
from ..schema import ProcessMoments, SpecLimits

logger = logging.getLogger(__name__)

LossFunction = Callable[[float], float]


class BasicIndices(BaseModel):
    c_p: float
    c_pk: float
    c_pm: float
    c_pmk: float
    c_pu: float = Field(..., description="Upper one-sided component (U - mu) / 3 sigma.")
    c_pl: float = Field(..., description="Lower one-sided component (mu - L) / 3 sigma.")
    k: float = Field(..., description="Off-centre ratio |mu - M| / d.")
    spread_ratio: float = Field(..., description="Share of the specification band taken by the 6 sigma spread, 1 / C_p.")


def _check_sigma(mom: ProcessMoments) -> float:
    # model_construct() bypasses the schema validator
    if not (math.isfinite(mom.sigma) and mom.sigma > 0):
        raise DomainError(f"sigma must be strictly positive, got {mom.sigma}")
    return mom.sigma


def _target(spec: SpecLimits, require_target: bool) -> float:
    if spec.target is None:
        if require_target:
            raise ConfigError("target T is required but was not given")
        logger.debug("target not given, using midpoint M=%g", spec.midpoint)
    return spec.resolved_target


def basic_indices(spec: SpecLimits, mom: ProcessMoments, require_target: bool = False) -> BasicIndices:
    sigma = _check_sigma(mom)
    mu, d, m = mom.mu, spec.half_width, spec.midpoint
    t = _target(spec, require_target)
    s = Q.SIGMA_MULTIPLE
    taguchi_sd = math.sqrt(sigma ** 2 + (mu - t) ** 2)
    c_p = d / (s * sigma)
    return BasicIndices(
        c_p=c_p,
        c_pk=(d - abs(mu - m)) / (s * sigma),
        c_pm=d / (s * taguchi_sd),
        c_pmk=(d - abs(mu - m)) / (s * taguchi_sd),
        c_pu=(spec.upper - mu) / (s * sigma),
        c_pl=(mu - spec.lower) / (s * sigma),
        k=abs(mu - m) / d,
        spread_ratio=1.0 / c_p,
    )


def s_pk(spec: SpecLimits, mom: ProcessMoments) -> float:
    """
    Boyles' yield-based S_pk = Φ⁻¹(½Φ((U-μ)/σ) + ½Φ((μ-L)/σ)) / 3.

    Evaluated through the complementary tails so that capable processes keep
    full precision; returns math.inf when both tails underflow.
    """
    sigma = _check_sigma(mom)
    tail = 0.5 * (special.ndtr(-(spec.upper - mom.mu) / sigma) + special.ndtr(-(mom.mu - spec.lower) / sigma))
    if tail <= 0.0:
        return math.inf
    return float(-special.ndtri(tail) / Q.SIGMA_MULTIPLE)


def vannman(spec: SpecLimits, mom: ProcessMoments, u: float, v: float, require_target: bool = False) -> float:
    """C_p(u, v) = (d - u|μ - M|) / (3√(σ² + v(μ - T)²))."""
    sigma = _check_sigma(mom)
    if u < 0 or v < 0:
        raise DomainError(f"u and v must be non-negative, got u={u}, v={v}")
    t = _target(spec, require_target) if v > 0 else spec.resolved_target
    numerator = spec.half_width - u * abs(mom.mu - spec.midpoint)
    return numerator / (Q.SIGMA_MULTIPLE * math.sqrt(sigma ** 2 + v * (mom.mu - t) ** 2))


def quadratic_loss(w: float) -> LossFunction:
    """g(δ) = w·δ², the loss under which C_p^(w) equals C_p(0, w)."""
    if w < 0:
        raise DomainError(f"loss weight must be non-negative, got {w}")
    return lambda delta: w * delta ** 2


def spiring_cpw(spec: SpecLimits, mom: ProcessMoments, g: LossFunction, require_target: bool = False) -> float:
    """C_p^(w) = C_p / √(1 + g(δ)) with δ = (μ - T)/σ."""
    sigma = _check_sigma(mom)
    t = _target(spec, require_target)
    if g(0.0) != 0:
        raise DomainError(f"loss function must vanish at 0, got g(0)={g(0.0)}")
    penalty = g((mom.mu - t) / sigma)
    if not penalty >= 0:
        raise DomainError(f"loss function must be non-negative, got g(δ)={penalty}")
    c_p = spec.half_width / (Q.SIGMA_MULTIPLE * sigma)
    return c_p / math.sqrt(1.0 + penalty)
