"""
Yield and quantile based indices for non-normal and discrete processes:
Clements' C'_p, Mukherjee's I, the Yeh-Bhattacharya ratio and C_f,
Borges-Ho's C and Perakis-Xekalaki's C_pc.

Infinite values (no nonconforming mass on the relevant side) are returned
as math.inf and flagged by the report layer.
"""
import math

from pydantic import BaseModel
from scipy import special

from ..constants import QualityConstants as Q
from ..distributions.base import ProcessModel
from ..exceptions import DomainError
from ..schema import SpecLimits


class YieldSummary(BaseModel):
    p: float
    p_nc: float
    lower_nc: float
    upper_nc: float


def _probability(name: str, value: float, open_low: bool = True, open_high: bool = True) -> None:
    low_ok = value > 0 if open_low else value >= 0
    high_ok = value < 1 if open_high else value <= 1
    if not (low_ok and high_ok):
        raise DomainError(f"{name} must lie in {'(' if open_low else '['}0, 1{')' if open_high else ']'}, got {value}")


def yield_summary(model: ProcessModel, spec: SpecLimits) -> YieldSummary:
    """
    Process yield P(L <= X <= U) and the tail fractions outside it.

    Endpoints are inclusive, which only matters for discrete models where
    the point mass at L counts as conforming.
    """
    at_lower = model.mass(spec.lower)
    lower_nc = max(float(model.cdf(spec.lower)) - at_lower, 0.0)
    upper_nc = float(model.sf(spec.upper))
    p = float(model.cdf(spec.upper)) - float(model.cdf(spec.lower)) + at_lower
    p = min(max(p, 0.0), 1.0)
    return YieldSummary(p=p, p_nc=lower_nc + upper_nc, lower_nc=lower_nc, upper_nc=upper_nc)


def _spread_ratio(spec: SpecLimits, low: float, high: float) -> float:
    spread = high - low
    if math.isinf(spread):
        return 0.0
    if not spread > 0:
        raise DomainError(f"degenerate quantile spread: Q_high={high} equals Q_low={low}")
    return (spec.upper - spec.lower) / spread


def clements_cp(spec: SpecLimits, model: ProcessModel, a: float = Q.NORMAL_TAIL) -> float:
    """C'_p = (U - L) / (Q(1 - a) - Q(a))."""
    if not 0 < a < 0.5:
        raise DomainError(f"tail proportion a must lie in (0, 0.5), got {a}")
    return _spread_ratio(spec, float(model.quantile(a)), float(model.quantile(1 - a)))


def mukherjee_i(spec: SpecLimits, model: ProcessModel, alpha1: float, alpha2: float) -> float:
    """I = (U - L) / (Q(1 - α2) - Q(α1)); a zero tail uses the support endpoint."""
    _probability("alpha1", alpha1, open_low=False)
    _probability("alpha2", alpha2, open_low=False)
    if alpha1 + alpha2 >= 1:
        raise DomainError(f"alpha1 + alpha2 must be below 1, got {alpha1 + alpha2}")
    low = model.support[0] if alpha1 == 0 else float(model.quantile(alpha1))
    high = model.support[1] if alpha2 == 0 else float(model.quantile(1 - alpha2))
    return _spread_ratio(spec, low, high)


def yb_ratio(p0_nc: float, model: ProcessModel, spec: SpecLimits) -> float:
    """Expected over actual nonconforming fraction, p0_nc / p_nc."""
    _probability("p0_nc", p0_nc)
    p_nc = yield_summary(model, spec).p_nc
    if p_nc == 0:
        return math.inf
    return p0_nc / p_nc


def yb_cf(alpha0_lower: float, alpha0_upper: float, model: ProcessModel, spec: SpecLimits) -> float:
    """C_f = min(α0_L / α_L, α0_U / α_U); a side without nonconforming mass contributes inf."""
    _probability("alpha0_L", alpha0_lower)
    _probability("alpha0_U", alpha0_upper)
    ys = yield_summary(model, spec)
    lower = math.inf if ys.lower_nc == 0 else alpha0_lower / ys.lower_nc
    upper = math.inf if ys.upper_nc == 0 else alpha0_upper / ys.upper_nc
    return min(lower, upper)


def borges_ho_c(model: ProcessModel, spec: SpecLimits) -> float:
    """C = Φ⁻¹(1 - π/2) / 3 for the nonconforming fraction π."""
    pi = yield_summary(model, spec).p_nc
    if pi == 0:
        return math.inf
    return float(-special.ndtri(pi / 2) / Q.SIGMA_MULTIPLE)


def perakis_cpc(p0: float, model: ProcessModel, spec: SpecLimits) -> float:
    """C_pc = (1 - p0) / (1 - p)."""
    _probability("p0", p0)
    p_nc = yield_summary(model, spec).p_nc
    if p_nc == 0:
        return math.inf
    return (1 - p0) / p_nc
