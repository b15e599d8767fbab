import math
from dataclasses import dataclass
from typing import Callable, Dict, Literal, Tuple

import numpy as np
import numpy.typing as npt
from scipy import stats

from ..exceptions import DomainError
from ..schema import FAMILY_PARAMETERS, Family
from .base import Moments, ProcessModel, as_output


def _positive(params: Dict[str, float], *names: str) -> None:
    for name in names:
        value = params[name]
        if not (math.isfinite(value) and value > 0):
            raise DomainError(f"parameter '{name}' must be finite and strictly positive, got {value}")


def _finite(params: Dict[str, float], *names: str) -> None:
    for name in names:
        if not math.isfinite(params[name]):
            raise DomainError(f"parameter '{name}' must be finite, got {params[name]}")


def _normal(p):
    _finite(p, "mean")
    _positive(p, "sd")
    return stats.norm(loc=p["mean"], scale=p["sd"])


def _lognormal(p):
    _finite(p, "logmean")
    _positive(p, "logsd")
    return stats.lognorm(s=p["logsd"], scale=math.exp(p["logmean"]))


def _weibull(p):
    _positive(p, "shape", "scale")
    return stats.weibull_min(c=p["shape"], scale=p["scale"])


def _gamma(p):
    _positive(p, "shape", "scale")
    return stats.gamma(a=p["shape"], scale=p["scale"])


def _uniform(p):
    _finite(p, "a", "b")
    if not p["a"] < p["b"]:
        raise DomainError(f"uniform requires a < b, got a={p['a']}, b={p['b']}")
    return stats.uniform(loc=p["a"], scale=p["b"] - p["a"])


def _exponential(p):
    _positive(p, "rate")
    return stats.expon(scale=1.0 / p["rate"])


def _poisson(p):
    _positive(p, "lam")
    return stats.poisson(mu=p["lam"])


def _binomial(p):
    trials, prob = p["trials"], p["prob"]
    if not (trials >= 1 and float(trials).is_integer()):
        raise DomainError(f"binomial requires an integer number of trials >= 1, got {trials}")
    if not 0 <= prob <= 1:
        raise DomainError(f"binomial requires 0 <= prob <= 1, got {prob}")
    return stats.binom(n=int(trials), p=prob)


@dataclass(frozen=True)
class FamilySpec:
    param_names: Tuple[str, ...]
    build: Callable[[Dict[str, float]], object]
    kind: Literal["continuous", "discrete"] = "continuous"


FAMILIES: Dict[Family, FamilySpec] = {
    Family.NORMAL: FamilySpec(FAMILY_PARAMETERS[Family.NORMAL], _normal),
    Family.LOGNORMAL: FamilySpec(FAMILY_PARAMETERS[Family.LOGNORMAL], _lognormal),
    Family.WEIBULL: FamilySpec(FAMILY_PARAMETERS[Family.WEIBULL], _weibull),
    Family.GAMMA: FamilySpec(FAMILY_PARAMETERS[Family.GAMMA], _gamma),
    Family.UNIFORM: FamilySpec(FAMILY_PARAMETERS[Family.UNIFORM], _uniform),
    Family.EXPONENTIAL: FamilySpec(FAMILY_PARAMETERS[Family.EXPONENTIAL], _exponential),
    Family.POISSON: FamilySpec(FAMILY_PARAMETERS[Family.POISSON], _poisson, "discrete"),
    Family.BINOMIAL: FamilySpec(FAMILY_PARAMETERS[Family.BINOMIAL], _binomial, "discrete"),
}


class ParametricModel(ProcessModel):
    """A named parametric family backed by a frozen scipy.stats distribution."""

    def __init__(self, family, **params: float):
        try:
            self._family = Family(family)
            spec = FAMILIES[self._family]
        except (ValueError, KeyError):
            raise DomainError(f"unknown parametric family '{family}'; known: {[f.value for f in FAMILIES]}")
        missing = set(spec.param_names) - set(params)
        extra = set(params) - set(spec.param_names)
        if missing or extra:
            raise DomainError(f"{self._family.value} takes parameters {list(spec.param_names)}, "
                              f"got {sorted(params)}")
        self._params = {name: float(params[name]) for name in spec.param_names}
        self._dist = spec.build(self._params)
        self.family = self._family.value
        self.kind = spec.kind

    @property
    def params(self) -> Dict[str, float]:
        return dict(self._params)

    @property
    def support(self) -> Tuple[float, float]:
        lo, hi = self._dist.support()
        return float(lo), float(hi)

    def cdf(self, x: npt.ArrayLike):
        return as_output(x, np.clip(self._dist.cdf(x), 0.0, 1.0))

    def sf(self, x: npt.ArrayLike):
        return as_output(x, np.clip(self._dist.sf(x), 0.0, 1.0))

    def density(self, x: npt.ArrayLike):
        if self.kind == "discrete":
            return as_output(x, self._dist.pmf(x))
        return as_output(x, self._dist.pdf(x))

    def extended_cdf(self, x: npt.ArrayLike):
        """Uniform CDF continued linearly beyond (a, b); other families refuse."""
        if self._family != Family.UNIFORM:
            return super().extended_cdf(x)
        a, b = self._params["a"], self._params["b"]
        return as_output(x, (np.asarray(x, dtype=float) - a) / (b - a))

    def _quantile(self, u: npt.NDArray) -> npt.NDArray:
        return self._dist.ppf(u)

    def moments(self) -> Moments:
        return Moments(mean=float(self._dist.mean()), sd=float(self._dist.std()), median=self.median())

    def _draw(self, n: int, rng: np.random.Generator) -> npt.NDArray:
        return self._dist.rvs(size=n, random_state=rng)
