"""
Maximum-likelihood fitting of the supported families, with a
Kolmogorov-Smirnov distance attached to every fit.

The KS statistic is a ranking score: parameters are estimated from the same
data, so no p-value is claimed for it.
"""
import logging
import math
import warnings
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel
from scipy import stats

from ..distributions.base import ProcessModel
from ..distributions.empirical import EmpiricalModel
from ..distributions.parametric import ParametricModel
from ..exceptions import DomainError
from ..schema import Family, Sample

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FitResult:
    model: ProcessModel
    ks_statistic: float
    method: str


class FitRecord(BaseModel):
    """One row of a goodness-of-fit table; failed fits carry the reason instead of a score."""
    family: str
    params: Dict[str, float] = {}
    ks_statistic: Optional[float] = None
    method: Optional[str] = None
    adequate: bool = False
    error: Optional[str] = None


def _values(sample) -> npt.NDArray:
    if isinstance(sample, Sample):
        return sample.array
    values = np.asarray(sample, dtype=float).ravel()
    if values.size < 2:
        raise DomainError(f"fitting needs at least 2 observations, got {values.size}")
    if not np.all(np.isfinite(values)):
        raise DomainError("fitting requires finite observations")
    return values


def _require_spread(x: npt.NDArray, family: str) -> None:
    if np.ptp(x) == 0:
        raise DomainError(f"constant sample: zero spread, cannot fit {family}")


def _require_positive(x: npt.NDArray, family: str) -> None:
    if np.any(x <= 0):
        raise DomainError(f"{family} needs strictly positive data, minimum is {x.min():g}")


def _require_counts(x: npt.NDArray, family: str) -> None:
    if np.any(x < 0) or np.any(x != np.round(x)):
        raise DomainError(f"{family} needs non-negative integer data")


def _shape_scale(dist, x: npt.NDArray, family: str):
    """MLE with the location pinned at zero, falling back to the method of moments."""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            shape, _, scale = dist.fit(x, floc=0)
        if math.isfinite(shape) and math.isfinite(scale) and shape > 0 and scale > 0:
            return {"shape": float(shape), "scale": float(scale)}, "mle"
    except (RuntimeError, ValueError, FloatingPointError) as e:
        logger.debug("%s MLE failed (%s), trying method of moments", family, e)
    shape, _, scale = dist.fit(x, floc=0, method="MM")
    return {"shape": float(shape), "scale": float(scale)}, "moments"


def _fit_params(x: npt.NDArray, family: Family, trials: Optional[int]):
    name = family.value
    if family == Family.NORMAL:
        _require_spread(x, name)
        return {"mean": float(x.mean()), "sd": float(x.std())}, "mle"
    if family == Family.LOGNORMAL:
        _require_positive(x, name)
        _require_spread(x, name)
        logs = np.log(x)
        return {"logmean": float(logs.mean()), "logsd": float(logs.std())}, "mle"
    if family == Family.WEIBULL:
        _require_positive(x, name)
        _require_spread(x, name)
        return _shape_scale(stats.weibull_min, x, name)
    if family == Family.GAMMA:
        _require_positive(x, name)
        _require_spread(x, name)
        return _shape_scale(stats.gamma, x, name)
    if family == Family.UNIFORM:
        _require_spread(x, name)
        return {"a": float(x.min()), "b": float(x.max())}, "mle"
    if family == Family.EXPONENTIAL:
        if np.any(x < 0):
            raise DomainError(f"exponential needs non-negative data, minimum is {x.min():g}")
        if x.mean() == 0:
            raise DomainError("exponential fit needs a positive mean")
        return {"rate": float(1.0 / x.mean())}, "mle"
    if family == Family.POISSON:
        _require_counts(x, name)
        if x.mean() == 0:
            raise DomainError("poisson fit needs a positive mean")
        return {"lam": float(x.mean())}, "mle"
    if family == Family.BINOMIAL:
        _require_counts(x, name)
        n_trials = int(x.max()) if trials is None else int(trials)
        if n_trials < 1 or x.max() > n_trials:
            raise DomainError(f"binomial trials must be >= 1 and cover the data, got {n_trials}")
        return {"trials": float(n_trials), "prob": float(x.mean() / n_trials)}, "mle"
    raise DomainError(f"no fitting rule for family '{name}'")


def ks_statistic(x: npt.NDArray, model: ProcessModel) -> float:
    return float(stats.kstest(x, model.cdf).statistic)


def ks_critical_value(n: int, significance: float) -> float:
    """Upper (1 - significance) point of the exact one-sample KS distribution."""
    return float(stats.kstwo.ppf(1.0 - significance, n))


def fit_model(sample, family, trials: Optional[int] = None) -> FitResult:
    """
    Fits `family` to the sample by maximum likelihood (closed forms where
    they exist, scipy's optimiser otherwise) and scores it with the KS
    distance to the fitted CDF.
    """
    x = _values(sample)
    fam = Family(family)
    if fam == Family.EMPIRICAL:
        model: ProcessModel = EmpiricalModel(x)
        method = "empirical"
    else:
        params, method = _fit_params(x, fam, trials)
        model = ParametricModel(fam, **params)
    score = ks_statistic(x, model)
    logger.debug("fitted %r by %s, KS=%.5f", model, method, score)
    return FitResult(model=model, ks_statistic=score, method=method)


def fit_candidates(sample, families: Iterable, significance: float) -> List[FitRecord]:
    """Fits every candidate family; rows are in candidate order, failures recorded with their reason."""
    x = _values(sample)
    critical = ks_critical_value(x.size, significance)
    records: List[FitRecord] = []
    for family in families:
        name = Family(family).value
        try:
            fit = fit_model(x, family)
        except DomainError as e:
            records.append(FitRecord(family=name, error=str(e)))
            continue
        records.append(FitRecord(family=name, params=fit.model.params, ks_statistic=fit.ks_statistic,
                                 method=fit.method, adequate=fit.ks_statistic <= critical))
    return records


def best_fit(records: List[FitRecord]) -> Optional[FitRecord]:
    """Lowest KS distance among successful fits; ties keep candidate order."""
    scored = [r for r in records if r.ks_statistic is not None]
    if not scored:
        return None
    return min(scored, key=lambda r: r.ks_statistic)
