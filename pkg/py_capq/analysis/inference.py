"""
Estimation from data: process model selection, plug-in index estimates,
percentile bootstrap intervals and the Monte Carlo yield oracle.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel

from ..constants import NumericDefaults as N
from ..distributions.base import ProcessModel
from ..distributions.empirical import EmpiricalModel
from ..distributions.factory import make_model
from ..exceptions import CapabilityError, ConfigError, DomainError, NumericError
from ..indices.registry import IndexDefinition, UnivariateContext, registry
from ..indices.report import IndexEntry, IntervalEstimate
from ..schema import AnalysisConfig, Family, IndexRequest, ModelDirective, ProcessMoments, Sample, SpecLimits
from ..utils.config import settings
from .fitting import FitRecord, best_fit, fit_candidates, fit_model
from .parallel_analyzer import child_rng, draw_partitioned, partition_sizes, run_partitioned

logger = logging.getLogger(__name__)


@dataclass
class ModelChoice:
    """Outcome of a model directive on a sample: how to rebuild the model on resamples."""
    mode: str
    family: Optional[str]
    model: ProcessModel
    fits: List[FitRecord] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)


class MonteCarloYield(BaseModel):
    estimate: float
    standard_error: float
    draws: int
    seed: int


def empirical_model(sample: Union[Sample, npt.ArrayLike], interpolation: str = "step") -> EmpiricalModel:
    values = sample.array if isinstance(sample, Sample) else sample
    return EmpiricalModel(values, interpolation=interpolation)


def choose_model(directive: ModelDirective, values: Optional[npt.NDArray], interpolation: str = "step",
                 families: Optional[Sequence[Family]] = None, significance: Optional[float] = None) -> ModelChoice:
    if directive.mode == "fixed":
        return ModelChoice("fixed", directive.family.value, make_model(directive.family, directive.params))
    if values is None:
        raise ConfigError(f"model directive '{directive.label}' needs measurement data (pass --data or give a fixed model)")
    if directive.mode == "empirical":
        return ModelChoice("empirical", Family.EMPIRICAL.value, empirical_model(values, interpolation))
    if directive.mode == "fit":
        return ModelChoice("fit", directive.family.value, fit_model(values, directive.family).model)

    families = settings.fitting.families if families is None else families
    significance = settings.fitting.significance if significance is None else significance
    fits = fit_candidates(values, families, significance)
    best = best_fit(fits)
    if best is None or not best.adequate:
        message = f"no adequate model among {[f.family for f in fits]} at significance {significance}; using the empirical model"
        logger.warning(message)
        return ModelChoice("empirical", Family.EMPIRICAL.value, empirical_model(values, interpolation), fits, [message])
    logger.debug("fit:auto selected %s (KS=%.5f)", best.family, best.ks_statistic)
    return ModelChoice("fit", best.family, fit_model(values, best.family).model, fits)


def _rebuild(choice: ModelChoice, values: npt.NDArray, interpolation: str) -> ProcessModel:
    if choice.mode == "fixed":
        return choice.model
    if choice.mode == "empirical":
        return empirical_model(values, interpolation)
    return fit_model(values, choice.family).model


def sample_moments(values: npt.NDArray) -> Optional[ProcessMoments]:
    """Sample mean and n-1 standard deviation, or None for a constant sample."""
    sd = float(np.std(values, ddof=1))
    if not sd > 0:
        return None
    return ProcessMoments(mu=float(np.mean(values)), sigma=sd)


def check_tail_support(definition: IndexDefinition, params, n: int) -> None:
    """Tail quantiles estimated from n observations must be interior: n >= ceil(1 / tail)."""
    tails = definition.tail_probabilities(params)
    if not tails:
        return
    needed = math.ceil(1.0 / min(tails))
    if n < needed:
        raise DomainError(f"{definition.name} with tail {min(tails):g} needs at least {needed} observations, got {n}")


def _as_request(index_request) -> IndexRequest:
    if isinstance(index_request, IndexRequest):
        return index_request
    return IndexRequest.model_validate(index_request)


def _univariate(name: str) -> IndexDefinition:
    definition = registry.get(name)
    if definition.multivariate:
        raise DomainError(f"{name} is a multivariate index")
    return definition


def _plug_in(values: npt.NDArray, definition: IndexDefinition, params, spec: SpecLimits, config: AnalysisConfig,
             choice: Optional[ModelChoice]):
    check_tail_support(definition, params, values.size)
    model = None
    if definition.basis != "moments":
        model = choice.model if choice is not None else None
    ctx = UnivariateContext(spec=spec, desired=config.desired, model=model, moments=sample_moments(values))
    return definition.compute(ctx, params)


def estimate_index(sample: Sample, index_request, config: AnalysisConfig,
                   choice: Optional[ModelChoice] = None) -> IndexEntry:
    """
    Plug-in estimate of one index. Moment indices use the sample mean and
    the n-1 standard deviation; the other indices use the model the config's
    directive selects on this sample (pass `choice` to reuse a selection).
    """
    request = _as_request(index_request)
    definition = _univariate(request.name)
    params = definition.resolve_params(request.params)
    if config.spec is None:
        raise DomainError("index estimation needs specification limits")
    values = sample.array
    if definition.basis != "moments" and choice is None:
        choice = choose_model(config.model, values, config.interpolation)
    result = _plug_in(values, definition, params, config.spec, config, choice)
    notes = list(result.notes) + [f"estimated from n={sample.n} observations"]
    if choice is not None and definition.basis != "moments":
        notes.append(f"model: {choice.family} ({choice.mode})")
    return IndexEntry.from_value(definition.name, result.value, result.components, params, notes)


def _bootstrap_chunk(values: npt.NDArray, name: str, params, config: AnalysisConfig,
                     choice: Optional[ModelChoice], seed: int, start: int, stop: int) -> npt.NDArray:
    definition = registry.get(name)
    out = np.full(stop - start, np.nan)
    n = values.size
    for offset, b in enumerate(range(start, stop)):
        rng = child_rng(seed, b)
        resample = values[rng.integers(0, n, size=n)]
        try:
            rebuilt = None if choice is None else ModelChoice(choice.mode, choice.family,
                                                              _rebuild(choice, resample, config.interpolation))
            out[offset] = _plug_in(resample, definition, params, config.spec, config, rebuilt).value
        except CapabilityError as e:
            logger.debug("replicate %d undefined: %s", b, e)
    return out


def bootstrap_ci(sample: Sample, index_request, config: AnalysisConfig, replicates: int, level: float, seed: int,
                 choice: Optional[ModelChoice] = None) -> IntervalEstimate:
    """
    Percentile bootstrap interval. Replicate b resamples with its own
    generator derived from (seed, b), so intervals do not depend on the
    partitioning or the number of workers.
    """
    if replicates < N.MIN_BOOTSTRAP_REPLICATES:
        raise DomainError(f"bootstrap needs at least {N.MIN_BOOTSTRAP_REPLICATES} replicates, got {replicates}")
    if not 0 < level < 1:
        raise DomainError(f"confidence level must lie in (0, 1), got {level}")
    request = _as_request(index_request)
    definition = _univariate(request.name)
    params = definition.resolve_params(request.params)
    values = sample.array
    if definition.basis == "moments":
        choice = None
    elif choice is None:
        choice = choose_model(config.model, values, config.interpolation)

    point = _plug_in(values, definition, params, config.spec, config, choice).value
    if not math.isfinite(point):
        raise NumericError(f"{definition.name}: point estimate is not finite ({point})")

    mc = settings.monte_carlo
    bounds, start = [], 0
    for size in partition_sizes(replicates, mc.partitions):
        bounds.append((start, start + size))
        start += size
    tasks = [(values, definition.name, params, config, choice, seed, lo, hi) for lo, hi in bounds]
    estimates = np.concatenate(run_partitioned(_bootstrap_chunk, tasks, mc.workers))

    defined = estimates[np.isfinite(estimates)]
    undefined = replicates - defined.size
    limit = settings.bootstrap.max_undefined_fraction
    if undefined > limit * replicates:
        raise NumericError(f"{definition.name}: {undefined} of {replicates} bootstrap replicates undefined "
                           f"(limit {limit:.0%})")
    alpha = 1.0 - level
    lower, upper = np.quantile(defined, [alpha / 2, 1 - alpha / 2])
    outside = not (lower <= point <= upper)
    if outside:
        logger.warning("%s: point estimate %g outside bootstrap interval [%g, %g]", definition.name, point, lower, upper)
    return IntervalEstimate(point=point, lower=float(lower), upper=float(upper), level=level, replicates=replicates,
                            seed=seed, undefined_replicates=int(undefined), point_outside=outside)


def mc_yield(model: ProcessModel, spec: SpecLimits, n: int, seed: int) -> MonteCarloYield:
    """Share of n seeded draws inside [L, U], with its binomial standard error."""
    if n < N.MIN_ORACLE_DRAWS:
        raise DomainError(f"Monte Carlo yield needs at least {N.MIN_ORACLE_DRAWS} draws, got {n}")
    mc = settings.monte_carlo
    draws = draw_partitioned(model, n, seed, partitions=mc.partitions, workers=mc.workers)
    p_hat = float(np.mean((draws >= spec.lower) & (draws <= spec.upper)))
    return MonteCarloYield(estimate=p_hat, standard_error=math.sqrt(p_hat * (1 - p_hat) / n), draws=n, seed=seed)
