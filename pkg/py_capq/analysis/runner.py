import logging
from typing import Any, Dict, List, Optional

import numpy as np
import numpy.typing as npt

from .. import __version__
from ..exceptions import ConfigError, DataError, DomainError, NumericError
from ..indices import yield_based
from ..indices.multivariate import MultivariateNormalModel
from ..indices.registry import MultivariateContext, UnivariateContext, registry
from ..indices.report import IndexEntry, IndexReport
from ..schema import AnalysisConfig, ProcessMoments, Sample
from ..utils.config import defaults_applied
from .inference import ModelChoice, bootstrap_ci, choose_model, estimate_index

logger = logging.getLogger(__name__)


def _with_index(name: str, error: Exception) -> Exception:
    """Same error type, message prefixed with the index being computed."""
    if isinstance(error, (DomainError, NumericError, ConfigError)):
        return type(error)(f"{name}: {error}")
    return error


def _seeds(config: AnalysisConfig) -> Dict[str, int]:
    seeds = {}
    if config.monte_carlo.seed is not None:
        seeds["monte_carlo"] = config.monte_carlo.seed
    if config.bootstrap is not None and config.bootstrap.seed is not None:
        seeds["bootstrap"] = config.bootstrap.seed
    return seeds


def _new_report(config: AnalysisConfig, command: str, data_source: Optional[str], n: Optional[int]) -> IndexReport:
    inputs: Dict[str, Any] = {"config": config.model_dump(mode="json", exclude_none=True)}
    if data_source is not None:
        inputs["data"] = {"source": data_source, "n": n}
    return IndexReport(version=__version__, command=command, inputs=inputs, seeds=_seeds(config),
                       defaults_applied=defaults_applied(config))


def _model_moments(choice: ModelChoice) -> Optional[ProcessMoments]:
    m = choice.model.moments()
    if not m.sd > 0:
        return None
    return ProcessMoments(mu=m.mean, sigma=m.sd)


def _univariate_entries(config: AnalysisConfig, values: Optional[npt.NDArray], source: str,
                        report: IndexReport) -> List[IndexEntry]:
    needs_model = values is None or any(registry.get(r.name).basis != "moments" for r in config.indices)
    choice = choose_model(config.model, values, config.interpolation) if needs_model else None
    if choice is not None:
        report.model = {**choice.model.describe(), "directive": config.model.label, "mode": choice.mode}
        report.warnings.extend(choice.warnings)
        if choice.fits:
            report.details["fits"] = [f.model_dump() for f in choice.fits]
        if config.spec is not None:
            report.details["yield"] = yield_based.yield_summary(choice.model, config.spec).model_dump()

    sample = Sample(values=values.tolist(), source=source) if values is not None else None
    entries = []
    for request in config.indices:
        definition = registry.get(request.name)
        try:
            if sample is not None:
                entry = estimate_index(sample, request, config, choice)
            else:
                params = definition.resolve_params(request.params)
                ctx = UnivariateContext(spec=config.spec, desired=config.desired, model=choice.model,
                                        moments=_model_moments(choice))
                result = definition.compute(ctx, params)
                entry = IndexEntry.from_value(definition.name, result.value, result.components, params, result.notes)
        except (DomainError, NumericError, ConfigError) as e:
            raise _with_index(request.name, e) from e
        entries.append(entry)

    if config.bootstrap is not None:
        if sample is None:
            report.warnings.append("bootstrap skipped: intervals need measurement data")
        else:
            wanted = config.bootstrap.indices or [r.name for r in config.indices]
            for entry, request in zip(entries, config.indices):
                if request.name not in wanted or entry.value is None:
                    continue
                try:
                    entry.interval = bootstrap_ci(sample, request, config, config.bootstrap.replicates,
                                                  config.bootstrap.level, config.bootstrap.seed, choice)
                except (DomainError, NumericError) as e:
                    raise _with_index(request.name, e) from e
    return entries


def _multivariate_entries(config: AnalysisConfig, values: Optional[npt.NDArray],
                          report: IndexReport) -> List[IndexEntry]:
    block = config.multivariate
    if block is None:
        raise ConfigError("mv-analyze needs a 'multivariate' block in the configuration")
    if values is not None:
        source = values
    elif block.model is not None:
        source = MultivariateNormalModel(block.model.mean, block.model.cov)
    else:
        raise ConfigError("multivariate analysis needs measurement data or a 'model' block")
    ctx = MultivariateContext(mv=block.mv_spec(), block=block, source=source, mc_n=config.monte_carlo.n,
                              seed=config.monte_carlo.seed)
    if isinstance(source, MultivariateNormalModel):
        report.model = source.describe()

    entries = []
    for request in block.indices:
        definition = registry.get(request.name)
        params = definition.resolve_params(request.params)
        try:
            result = definition.compute(ctx, params)
        except (DomainError, NumericError, ConfigError) as e:
            raise _with_index(request.name, e) from e
        entries.append(IndexEntry.from_value(definition.name, result.value, result.components, params, result.notes))

    uses_generalized = any(r.name in ("c_py_M", "c_pyk_M", "c_pTk_M") for r in block.indices)
    if uses_generalized and ctx.pipeline is not None:
        pipeline = ctx.pipeline
        report.details["pipeline"] = {
            "fits": [f.model_dump() for f in pipeline.fits],
            "winner": {"structural_function": pipeline.winner_structural_function, "family": pipeline.winner_family},
            "adequate": pipeline.adequate,
        }
        report.model = pipeline.result.model
        report.warnings.extend(pipeline.warnings)
    return entries


def run_analysis(config: AnalysisConfig, data: Optional[npt.ArrayLike] = None, multivariate: bool = False,
                 data_source: str = "inline") -> IndexReport:
    """
    Computes every index the configuration requests, on measurement data
    when given and on the configured model otherwise. Reports are
    deterministic given (config, data, seeds).
    """
    values = None if data is None else np.asarray(data, dtype=float)
    n = None if values is None else int(values.shape[0])
    report = _new_report(config, "mv-analyze" if multivariate else "analyze",
                         data_source if values is not None else None, n)
    if multivariate:
        if values is not None and values.ndim != 2:
            raise DataError("multivariate data must have one column per characteristic")
        report.entries = _multivariate_entries(config, values, report)
    else:
        if values is not None:
            values = values.reshape(values.shape[0], -1)
            if values.shape[1] != 1:
                raise DataError(f"univariate analysis expects one column, found {values.shape[1]}")
            values = values[:, 0]
        if config.indices and config.spec is None:
            raise ConfigError("univariate indices need specification limits L and U")
        report.entries = _univariate_entries(config, values, data_source, report)
    logger.debug("computed %d index entries", len(report.entries))
    return report
