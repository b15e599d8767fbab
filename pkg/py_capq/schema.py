import math
from enum import Enum
from typing import Any, Callable, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator

from .constants import QualityConstants as Q


class Family(str, Enum):
    NORMAL = "normal"
    LOGNORMAL = "lognormal"
    WEIBULL = "weibull"
    GAMMA = "gamma"
    UNIFORM = "uniform"
    EXPONENTIAL = "exponential"
    POISSON = "poisson"
    BINOMIAL = "binomial"
    EMPIRICAL = "empirical"


# Parameter names of each parametric family, in constructor order.
FAMILY_PARAMETERS: Dict[Family, Tuple[str, ...]] = {
    Family.NORMAL: ("mean", "sd"),
    Family.LOGNORMAL: ("logmean", "logsd"),
    Family.WEIBULL: ("shape", "scale"),
    Family.GAMMA: ("shape", "scale"),
    Family.UNIFORM: ("a", "b"),
    Family.EXPONENTIAL: ("rate",),
    Family.POISSON: ("lam",),
    Family.BINOMIAL: ("trials", "prob"),
}


# --- Univariate specification ---

class SpecLimits(BaseModel):
    """Engineering specification: lower/upper limits and an optional target."""
    model_config = ConfigDict(populate_by_name=True)

    lower: float = Field(..., alias="L", description="Lower specification limit.")
    upper: float = Field(..., alias="U", description="Upper specification limit.")
    target: Optional[float] = Field(None, alias="T", description="Target value; defaults to the midpoint.")

    @model_validator(mode="after")
    def _check_order(self) -> "SpecLimits":
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ValueError("specification limits must be finite")
        if not self.lower < self.upper:
            raise ValueError("lower limit L must be strictly less than upper limit U")
        if self.target is not None and not (self.lower <= self.target <= self.upper):
            raise ValueError("target T must lie within [L, U]")
        return self

    @property
    def midpoint(self) -> float:
        return (self.lower + self.upper) / 2

    @property
    def half_width(self) -> float:
        return (self.upper - self.lower) / 2

    @property
    def resolved_target(self) -> float:
        return self.midpoint if self.target is None else self.target


class ProcessMoments(BaseModel):
    mu: float = Field(..., description="Process mean.")
    sigma: float = Field(..., description="Process standard deviation.")

    @field_validator("sigma")
    @classmethod
    def _positive_sigma(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("sigma must be strictly positive")
        return v


class DesiredRegion(BaseModel):
    """
    Natural (desired) tolerance region, given either as explicit limits
    (LDL, UDL) or as tail proportions (alpha1, alpha2). When neither is given
    the conventional tails of 0.00135 each are applied.
    """
    model_config = ConfigDict(populate_by_name=True)

    ldl: Optional[float] = Field(None, alias="LDL")
    udl: Optional[float] = Field(None, alias="UDL")
    alpha1: Optional[float] = Field(None, ge=0, lt=1)
    alpha2: Optional[float] = Field(None, ge=0, lt=1)
    _tails_defaulted: bool = PrivateAttr(default=False)

    @model_validator(mode="after")
    def _check_form(self) -> "DesiredRegion":
        explicit = (self.ldl is not None, self.udl is not None)
        tails = (self.alpha1 is not None, self.alpha2 is not None)
        if any(explicit) and any(tails):
            raise ValueError("give either LDL/UDL or alpha1/alpha2, not both")
        if any(explicit):
            if not all(explicit):
                raise ValueError("LDL and UDL must be given together")
            if not self.ldl < self.udl:
                raise ValueError("LDL must be strictly less than UDL")
            return self
        if not any(tails):
            self.alpha1 = Q.DESIRED_TAIL
            self.alpha2 = Q.DESIRED_TAIL
            self._tails_defaulted = True
        elif not all(tails):
            raise ValueError("alpha1 and alpha2 must be given together")
        if self.alpha1 + self.alpha2 >= 1:
            raise ValueError("alpha1 + alpha2 must be less than 1")
        return self

    @property
    def is_explicit(self) -> bool:
        return self.ldl is not None

    @property
    def applied_defaults(self) -> List[str]:
        """Fields in effect whose values were filled in rather than given."""
        return ["alpha1", "alpha2"] if self._tails_defaulted else []

    def tails(self, model, cdf: Optional[Callable[[float], float]] = None) -> Tuple[float, float]:
        """(alpha1, alpha2) = (P(X < LDL), P(X > UDL)) under the model."""
        if not self.is_explicit:
            return self.alpha1, self.alpha2
        if cdf is not None:
            return float(cdf(self.ldl)), 1.0 - float(cdf(self.udl))
        return float(model.cdf(self.ldl)) - model.mass(self.ldl), float(model.sf(self.udl))

    def p0(self, model, cdf: Optional[Callable[[float], float]] = None) -> float:
        """Desired yield p0 = F(UDL) - F(LDL) = 1 - alpha1 - alpha2."""
        a1, a2 = self.tails(model, cdf)
        return 1.0 - a1 - a2


class Sample(BaseModel):
    """Observed values of one quality characteristic."""
    values: List[float] = Field(..., min_length=2)
    source: str = "inline"

    @field_validator("values")
    @classmethod
    def _finite_values(cls, v: List[float]) -> List[float]:
        if not all(math.isfinite(x) for x in v):
            raise ValueError("sample values must be finite")
        return v

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @property
    def n(self) -> int:
        return len(self.values)


# --- Multivariate specification ---

class MvSpec(BaseModel):
    """Hyperrectangular specification region with optional target vector."""
    model_config = ConfigDict(populate_by_name=True)

    lower: List[float] = Field(..., alias="L")
    upper: List[float] = Field(..., alias="U")
    target: Optional[List[float]] = Field(None, alias="T")

    @model_validator(mode="after")
    def _check_vectors(self) -> "MvSpec":
        if len(self.lower) == 0 or len(self.lower) != len(self.upper):
            raise ValueError("L and U must be non-empty vectors of equal length")
        if any(not lo < hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("every axis needs L_i < U_i")
        if self.target is not None and len(self.target) != len(self.lower):
            raise ValueError("T must have the same length as L and U")
        return self

    @property
    def dimension(self) -> int:
        return len(self.lower)

    @property
    def midpoints(self) -> np.ndarray:
        return (np.asarray(self.lower) + np.asarray(self.upper)) / 2

    @property
    def half_widths(self) -> np.ndarray:
        return (np.asarray(self.upper) - np.asarray(self.lower)) / 2

    @property
    def resolved_target(self) -> np.ndarray:
        return self.midpoints if self.target is None else np.asarray(self.target, dtype=float)


class StructuralFunction(BaseModel):
    """Scalarising function N(x) inducing the conditional ordering N(x1) <= N(x2)."""
    kind: Literal["weighted_sum", "min", "max"] = "max"
    weights: Optional[List[float]] = Field(None, description="Weights a_i for weighted_sum; all ones when omitted.")

    @field_validator("weights")
    @classmethod
    def _finite_weights(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        if v is not None:
            if len(v) == 0:
                raise ValueError("weights must not be empty")
            if not all(math.isfinite(w) for w in v):
                raise ValueError("weights must be finite")
        return v

    @property
    def label(self) -> str:
        if self.kind == "weighted_sum":
            w = "1" if self.weights is None else ",".join(f"{x:g}" for x in self.weights)
            return f"weighted_sum({w})"
        return self.kind


# --- Analysis configuration (JSON) ---

class ModelDirective(BaseModel):
    """
    How the univariate process model is obtained:
    fixed (family + parameters), fit (one family by ML), auto (best KS among
    configured families) or empirical (step ECDF of the data).
    """
    mode: Literal["fixed", "fit", "auto", "empirical"] = "auto"
    family: Optional[Family] = None
    params: Dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="before")
    @classmethod
    def _parse_string(cls, data: Any) -> Any:
        if isinstance(data, str):
            text = data.strip()
            if text == "fit:auto":
                return {"mode": "auto"}
            if text == "empirical":
                return {"mode": "empirical"}
            if text.startswith("fit:"):
                return {"mode": "fit", "family": text[4:]}
            return {"mode": "fit", "family": text}
        if isinstance(data, dict) and "mode" not in data and "family" in data:
            data = dict(data)
            data["mode"] = "fixed" if data.get("params") else "fit"
        return data

    @model_validator(mode="after")
    def _check_family(self) -> "ModelDirective":
        if self.mode in ("fixed", "fit") and self.family is None:
            raise ValueError(f"model directive '{self.mode}' needs a family")
        if self.mode == "fixed" and self.family != Family.EMPIRICAL:
            expected = FAMILY_PARAMETERS[self.family]
            if set(self.params) != set(expected):
                raise ValueError(f"{self.family.value} takes parameters {list(expected)}, got {sorted(self.params)}")
        if self.family == Family.EMPIRICAL and self.mode != "empirical":
            self.mode = "empirical"
            self.family = None
        return self

    @property
    def label(self) -> str:
        if self.mode == "auto":
            return "fit:auto"
        if self.mode == "empirical":
            return "empirical"
        if self.mode == "fit":
            return f"fit:{self.family.value}"
        return self.family.value


class IndexRequest(BaseModel):
    name: str
    params: Dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="before")
    @classmethod
    def _parse_string(cls, data: Any) -> Any:
        if isinstance(data, str):
            return {"name": data}
        return data


class MonteCarloBlock(BaseModel):
    n: int = Field(200_000, ge=1)
    seed: Optional[int] = Field(None, ge=0)


class BootstrapBlock(BaseModel):
    replicates: int = Field(1000, ge=1)
    level: float = Field(0.90, gt=0, lt=1)
    seed: Optional[int] = Field(None, ge=0)
    indices: Optional[List[str]] = Field(None, description="Indices that get intervals; all requested when omitted.")


class MvNormalBlock(BaseModel):
    mean: List[float]
    cov: List[List[float]]


class MultivariateBlock(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    lower: List[float] = Field(..., alias="L")
    upper: List[float] = Field(..., alias="U")
    target: Optional[List[float]] = Field(None, alias="T")
    structural_functions: List[StructuralFunction] = Field(default_factory=lambda: [StructuralFunction(kind="max")])
    families: List[Family] = Field(default_factory=lambda: [Family.NORMAL, Family.WEIBULL, Family.LOGNORMAL])
    desired: DesiredRegion = Field(default_factory=DesiredRegion)
    ldl_vector: Optional[List[float]] = None
    udl_vector: Optional[List[float]] = None
    p_nc: float = Field(Q.NONCONFORMING, gt=0, lt=1)
    model: Optional[MvNormalBlock] = None
    indices: List[IndexRequest] = Field(default_factory=lambda: [IndexRequest(name="c_py_M"),
                                                                 IndexRequest(name="c_pyk_M"),
                                                                 IndexRequest(name="c_pTk_M")])

    def mv_spec(self) -> MvSpec:
        return MvSpec(L=self.lower, U=self.upper, T=self.target)


class AnalysisConfig(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: Literal[1] = 1
    spec: Optional[SpecLimits] = None
    desired: DesiredRegion = Field(default_factory=DesiredRegion)
    model: ModelDirective = Field(default_factory=ModelDirective)
    interpolation: Literal["step", "linear"] = "step"
    indices: List[IndexRequest] = Field(default_factory=list)
    multivariate: Optional[MultivariateBlock] = None
    monte_carlo: MonteCarloBlock = Field(default_factory=MonteCarloBlock)
    bootstrap: Optional[BootstrapBlock] = None

    @model_validator(mode="before")
    @classmethod
    def _lift_top_level_limits(cls, data: Any) -> Any:
        if isinstance(data, dict) and "spec" not in data and ("L" in data or "U" in data):
            data = dict(data)
            data["spec"] = {k: data.pop(k) for k in ("L", "U", "T") if k in data}
        return data

    @model_validator(mode="after")
    def _check_consistency(self) -> "AnalysisConfig":
        from .indices.registry import registry

        unknown = [r.name for r in self.indices if r.name not in registry.univariate_names()]
        if self.multivariate is not None:
            unknown += [r.name for r in self.multivariate.indices if r.name not in registry.multivariate_names()]
        if unknown:
            raise ValueError(f"unknown index name(s) {unknown}; valid indices: {registry.names()}")
        if self.indices and self.spec is None:
            raise ValueError("univariate indices need specification limits L and U")
        if self.bootstrap is not None and self.bootstrap.seed is None:
            raise ValueError("bootstrap requires a seed")
        if self.multivariate is not None and self.monte_carlo.seed is None:
            raise ValueError("multivariate analysis requires monte_carlo.seed")
        return self


# --- Application settings (settings.toml) ---

class MonteCarloSettings(BaseModel):
    n: int = Field(200_000, ge=1)
    partitions: int = Field(16, ge=1)
    workers: int = Field(1, ge=1)


class BootstrapSettings(BaseModel):
    replicates: int = Field(1000, ge=1)
    level: float = Field(0.90, gt=0, lt=1)
    max_undefined_fraction: float = Field(0.10, ge=0, le=1)


class NumericSettings(BaseModel):
    bisection_max_steps: int = Field(200, ge=1)
    bisection_tolerance: float = Field(1e-10, gt=0)


class FittingSettings(BaseModel):
    min_pipeline_n: int = Field(30, ge=2)
    significance: float = Field(0.05, gt=0, lt=1)
    families: List[Family] = Field(default_factory=lambda: [Family.NORMAL, Family.LOGNORMAL,
                                                            Family.WEIBULL, Family.GAMMA])


class ReportSettings(BaseModel):
    format: Literal["json", "text"] = "json"


class LoggingSettings(BaseModel):
    level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = "WARNING"


class AppSettings(BaseModel):
    monte_carlo: MonteCarloSettings = Field(default_factory=MonteCarloSettings)
    bootstrap: BootstrapSettings = Field(default_factory=BootstrapSettings)
    numerics: NumericSettings = Field(default_factory=NumericSettings)
    fitting: FittingSettings = Field(default_factory=FittingSettings)
    report: ReportSettings = Field(default_factory=ReportSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)
