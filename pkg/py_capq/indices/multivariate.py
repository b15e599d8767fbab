"""
Multivariate capability: structural-function ordering, the generalized
indices on the transformed scale, the ellipsoidal volume ratio, Chen's MC_p,
the Shahriari three-component vector and the five-step fitting pipeline.

A data source is either a MultivariateNormalModel or an n x v matrix of
observations.
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel
from scipy import integrate, optimize, special

from ..analysis.fitting import FitRecord, best_fit, fit_candidates, fit_model
from ..analysis.parallel_analyzer import draw_partitioned
from ..constants import NumericDefaults as N
from ..constants import QualityConstants as Q
from ..distributions.aux import AuxDistribution
from ..distributions.base import Moments, ProcessModel, as_output
from ..distributions.empirical import EmpiricalModel
from ..distributions.parametric import ParametricModel
from ..exceptions import DomainError, NumericError
from ..schema import DesiredRegion, Family, MvSpec, SpecLimits, StructuralFunction
from ..utils.config import settings
from .generalized import GeneralizedInputs, SplitIndex, c_py, c_pTk, c_pyk

logger = logging.getLogger(__name__)


class MultivariateNormalModel:
    """Multivariate normal N(μ, Σ); Σ must be symmetric positive definite."""

    def __init__(self, mean: npt.ArrayLike, cov: npt.ArrayLike):
        self.mean = np.atleast_1d(np.asarray(mean, dtype=float))
        self.cov = np.atleast_2d(np.asarray(cov, dtype=float))
        v = self.mean.size
        if self.cov.shape != (v, v):
            raise DomainError(f"covariance must be {v}x{v}, got {self.cov.shape}")
        if not (np.all(np.isfinite(self.mean)) and np.all(np.isfinite(self.cov))):
            raise DomainError("mean and covariance must be finite")
        if np.max(np.abs(self.cov - self.cov.T)) > N.SYMMETRY_TOLERANCE:
            raise DomainError("covariance matrix is not symmetric")
        try:
            self._chol = np.linalg.cholesky(self.cov)
        except np.linalg.LinAlgError as e:
            raise DomainError(f"covariance matrix is not positive definite: {e}") from e

    @property
    def dimension(self) -> int:
        return int(self.mean.size)

    @property
    def independent(self) -> bool:
        return bool(np.all(self.cov == np.diag(np.diag(self.cov))))

    def draw(self, n: int, rng: np.random.Generator) -> npt.NDArray:
        if n < 1:
            raise DomainError(f"sample size must be at least 1, got {n}")
        z = rng.standard_normal((int(n), self.dimension))
        return self.mean + z @ self._chol.T

    def draw_sample(self, n: int, seed: int) -> npt.NDArray:
        return self.draw(n, np.random.default_rng(seed))

    def describe(self):
        return {"family": "multivariate_normal", "mean": self.mean.tolist(), "cov": self.cov.tolist()}

    def __repr__(self) -> str:
        return f"MultivariateNormalModel(v={self.dimension})"


Source = Union[MultivariateNormalModel, npt.NDArray]


# --- Structural functions ---

def _weights(N_fn: StructuralFunction, v: int) -> npt.NDArray:
    if N_fn.weights is None:
        return np.ones(v)
    if len(N_fn.weights) != v:
        raise DomainError(f"{N_fn.label} has {len(N_fn.weights)} weights for {v} columns")
    return np.asarray(N_fn.weights, dtype=float)


def structural_transform(data: npt.ArrayLike, N_fn: StructuralFunction) -> npt.NDArray:
    """Y_j = N(row_j) for every row of an n x v matrix."""
    x = np.asarray(data, dtype=float)
    if x.ndim != 2 or x.shape[1] == 0:
        raise DomainError(f"structural transform needs an n x v matrix, got shape {x.shape}")
    if N_fn.kind == "weighted_sum":
        return x @ _weights(N_fn, x.shape[1])
    if N_fn.kind == "min":
        return x.min(axis=1)
    return x.max(axis=1)


def structural_value(point: Sequence[float], N_fn: StructuralFunction) -> float:
    return float(structural_transform(np.asarray(point, dtype=float)[None, :], N_fn)[0])


class ExtremeOfNormalsModel(ProcessModel):
    """
    Distribution of the max (or min) of independent normal coordinates:
    F_max(y) = Π Φ((y - μ_i)/σ_i), F_min(y) = 1 - Π Φ((μ_i - y)/σ_i).
    """
    kind = "continuous"

    def __init__(self, means: npt.ArrayLike, sds: npt.ArrayLike, extreme: str = "max"):
        self.means = np.asarray(means, dtype=float)
        self.sds = np.asarray(sds, dtype=float)
        if extreme not in ("max", "min"):
            raise DomainError(f"extreme must be 'max' or 'min', got {extreme}")
        if np.any(self.sds <= 0):
            raise DomainError("coordinate standard deviations must be positive")
        self.extreme = extreme
        self.family = f"{extreme}_of_normals"

    @property
    def support(self) -> Tuple[float, float]:
        return -math.inf, math.inf

    @property
    def params(self):
        out = {}
        for i, (m, s) in enumerate(zip(self.means, self.sds)):
            out[f"mean_{i}"], out[f"sd_{i}"] = float(m), float(s)
        return out

    def _z(self, x: npt.ArrayLike) -> npt.NDArray:
        return (np.asarray(x, dtype=float)[..., None] - self.means) / self.sds

    def cdf(self, x: npt.ArrayLike):
        z = self._z(x)
        if self.extreme == "max":
            out = np.exp(special.log_ndtr(z).sum(axis=-1))
        else:
            out = -np.expm1(special.log_ndtr(-z).sum(axis=-1))
        return as_output(x, np.clip(out, 0.0, 1.0))

    def sf(self, x: npt.ArrayLike):
        z = self._z(x)
        if self.extreme == "max":
            out = -np.expm1(special.log_ndtr(z).sum(axis=-1))
        else:
            out = np.exp(special.log_ndtr(-z).sum(axis=-1))
        return as_output(x, np.clip(out, 0.0, 1.0))

    def density(self, x: npt.ArrayLike):
        z = self._z(x)
        pdf = np.exp(-0.5 * z ** 2) / (math.sqrt(2 * math.pi) * self.sds)
        side = special.ndtr(z) if self.extreme == "max" else special.ndtr(-z)
        total = np.zeros(np.shape(z)[:-1])
        for i in range(self.means.size):
            others = np.prod(np.delete(side, i, axis=-1), axis=-1)
            total = total + pdf[..., i] * others
        return as_output(x, total)

    def _bracket(self) -> Tuple[float, float]:
        width = N.QUANTILE_BRACKET_SDS * float(self.sds.max())
        return float(self.means.min()) - width, float(self.means.max()) + width

    def _quantile(self, u: npt.NDArray) -> npt.NDArray:
        lo, hi = self._bracket()
        flat = [optimize.brentq(lambda y, t=t: float(self.cdf(y)) - t, lo, hi, xtol=1e-13, rtol=1e-15)
                for t in np.ravel(u)]
        return np.reshape(flat, np.shape(u))

    def moments(self) -> Moments:
        lo, hi = self._bracket()
        mean = integrate.quad(lambda y: y * float(self.density(y)), lo, hi, limit=200)[0]
        var = integrate.quad(lambda y: (y - mean) ** 2 * float(self.density(y)), lo, hi, limit=200)[0]
        return Moments(mean=mean, sd=math.sqrt(var), median=self.median())

    def _draw(self, n: int, rng: np.random.Generator) -> npt.NDArray:
        x = self.means + rng.standard_normal((n, self.means.size)) * self.sds
        return x.max(axis=1) if self.extreme == "max" else x.min(axis=1)


def structural_model(model: MultivariateNormalModel, N_fn: StructuralFunction) -> Optional[ProcessModel]:
    """Closed-form law of N(X), or None when only Monte Carlo can provide it."""
    if N_fn.kind == "weighted_sum":
        a = _weights(N_fn, model.dimension)
        return ParametricModel(Family.NORMAL, mean=float(a @ model.mean), sd=math.sqrt(float(a @ model.cov @ a)))
    if model.independent:
        return ExtremeOfNormalsModel(model.mean, np.sqrt(np.diag(model.cov)), extreme=N_fn.kind)
    return None


# --- Generalized indices on the transformed scale ---

class MvGeneralizedResult(BaseModel):
    c_py_M: float
    c_pyk_M: SplitIndex
    c_pTk_M: SplitIndex
    standard_error: float
    structural_function: str
    transformed_limits: Tuple[float, float]
    transformed_target: float
    method: str
    model: dict


def _monte_carlo_draws(model: MultivariateNormalModel, mc_n: int, seed: Optional[int]) -> npt.NDArray:
    if seed is None:
        raise DomainError("Monte Carlo evaluation needs a seed")
    if mc_n < N.MIN_MC_DRAWS:
        raise DomainError(f"Monte Carlo size must be at least {N.MIN_MC_DRAWS}, got {mc_n}")
    mc = settings.monte_carlo
    return draw_partitioned(model, mc_n, seed, partitions=mc.partitions, workers=mc.workers)


def _check_dimension(mv: MvSpec, v: int) -> None:
    if v != mv.dimension:
        raise DomainError(f"specification has {mv.dimension} axes, data has {v}")


def mv_generalized(mv: MvSpec, N_fn: StructuralFunction, source: Source, desired: Optional[DesiredRegion] = None,
                   ldl_vector: Optional[Sequence[float]] = None, udl_vector: Optional[Sequence[float]] = None,
                   mc_n: Optional[int] = None, seed: Optional[int] = None,
                   transformed_model: Optional[ProcessModel] = None, n_obs: Optional[int] = None) -> MvGeneralizedResult:
    """
    C_py, C_pyk and C_pTk of the scalar N(X) against [N(L), N(U)].

    The law of N(X) is taken from `transformed_model` when given (the
    five-step pipeline passes its winning fit), else in closed form for a
    normal source where one exists, else from the empirical distribution of
    N applied to the data or to seeded Monte Carlo draws.
    """
    n_lower, n_upper = structural_value(mv.lower, N_fn), structural_value(mv.upper, N_fn)
    if not n_lower < n_upper:
        raise DomainError(f"{N_fn.label} maps the limits to N(L)={n_lower:g} >= N(U)={n_upper:g}")
    n_target = structural_value(mv.resolved_target, N_fn)

    if (ldl_vector is None) != (udl_vector is None):
        raise DomainError("ldl_vector and udl_vector must be given together")
    if ldl_vector is not None:
        desired = DesiredRegion(LDL=structural_value(ldl_vector, N_fn), UDL=structural_value(udl_vector, N_fn))
    desired = desired or DesiredRegion()

    y_model = transformed_model
    method = "fitted"
    if y_model is None:
        if isinstance(source, MultivariateNormalModel):
            _check_dimension(mv, source.dimension)
            y_model = structural_model(source, N_fn)
            method = "closed_form"
            if y_model is None:
                draws = _monte_carlo_draws(source, mc_n or settings.monte_carlo.n, seed)
                y_model, n_obs, method = EmpiricalModel(structural_transform(draws, N_fn)), draws.shape[0], "monte_carlo"
        else:
            data = np.asarray(source, dtype=float)
            _check_dimension(mv, data.shape[1] if data.ndim == 2 else 0)
            y_model, n_obs, method = EmpiricalModel(structural_transform(data, N_fn)), data.shape[0], "empirical"

    inputs = GeneralizedInputs(spec=SpecLimits(L=n_lower, U=n_upper), desired=desired,
                               model=y_model, target=n_target)
    value = c_py(inputs)
    se = 0.0
    if n_obs:
        p = value * inputs.p0()
        se = math.sqrt(max(p * (1 - p), 0.0) / n_obs) / inputs.p0()
    logger.debug("mv_generalized %s via %s: c_py_M=%.6f (se %.2e)", N_fn.label, method, value, se)
    return MvGeneralizedResult(
        c_py_M=value, c_pyk_M=c_pyk(inputs), c_pTk_M=c_pTk(inputs), standard_error=se,
        structural_function=N_fn.label, transformed_limits=(n_lower, n_upper), transformed_target=n_target,
        method=method, model=y_model.describe(),
    )


# --- Ellipsoidal regions ---

def conformance_level(v: int, p_nc: float = Q.NONCONFORMING) -> float:
    """R = χ²_v quantile at 1 - p_nc: the squared radius holding 1 - p_nc of a normal process."""
    if not 0 < p_nc < 1:
        raise DomainError(f"p_nc must lie in (0, 1), got {p_nc}")
    return float(AuxDistribution.chi_square(v).quantile(1.0 - p_nc))


def ellipsoid_volume_ratio(model: MultivariateNormalModel, u_level: float, p_nc: float = Q.NONCONFORMING) -> float:
    """
    Volume of {g(X) <= u_level} over that of {g(X) <= R}, g the Mahalanobis
    form of the model. Ellipsoid volume grows as level^(v/2), so the ratio is
    (u_level / R)^(v/2).
    """
    if not (math.isfinite(u_level) and u_level > 0):
        raise DomainError(f"u_level must be positive and finite, got {u_level}")
    r = conformance_level(model.dimension, p_nc)
    return (u_level / r) ** (model.dimension / 2)


def ellipsoid_volume(cov: npt.ArrayLike, level: float) -> float:
    """Exact volume of {x : x'Σ⁻¹x <= level}: π^(v/2) / Γ(v/2 + 1) · level^(v/2) · √det Σ."""
    sigma = np.atleast_2d(np.asarray(cov, dtype=float))
    v = sigma.shape[0]
    if level <= 0:
        raise DomainError(f"level must be positive, got {level}")
    sign, logdet = np.linalg.slogdet(sigma)
    if sign <= 0:
        raise DomainError("covariance matrix is not positive definite")
    log_vol = (v / 2) * math.log(math.pi) - special.gammaln(v / 2 + 1) + (v / 2) * math.log(level) + logdet / 2
    return math.exp(log_vol)


def ellipsoid_conformance(model: MultivariateNormalModel, level: float) -> float:
    """P[(X - μ)'Σ⁻¹(X - μ) <= level], the χ²_v CDF."""
    return float(AuxDistribution.chi_square(model.dimension).cdf(level))


class VolumeEstimate(BaseModel):
    estimate: float
    standard_error: float
    draws: int


def estimate_ellipsoid_volume(cov: npt.ArrayLike, level: float, n: int, seed: int,
                              box_level: Optional[float] = None) -> VolumeEstimate:
    """
    Hit-or-miss volume of {x'Σ⁻¹x <= level} inside the bounding box of the
    `box_level` ellipsoid (default: the same level). Estimates for several
    levels sharing one box_level and seed use common random points.
    """
    sigma = np.atleast_2d(np.asarray(cov, dtype=float))
    box_level = level if box_level is None else box_level
    if box_level < level:
        raise DomainError("box_level must be at least level")
    half = np.sqrt(box_level * np.diag(sigma))
    rng = np.random.default_rng(seed)
    points = rng.uniform(-half, half, size=(int(n), half.size))
    inside = np.einsum("ij,ij->i", points, np.linalg.solve(sigma, points.T).T) <= level
    frac = inside.mean()
    box = float(np.prod(2 * half))
    return VolumeEstimate(estimate=box * frac, standard_error=box * math.sqrt(frac * (1 - frac) / n), draws=int(n))


# --- Chen's MC_p ---

class ChenIndex(BaseModel):
    value: float
    radius: float
    draws: int
    steps: int


def _bisect_radius(z_sorted: npt.NDArray, coverage: float, max_steps: int, tolerance: float) -> Tuple[float, int]:
    """Smallest R with share(Z <= R) >= coverage, on a fixed sorted sample."""
    n = z_sorted.size
    lo, hi = 0.0, float(z_sorted[-1])
    if hi == 0.0:
        return 0.0, 0
    for step in range(1, max_steps + 1):
        mid = 0.5 * (lo + hi)
        share = np.searchsorted(z_sorted, mid, side="right") / n
        if share >= coverage:
            hi = mid
        else:
            lo = mid
        if hi - lo <= tolerance * hi:
            return hi, step
    raise NumericError(f"chen_mcp bisection did not converge in {max_steps} steps (bracket [{lo}, {hi}])")


def chen_mcp(source: Source, mv: MvSpec, p_nc: float = Q.NONCONFORMING, mc_n: Optional[int] = None,
             seed: Optional[int] = None) -> ChenIndex:
    """
    MC_p = 1/R where P[max_i |X_i - M_i| / d_i <= R] = 1 - p_nc. The
    probability is estimated on one fixed set of draws (or on the data), so
    every bisection step sees the same sample.
    """
    if not 0 < p_nc < 1:
        raise DomainError(f"p_nc must lie in (0, 1), got {p_nc}")
    if isinstance(source, MultivariateNormalModel):
        _check_dimension(mv, source.dimension)
        x = _monte_carlo_draws(source, mc_n or settings.monte_carlo.n, seed)
    else:
        x = np.asarray(source, dtype=float)
        _check_dimension(mv, x.shape[1] if x.ndim == 2 else 0)
    z = np.sort(np.max(np.abs(x - mv.midpoints) / mv.half_widths, axis=1))
    num = settings.numerics
    radius, steps = _bisect_radius(z, 1.0 - p_nc, num.bisection_max_steps, num.bisection_tolerance)
    value = math.inf if radius == 0 else 1.0 / radius
    logger.debug("chen_mcp: R=%.6f after %d steps on %d draws", radius, steps, z.size)
    return ChenIndex(value=value, radius=radius, draws=int(z.size), steps=steps)


# --- Shahriari vector ---

class ShahriariVector(BaseModel):
    c1: float
    c2: float
    c3: int
    t_squared: float
    f_statistic: float
    scale_factor: float
    n: int


def shahriari_vector(data: npt.ArrayLike, mv: MvSpec, p_nc: float = Q.NONCONFORMING,
                     mc_n: Optional[int] = None, seed: Optional[int] = None) -> ShahriariVector:
    """
    (c1, c2, c3): Chen's MC_p of the fitted normal, the Hotelling T² p-value
    of the mean against the specification centre, and whether the
    spec-shaped box circumscribing the fitted 1 - p_nc ellipsoid fits inside
    the specification region.
    """
    x = np.asarray(data, dtype=float)
    if x.ndim != 2:
        raise DomainError(f"data must be an n x v matrix, got shape {x.shape}")
    n, v = x.shape
    _check_dimension(mv, v)
    if n <= v:
        raise DomainError(f"shahriari_vector needs more observations than axes, got n={n}, v={v}")
    mean = x.mean(axis=0)
    cov = np.atleast_2d(np.cov(x, rowvar=False, ddof=1))
    try:
        np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as e:
        raise NumericError(f"sample covariance is singular: {e}") from e

    c1 = chen_mcp(MultivariateNormalModel(mean, cov), mv, p_nc, mc_n, seed).value
    diff = mean - mv.midpoints
    t_squared = float(n * diff @ np.linalg.solve(cov, diff))
    f_stat = (n - v) / (v * (n - 1)) * t_squared
    c2 = float(AuxDistribution.fisher_f(v, n - v).sf(f_stat))
    chi = conformance_level(v, p_nc)
    scale = float(np.max(np.sqrt(chi * np.diag(cov)) / mv.half_widths))
    box_half = scale * mv.half_widths
    inside = np.all(mean - box_half >= np.asarray(mv.lower)) and np.all(mean + box_half <= np.asarray(mv.upper))
    return ShahriariVector(c1=c1, c2=c2, c3=int(inside), t_squared=t_squared, f_statistic=f_stat,
                           scale_factor=scale, n=n)


# --- Five-step pipeline ---

class PipelineFit(FitRecord):
    structural_function: str


class PipelineReport(BaseModel):
    fits: List[PipelineFit]
    winner_structural_function: str
    winner_family: str
    adequate: bool
    result: MvGeneralizedResult
    warnings: List[str] = []


def five_step_pipeline(data: npt.ArrayLike, families: Sequence, structural_functions: Sequence[StructuralFunction],
                       mv: MvSpec, desired: Optional[DesiredRegion] = None,
                       ldl_vector: Optional[Sequence[float]] = None, udl_vector: Optional[Sequence[float]] = None,
                       significance: Optional[float] = None, min_n: Optional[int] = None) -> PipelineReport:
    """
    Transform the observations with every candidate N, fit every candidate
    family to each transformed sample, keep the (N, family) pair with the
    smallest KS distance and evaluate the generalized indices on it. When no
    fit passes the KS screen the winner's N is evaluated on its empirical
    model instead.
    """
    x = np.asarray(data, dtype=float)
    significance = settings.fitting.significance if significance is None else significance
    min_n = settings.fitting.min_pipeline_n if min_n is None else min_n
    if x.ndim != 2:
        raise DomainError(f"data must be an n x v matrix, got shape {x.shape}")
    if x.shape[0] < min_n:
        raise DomainError(f"five-step pipeline needs at least {min_n} observations, got {x.shape[0]}")
    _check_dimension(mv, x.shape[1])
    if not structural_functions:
        raise DomainError("at least one structural function is required")

    fits: List[PipelineFit] = []
    transformed = {}
    for N_fn in structural_functions:
        y = structural_transform(x, N_fn)
        transformed[N_fn.label] = (N_fn, y)
        for record in fit_candidates(y, families, significance):
            fits.append(PipelineFit(structural_function=N_fn.label, **record.model_dump()))

    best = best_fit(fits)
    warnings: List[str] = []
    adequate = best is not None and best.adequate
    if best is None:
        N_fn, y = transformed[structural_functions[0].label]
    else:
        N_fn, y = transformed[best.structural_function]
    if adequate:
        y_model = fit_model(y, best.family).model
        family = best.family
    else:
        message = "no adequate model at significance %g; using the empirical model of N=%s" % (significance, N_fn.label)
        logger.warning(message)
        warnings.append(message)
        y_model, family = EmpiricalModel(y), Family.EMPIRICAL.value

    result = mv_generalized(mv, N_fn, x, desired, ldl_vector, udl_vector,
                            transformed_model=y_model, n_obs=x.shape[0])
    return PipelineReport(fits=fits, winner_structural_function=N_fn.label, winner_family=family,
                          adequate=adequate, result=result, warnings=warnings)
