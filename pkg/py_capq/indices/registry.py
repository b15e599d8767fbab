"""
Named index registry. Every index a configuration may request is defined
here with its formula, the basis it is computed from and a compute function
working on an evaluation context.
"""
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Any, Callable, Dict, List, Literal, Optional, Union

import numpy as np
import numpy.typing as npt

from ..constants import QualityConstants as Q
from ..distributions.base import ProcessModel
from ..exceptions import ConfigError, DomainError
from ..schema import DesiredRegion, MultivariateBlock, MvSpec, ProcessMoments, SpecLimits
from . import classical, generalized, multivariate, yield_based

Basis = Literal["moments", "quantile", "yield", "generalized", "multivariate"]

VANNMAN_NOTE = ("computed as (d - u|mu - M|) / (3 sqrt(sigma^2 + v (mu - T)^2)), the form that gives "
                "C_p, C_pk, C_pm, C_pmk at (u, v) = (0,0), (1,0), (0,1), (1,1); the (d - u)/(6 sqrt(...)) "
                "rendering does not reduce to them")
SPIRING_NOTE = "computed as C_p / sqrt(1 + g(delta)) so that g(delta) = w delta^2 reproduces C_p(0, w)"
TAGUCHI_NOTE = "denominator uses sigma^2 + (mu - T)^2 = E(X - T)^2"
VOLUME_NOTE = "ellipsoid volume grows as level^(v/2), so the ratio is (U / R)^(v/2) rather than (U / R)^v"
CLEMENTS_NOTE = "a defaults to Phi(-3) = 0.0013499 (0.00135 rounded), so C'_p equals C_p for a normal process"
SHAHRIARI_NOTE = ("c3 uses the spec-shaped box about the sample mean circumscribing the fitted "
                  "1 - p_nc normal ellipsoid, checked axis by axis")


@dataclass
class Computation:
    value: float
    components: Dict[str, float] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)


@dataclass
class UnivariateContext:
    spec: SpecLimits
    desired: DesiredRegion
    model: Optional[ProcessModel]
    moments: Optional[ProcessMoments] = None

    def require_moments(self) -> ProcessMoments:
        if self.moments is None:
            raise DomainError("moment-based indices need a positive standard deviation")
        return self.moments

    def require_model(self) -> ProcessModel:
        if self.model is None:
            raise DomainError("this index needs a process model")
        return self.model

    def generalized_inputs(self, params: Dict[str, float]) -> generalized.GeneralizedInputs:
        return generalized.GeneralizedInputs(spec=self.spec, desired=self.desired, model=self.require_model(),
                                             linear_extension=bool(params.get("linear_extension", 0)))


@dataclass
class MultivariateContext:
    mv: MvSpec
    block: MultivariateBlock
    source: Union[multivariate.MultivariateNormalModel, npt.NDArray]
    mc_n: int
    seed: int
    significance: Optional[float] = None

    @cached_property
    def pipeline(self) -> Optional[multivariate.PipelineReport]:
        if isinstance(self.source, multivariate.MultivariateNormalModel):
            return None
        return multivariate.five_step_pipeline(
            self.source, self.block.families, self.block.structural_functions, self.mv, self.block.desired,
            self.block.ldl_vector, self.block.udl_vector, significance=self.significance)

    @cached_property
    def generalized(self) -> multivariate.MvGeneralizedResult:
        if self.pipeline is not None:
            return self.pipeline.result
        return multivariate.mv_generalized(
            self.mv, self.block.structural_functions[0], self.source, self.block.desired,
            self.block.ldl_vector, self.block.udl_vector, mc_n=self.mc_n, seed=self.seed)

    @cached_property
    def normal_model(self) -> multivariate.MultivariateNormalModel:
        if isinstance(self.source, multivariate.MultivariateNormalModel):
            return self.source
        return multivariate.MultivariateNormalModel(self.source.mean(axis=0),
                                                    np.atleast_2d(np.cov(self.source, rowvar=False, ddof=1)))


@dataclass(frozen=True)
class IndexDefinition:
    name: str
    label: str
    formula: str
    basis: Basis
    compute: Callable[[Any, Dict[str, float]], Computation]
    defaults: Dict[str, Optional[float]] = field(default_factory=dict)
    # corrected reading of a commonly printed form, echoed by list-indices
    correction: Optional[str] = None

    @property
    def multivariate(self) -> bool:
        return self.basis == "multivariate"

    def resolve_params(self, params: Dict[str, float]) -> Dict[str, float]:
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise ConfigError(f"{self.name} does not take parameter(s) {sorted(unknown)}; "
                              f"accepted: {sorted(self.defaults)}")
        return {**self.defaults, **params}

    def tail_probabilities(self, params: Dict[str, float]) -> List[float]:
        """Tail levels whose quantiles a sample-based estimate needs."""
        if self.name == "clements_cp":
            return [params["a"]]
        if self.name == "mukherjee_i":
            return [p for p in (params["alpha1"], params["alpha2"]) if p > 0]
        return []


class IndexRegistry:
    def __init__(self):
        self._definitions: Dict[str, IndexDefinition] = {}

    def register(self, definition: IndexDefinition) -> None:
        self._definitions[definition.name] = definition

    def get(self, name: str) -> IndexDefinition:
        try:
            return self._definitions[name]
        except KeyError:
            raise ConfigError(f"unknown index '{name}'; valid indices: {self.names()}")

    def definitions(self) -> List[IndexDefinition]:
        return list(self._definitions.values())

    def univariate_names(self) -> List[str]:
        return [d.name for d in self._definitions.values() if not d.multivariate]

    def multivariate_names(self) -> List[str]:
        return [d.name for d in self._definitions.values() if d.multivariate]

    def names(self) -> List[str]:
        return list(self._definitions)


registry = IndexRegistry()


# --- Moment-based ---

def _basic(ctx: UnivariateContext) -> classical.BasicIndices:
    return classical.basic_indices(ctx.spec, ctx.require_moments())


def _target_notes(ctx: UnivariateContext) -> List[str]:
    if ctx.spec.target is None:
        return [f"target T not given; using the midpoint M={ctx.spec.midpoint!r}"]
    return []


def _c_p(ctx, params):
    b = _basic(ctx)
    return Computation(b.c_p, {"spread_ratio": b.spread_ratio})


def _c_pk(ctx, params):
    b = _basic(ctx)
    return Computation(b.c_pk, {"c_pu": b.c_pu, "c_pl": b.c_pl, "k": b.k})


def _c_pm(ctx, params):
    return Computation(_basic(ctx).c_pm, notes=[TAGUCHI_NOTE] + _target_notes(ctx))


def _c_pmk(ctx, params):
    return Computation(_basic(ctx).c_pmk, notes=[TAGUCHI_NOTE] + _target_notes(ctx))


def _s_pk(ctx, params):
    return Computation(classical.s_pk(ctx.spec, ctx.require_moments()))


def _vannman(ctx, params):
    notes = [VANNMAN_NOTE] + (_target_notes(ctx) if params["v"] > 0 else [])
    return Computation(classical.vannman(ctx.spec, ctx.require_moments(), params["u"], params["v"]), notes=notes)


def _spiring(ctx, params):
    g = classical.quadratic_loss(params["w"])
    return Computation(classical.spiring_cpw(ctx.spec, ctx.require_moments(), g), notes=[SPIRING_NOTE] + _target_notes(ctx))


# --- Yield and quantile based ---

def _clements(ctx, params):
    notes = [CLEMENTS_NOTE] if params["a"] == Q.NORMAL_TAIL else []
    return Computation(yield_based.clements_cp(ctx.spec, ctx.require_model(), params["a"]), notes=notes)


def _mukherjee(ctx, params):
    return Computation(yield_based.mukherjee_i(ctx.spec, ctx.require_model(), params["alpha1"], params["alpha2"]))


def _yield_components(ctx) -> Dict[str, float]:
    ys = yield_based.yield_summary(ctx.require_model(), ctx.spec)
    return {"p": ys.p, "p_nc": ys.p_nc, "lower_nc": ys.lower_nc, "upper_nc": ys.upper_nc}


def _yb_ratio(ctx, params):
    return Computation(yield_based.yb_ratio(params["p0_nc"], ctx.require_model(), ctx.spec), _yield_components(ctx))


def _yb_cf(ctx, params):
    value = yield_based.yb_cf(params["alpha0_L"], params["alpha0_U"], ctx.require_model(), ctx.spec)
    return Computation(value, _yield_components(ctx))


def _borges(ctx, params):
    return Computation(yield_based.borges_ho_c(ctx.require_model(), ctx.spec), _yield_components(ctx))


def _perakis(ctx, params):
    return Computation(yield_based.perakis_cpc(params["p0"], ctx.require_model(), ctx.spec), _yield_components(ctx))


# --- Generalized ---

def _split_notes(ctx) -> List[str]:
    if ctx.require_model().kind == "discrete":
        return ["discrete model: the median is the smallest support point with F >= 1/2, "
                "so the two components may differ for symmetric-looking processes"]
    return []


def _c_py(ctx, params):
    inputs = ctx.generalized_inputs(params)
    return Computation(generalized.c_py(inputs), {"p": inputs.process_yield(), "p0": inputs.p0()})


def _c_pyk(ctx, params):
    split = generalized.c_pyk(ctx.generalized_inputs(params))
    return Computation(split.value, {"c_pyu": split.upper, "c_pyl": split.lower}, _split_notes(ctx))


def _c_pTk(ctx, params):
    inputs = ctx.generalized_inputs(params)
    notes = _target_notes(ctx)
    if ctx.spec.target is None:
        inputs = replace(inputs, target=ctx.spec.midpoint)
    split = generalized.c_pTk(inputs)
    return Computation(split.value, {"c_pTu": split.upper, "c_pTl": split.lower}, notes)


def _c_pyk_symmetric(ctx, params):
    return Computation(generalized.c_pyk_symmetric_form(ctx.generalized_inputs(params)))


# --- Multivariate ---

def _mv_notes(ctx: MultivariateContext) -> List[str]:
    g = ctx.generalized
    return [f"structural function {g.structural_function}, law of N(X) by {g.method}"]


def _c_py_M(ctx, params):
    g = ctx.generalized
    return Computation(g.c_py_M, {"standard_error": g.standard_error}, _mv_notes(ctx))


def _c_pyk_M(ctx, params):
    g = ctx.generalized
    return Computation(g.c_pyk_M.value, {"c_pyu": g.c_pyk_M.upper, "c_pyl": g.c_pyk_M.lower}, _mv_notes(ctx))


def _c_pTk_M(ctx, params):
    g = ctx.generalized
    return Computation(g.c_pTk_M.value, {"c_pTu": g.c_pTk_M.upper, "c_pTl": g.c_pTk_M.lower}, _mv_notes(ctx))


def _volume_ratio(ctx, params):
    if params["u_level"] is None:
        raise ConfigError("ellipsoid_volume_ratio needs parameter u_level")
    model = ctx.normal_model
    value = multivariate.ellipsoid_volume_ratio(model, params["u_level"], ctx.block.p_nc)
    r = multivariate.conformance_level(model.dimension, ctx.block.p_nc)
    return Computation(value, {"R": r}, [VOLUME_NOTE])


def _chen(ctx, params):
    chen = multivariate.chen_mcp(ctx.source, ctx.mv, ctx.block.p_nc, ctx.mc_n, ctx.seed)
    return Computation(chen.value, {"radius": chen.radius, "draws": float(chen.draws)})


def _shahriari(ctx, params):
    if isinstance(ctx.source, multivariate.MultivariateNormalModel):
        raise ConfigError("shahriari_vector needs observed data")
    vec = multivariate.shahriari_vector(ctx.source, ctx.mv, ctx.block.p_nc, ctx.mc_n, ctx.seed)
    return Computation(vec.c1, {"c1": vec.c1, "c2": vec.c2, "c3": float(vec.c3), "t_squared": vec.t_squared,
                                "f_statistic": vec.f_statistic, "scale_factor": vec.scale_factor},
                       [SHAHRIARI_NOTE])


_DESIRED_TAILS = {"alpha1": Q.DESIRED_TAIL, "alpha2": Q.DESIRED_TAIL}

for _definition in (
    IndexDefinition("c_p", "C_p", "d / (3 sigma)", "moments", _c_p),
    IndexDefinition("c_pk", "C_pk", "(d - |mu - M|) / (3 sigma)", "moments", _c_pk),
    IndexDefinition("c_pm", "C_pm", "d / (3 sqrt(sigma^2 + (mu - T)^2))", "moments", _c_pm),
    IndexDefinition("c_pmk", "C_pmk", "(d - |mu - M|) / (3 sqrt(sigma^2 + (mu - T)^2))", "moments", _c_pmk),
    IndexDefinition("s_pk", "S_pk", "Phi^-1(Phi((U - mu)/sigma)/2 + Phi((mu - L)/sigma)/2) / 3", "moments", _s_pk),
    IndexDefinition("vannman", "C_p(u,v)", "(d - u|mu - M|) / (3 sqrt(sigma^2 + v (mu - T)^2))", "moments",
                    _vannman, {"u": 1.0, "v": 1.0}, correction=VANNMAN_NOTE),
    IndexDefinition("spiring_cpw", "C_p^(w)", "C_p / sqrt(1 + w delta^2), delta = (mu - T)/sigma", "moments",
                    _spiring, {"w": 1.0}, correction=SPIRING_NOTE),
    IndexDefinition("clements_cp", "C'_p", "(U - L) / (Q(1 - a) - Q(a))", "quantile", _clements,
                    {"a": Q.NORMAL_TAIL}),
    IndexDefinition("mukherjee_i", "I", "(U - L) / (Q(1 - alpha2) - Q(alpha1))", "quantile", _mukherjee,
                    dict(_DESIRED_TAILS)),
    IndexDefinition("yb_ratio", "C_p (proportion ratio)", "p0_nc / (1 - p)", "yield", _yb_ratio,
                    {"p0_nc": Q.NONCONFORMING}),
    IndexDefinition("yb_cf", "C_f", "min(alpha0_L / alpha_L, alpha0_U / alpha_U)", "yield", _yb_cf,
                    {"alpha0_L": Q.DESIRED_TAIL, "alpha0_U": Q.DESIRED_TAIL}),
    IndexDefinition("borges_ho_c", "C", "Phi^-1(1 - pi/2) / 3, pi = 1 - p", "yield", _borges),
    IndexDefinition("perakis_cpc", "C_pc", "(1 - p0) / (1 - p)", "yield", _perakis, {"p0": Q.DESIRED_YIELD}),
    IndexDefinition("c_py", "C_py", "p / p0", "generalized", _c_py, {"linear_extension": 0}),
    IndexDefinition("c_pyk", "C_pyk", "min((F(U) - F(mu_e))/(1/2 - alpha2), (F(mu_e) - F(L))/(1/2 - alpha1))",
                    "generalized", _c_pyk, {"linear_extension": 0}),
    IndexDefinition("c_pTk", "C_pTk", "min((F(U) - F(T))/(1/2 - alpha2), (F(T) - F(L))/(1/2 - alpha1))",
                    "generalized", _c_pTk, {"linear_extension": 0}),
    IndexDefinition("c_pyk_symmetric", "C_pyk (symmetric form)",
                    "((F(U) - F(L))/2 - |(F(L) + F(U))/2 - 1/2|) / ((1 - alpha)/2)", "generalized",
                    _c_pyk_symmetric, {"linear_extension": 0}),
    IndexDefinition("c_py_M", "C_py^M", "(F(N(U)) - F(N(L))) / p0", "multivariate", _c_py_M),
    IndexDefinition("c_pyk_M", "C_pyk^M", "C_pyk of N(X) against [N(L), N(U)]", "multivariate", _c_pyk_M),
    IndexDefinition("c_pTk_M", "C_pTk^M", "C_pTk of N(X) at N(T)", "multivariate", _c_pTk_M),
    IndexDefinition("ellipsoid_volume_ratio", "C_p (ellipsoidal)", "(U / R)^(v/2), R = chi2_v(1 - p_nc)",
                    "multivariate", _volume_ratio, {"u_level": None}, correction=VOLUME_NOTE),
    IndexDefinition("chen_mcp", "MC_p", "1 / R, P[max_i |X_i - M_i| / d_i <= R] = 1 - p_nc", "multivariate", _chen),
    IndexDefinition("shahriari_vector", "(CpM, PV, LI)", "(MC_p of fitted normal, Hotelling T^2 p-value, "
                    "containment 0/1)", "multivariate", _shahriari),
):
    registry.register(_definition)
