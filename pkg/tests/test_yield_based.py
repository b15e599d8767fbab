import math

import numpy as np
import pytest
from scipy import special

from py_capq.distributions import EmpiricalModel, ParametricModel
from py_capq.exceptions import DomainError
from py_capq.indices.classical import basic_indices, s_pk
from py_capq.indices.yield_based import (borges_ho_c, clements_cp, mukherjee_i, perakis_cpc, yb_cf, yb_ratio,
                                         yield_summary)
from py_capq.schema import ProcessMoments, SpecLimits

STD_NORMAL = ParametricModel("normal", mean=0.0, sd=1.0)

ALL_FAMILIES = [
    ParametricModel("normal", mean=1.0, sd=2.0),
    ParametricModel("lognormal", logmean=0.2, logsd=0.5),
    ParametricModel("weibull", shape=2.0, scale=1.5),
    ParametricModel("gamma", shape=3.0, scale=0.5),
    ParametricModel("uniform", a=0.0, b=2.0),
    ParametricModel("exponential", rate=1.0),
    ParametricModel("poisson", lam=6.0),
    ParametricModel("binomial", trials=30, prob=0.4),
    EmpiricalModel(np.random.default_rng(5).normal(10.0, 1.0, 2000)),
]


def test_yield_summary_examples():
    assert yield_summary(ParametricModel("normal", mean=5, sd=2), SpecLimits(L=-1, U=11)).p == pytest.approx(0.9973, abs=1e-4)
    assert yield_summary(ParametricModel("uniform", a=0, b=1), SpecLimits(L=0.1, U=0.9)).p == pytest.approx(0.8)
    assert yield_summary(STD_NORMAL, SpecLimits(L=-2, U=2)).p == pytest.approx(0.954500, abs=1e-6)


@pytest.mark.parametrize("model", ALL_FAMILIES[:6], ids=lambda m: m.family)
def test_yield_partition(model):
    spec = SpecLimits(L=float(model.quantile(0.1)), U=float(model.quantile(0.97)))
    ys = yield_summary(model, spec)
    assert ys.p + ys.lower_nc + ys.upper_nc == pytest.approx(1.0, abs=1e-12)


def test_discrete_yield_includes_lower_endpoint():
    model = ParametricModel("poisson", lam=2.0)
    ys = yield_summary(model, SpecLimits(L=1, U=3))
    assert ys.p == pytest.approx(model.cdf(3) - model.cdf(0), abs=1e-14)
    assert ys.lower_nc == pytest.approx(model.cdf(0), abs=1e-14)


def test_clements_examples():
    assert clements_cp(SpecLimits(L=0.1, U=0.9), ParametricModel("uniform", a=0, b=1)) == pytest.approx(0.80217, abs=1e-5)
    assert clements_cp(SpecLimits(L=0.01, U=3), ParametricModel("exponential", rate=1.0), a=0.00135) == \
        pytest.approx(0.45259, abs=1e-4)


@pytest.mark.parametrize("mean,sd", [(0.0, 1.0), (23.0, 3.0), (-4.0, 0.2)])
def test_clements_equals_c_p_for_normal(mean, sd):
    spec = SpecLimits(L=mean - 7, U=mean + 5)
    expected = basic_indices(spec, ProcessMoments(mu=mean, sigma=sd)).c_p
    assert clements_cp(spec, ParametricModel("normal", mean=mean, sd=sd)) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("model", ALL_FAMILIES, ids=lambda m: m.family)
def test_clements_equals_mukherjee(model):
    spec = SpecLimits(L=float(model.quantile(0.01)) - 1, U=float(model.quantile(0.99)) + 1)
    assert clements_cp(spec, model, a=0.00135) == mukherjee_i(spec, model, 0.00135, 0.00135)


def test_mukherjee_examples():
    assert mukherjee_i(SpecLimits(L=0.1, U=0.9), ParametricModel("uniform", a=0, b=1), 0.05, 0.05) == \
        pytest.approx(0.8 / 0.9)
    assert mukherjee_i(SpecLimits(L=-3, U=3), STD_NORMAL, 0.00135, 0.00135) == pytest.approx(1.0, abs=1e-3)
    # a zero tail reaches the support endpoint
    assert mukherjee_i(SpecLimits(L=0.1, U=0.9), ParametricModel("uniform", a=0, b=1), 0.0, 0.0) == pytest.approx(0.8)
    assert mukherjee_i(SpecLimits(L=-3, U=3), STD_NORMAL, 0.0, 0.01) == 0.0


def test_quantile_index_errors():
    spec = SpecLimits(L=0, U=5)
    with pytest.raises(DomainError, match="tail proportion"):
        clements_cp(spec, STD_NORMAL, a=0.5)
    with pytest.raises(DomainError, match="degenerate"):
        clements_cp(spec, ParametricModel("poisson", lam=1e-6))
    with pytest.raises(DomainError, match="below 1"):
        mukherjee_i(spec, STD_NORMAL, 0.6, 0.5)
    with pytest.raises(DomainError, match="alpha1"):
        mukherjee_i(spec, STD_NORMAL, -0.1, 0.1)


def test_yb_ratio():
    spec = SpecLimits(L=-2, U=2)
    p_nc = yield_summary(STD_NORMAL, spec).p_nc
    assert yb_ratio(p_nc, STD_NORMAL, spec) == pytest.approx(1.0)
    assert yb_ratio(0.0027, STD_NORMAL, spec) == pytest.approx(0.05934, abs=1e-5)
    assert math.isinf(yb_ratio(0.0027, ParametricModel("uniform", a=0, b=1), SpecLimits(L=0, U=1)))
    with pytest.raises(DomainError, match="p0_nc"):
        yb_ratio(0.0, STD_NORMAL, spec)


def test_yb_cf():
    spec = SpecLimits(L=-3, U=3)
    assert yb_cf(0.00135, 0.00135, ParametricModel("normal", mean=0.5, sd=1), spec) == pytest.approx(0.2174, abs=1e-4)
    on_target = yb_cf(float(special.ndtr(-3)), float(special.ndtr(-3)), STD_NORMAL, spec)
    assert on_target == pytest.approx(1.0, abs=1e-9)
    # symmetric model and spec: C_f equals the ratio with the pooled tolerance
    spec2 = SpecLimits(L=-2.5, U=2.5)
    assert yb_cf(0.001, 0.001, STD_NORMAL, spec2) == pytest.approx(yb_ratio(0.002, STD_NORMAL, spec2), rel=1e-9)
    assert math.isinf(yb_cf(0.001, 0.001, ParametricModel("uniform", a=0, b=1), SpecLimits(L=-1, U=2)))
    # only the upper side has nonconforming mass
    one_sided = yb_cf(0.001, 0.004, ParametricModel("uniform", a=0, b=1), SpecLimits(L=-1, U=0.99))
    assert one_sided == pytest.approx(0.4)


def test_borges_ho_c():
    spec = SpecLimits(L=-3, U=3)
    assert borges_ho_c(STD_NORMAL, spec) == pytest.approx(1.0, abs=1e-12)
    # equal fraction defective, equal capability
    p = yield_summary(STD_NORMAL, SpecLimits(L=-2, U=2)).p
    uniform = ParametricModel("uniform", a=0, b=1)
    assert borges_ho_c(uniform, SpecLimits(L=0, U=p)) == pytest.approx(borges_ho_c(STD_NORMAL, SpecLimits(L=-2, U=2)),
                                                                      rel=1e-9)
    assert math.isinf(borges_ho_c(uniform, SpecLimits(L=0, U=1)))


def test_borges_ho_c_increasing_in_yield():
    values = [borges_ho_c(STD_NORMAL, SpecLimits(L=-k, U=k)) for k in np.linspace(0.7, 6.0, 60)]
    assert np.all(np.diff(values) > 0)


def test_centered_normal_identities():
    spec = SpecLimits(L=-10, U=10)
    for sigma in np.linspace(1, 6, 50):
        mom = ProcessMoments(mu=0.0, sigma=sigma)
        c_p = basic_indices(spec, mom).c_p
        c = borges_ho_c(ParametricModel("normal", mean=0.0, sd=sigma), spec)
        assert c == pytest.approx(c_p, abs=1e-9)
        assert s_pk(spec, mom) == pytest.approx(c_p, abs=1e-9)


def test_perakis_cpc():
    uniform = ParametricModel("uniform", a=0, b=1)
    assert perakis_cpc(0.9973, uniform, SpecLimits(L=0, U=0.99)) == pytest.approx(0.27)
    assert perakis_cpc(0.9973, uniform, SpecLimits(L=0, U=0.9973)) == pytest.approx(1.0)
    assert perakis_cpc(0.9973, uniform, SpecLimits(L=0, U=0.999)) > 1
    assert math.isinf(perakis_cpc(0.9973, uniform, SpecLimits(L=-1, U=1)))
    value = perakis_cpc(0.9973, ParametricModel("poisson", lam=4.0), SpecLimits(L=0, U=10))
    assert math.isfinite(value) and value > 0
    with pytest.raises(DomainError, match="p0"):
        perakis_cpc(1.0, uniform, SpecLimits(L=0, U=0.5))


def test_affine_invariance():
    a, b = 2.5, -3.0
    cases = [
        (ParametricModel("normal", mean=1.0, sd=0.8), ParametricModel("normal", mean=a * 1.0 + b, sd=a * 0.8),
         SpecLimits(L=-1.0, U=3.5)),
        (ParametricModel("uniform", a=0.0, b=4.0), ParametricModel("uniform", a=b, b=a * 4.0 + b),
         SpecLimits(L=0.3, U=3.9)),
    ]
    for model, scaled, spec in cases:
        scaled_spec = SpecLimits(L=a * spec.lower + b, U=a * spec.upper + b)
        pairs = [
            (clements_cp(spec, model), clements_cp(scaled_spec, scaled)),
            (mukherjee_i(spec, model, 0.01, 0.02), mukherjee_i(scaled_spec, scaled, 0.01, 0.02)),
            (yb_ratio(0.0027, model, spec), yb_ratio(0.0027, scaled, scaled_spec)),
            (yb_cf(0.001, 0.002, model, spec), yb_cf(0.001, 0.002, scaled, scaled_spec)),
            (borges_ho_c(model, spec), borges_ho_c(scaled, scaled_spec)),
            (perakis_cpc(0.9973, model, spec), perakis_cpc(0.9973, scaled, scaled_spec)),
        ]
        for original, transformed in pairs:
            assert transformed == pytest.approx(original, rel=1e-10)
