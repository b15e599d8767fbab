import numpy as np
import pytest
from scipy import special

from py_capq.distributions import ParametricModel
from py_capq.exceptions import DomainError
from py_capq.indices.generalized import GeneralizedInputs, c_pTk, c_py, c_pyk, c_pyk_symmetric_form
from py_capq.indices.yield_based import yield_summary
from py_capq.schema import DesiredRegion, SpecLimits

STD_NORMAL = ParametricModel("normal", mean=0.0, sd=1.0)


def inputs(spec, model=STD_NORMAL, desired=None, **kwargs):
    return GeneralizedInputs(spec=spec, desired=desired or DesiredRegion(), model=model, **kwargs)


def test_c_py_equals_one_when_yield_matches():
    spec = SpecLimits(L=-2.5, U=1.5)
    desired = DesiredRegion(LDL=-2.5, UDL=1.5)
    assert c_py(inputs(spec, desired=desired)) == pytest.approx(1.0, abs=1e-12)
    uniform = ParametricModel("uniform", a=0, b=1)
    assert c_py(inputs(SpecLimits(L=0.1, U=0.9), uniform, DesiredRegion(LDL=0.2, UDL=1.0))) == pytest.approx(1.0,
                                                                                                             abs=1e-12)


def test_c_py_examples():
    assert c_py(inputs(SpecLimits(L=-2, U=2))) == pytest.approx(0.95708, abs=1e-5)
    model = ParametricModel("normal", mean=4.0, sd=0.5)
    spec = SpecLimits(L=3.2, U=5.5)
    p = yield_summary(model, spec).p
    value = c_py(inputs(spec, model, DesiredRegion(LDL=2.5, UDL=5.5)))
    assert value == pytest.approx(p / (1 - 2 * special.ndtr(-3)), rel=1e-12)
    assert value == pytest.approx(p / 0.9973, rel=1e-6)


def test_c_py_range():
    desired = DesiredRegion()
    values = [c_py(inputs(SpecLimits(L=-k, U=k), desired=desired)) for k in np.linspace(0.01, 8, 40)]
    assert all(0 < v <= 1 / desired.p0(STD_NORMAL) + 1e-15 for v in values)
    assert values[0] < 0.01


def test_c_py_monotone_in_limits():
    upper = [c_py(inputs(SpecLimits(L=-1, U=u))) for u in np.linspace(0, 4, 30)]
    lower = [c_py(inputs(SpecLimits(L=l, U=1))) for l in np.linspace(-4, 0, 30)]
    assert np.all(np.diff(upper) > 0)
    assert np.all(np.diff(lower) < 0)


def test_c_py_uniform_reduction():
    rng = np.random.default_rng(17)
    for _ in range(200):
        a = rng.uniform(-10, 10)
        b = a + rng.uniform(1, 20)
        lower, upper = np.sort(rng.uniform(a, a + 0.45 * (b - a), 2)) + [0, 0.5 * (b - a)]
        ldl, udl = np.sort(rng.uniform(a, a + 0.45 * (b - a), 2)) + [0, 0.5 * (b - a)]
        model = ParametricModel("uniform", a=a, b=b)
        spec = SpecLimits(L=lower, U=upper)
        got = c_py(inputs(spec, model, DesiredRegion(LDL=ldl, UDL=udl)))
        assert got == pytest.approx((upper - lower) / (udl - ldl), abs=1e-12)


def test_c_py_linear_extension():
    model = ParametricModel("uniform", a=0.0, b=1.0)
    sigma = model.moments().sd
    desired = DesiredRegion(LDL=0.5 - 3 * sigma, UDL=0.5 + 3 * sigma)
    for lower, upper in [(-0.4, 1.3), (0.1, 0.9), (-1.0, 0.2)]:
        got = c_py(inputs(SpecLimits(L=lower, U=upper), model, desired, linear_extension=True))
        assert got == pytest.approx((upper - lower) / (6 * sigma), abs=1e-12)


def test_linear_extension_rejects_other_families():
    with pytest.raises(DomainError, match="uniform"):
        c_py(inputs(SpecLimits(L=-1, U=1), desired=DesiredRegion(LDL=-3, UDL=3), linear_extension=True))


def test_c_pyk_examples():
    split = c_pyk(inputs(SpecLimits(L=-1, U=3)))
    assert split.lower == pytest.approx(0.684538, abs=1e-5)
    assert split.upper == pytest.approx(1.0, abs=1e-5)
    assert split.value == split.lower


def test_c_pyk_centered_coincidence():
    for k in (1.0, 2.0, 3.0, 4.5):
        spec = SpecLimits(L=-k, U=k)
        assert c_pyk(inputs(spec)).value == pytest.approx(c_py(inputs(spec)), abs=1e-12)
    tails = DesiredRegion(alpha1=0.01, alpha2=0.01)
    spec = SpecLimits(L=-2.2, U=2.2)
    assert c_pyk(inputs(spec, desired=tails)).value == pytest.approx(c_py(inputs(spec, desired=tails)), abs=1e-12)


def test_c_pyk_symmetric_form():
    rng = np.random.default_rng(3)
    for _ in range(100):
        model = ParametricModel("normal", mean=rng.uniform(-2, 2), sd=rng.uniform(0.3, 3))
        lower = rng.uniform(-6, 0)
        spec = SpecLimits(L=lower, U=lower + rng.uniform(0.5, 10))
        alpha = rng.uniform(0.001, 0.2)
        gi = inputs(spec, model, DesiredRegion(alpha1=alpha / 2, alpha2=alpha / 2))
        assert c_pyk_symmetric_form(gi) == pytest.approx(c_pyk(gi).value, abs=1e-12)


def test_c_pyk_symmetric_form_needs_equal_tails():
    with pytest.raises(DomainError, match="alpha1 == alpha2"):
        c_pyk_symmetric_form(inputs(SpecLimits(L=-1, U=1), desired=DesiredRegion(alpha1=0.01, alpha2=0.02)))


def test_c_pTk_examples():
    split = c_pTk(inputs(SpecLimits(L=-1, U=3, T=1)))
    assert split.upper == pytest.approx(0.315462, abs=1e-5)
    assert split.lower == pytest.approx(1.369076, abs=1e-5)
    assert split.value == pytest.approx(0.3155, abs=1e-4)


def test_c_pTk_at_median_equals_c_pyk():
    model = ParametricModel("gamma", shape=2.0, scale=1.5)
    spec = SpecLimits(L=0.5, U=9.0)
    assert c_pTk(inputs(spec, model, target=model.median())).value == pytest.approx(c_pyk(inputs(spec, model)).value,
                                                                                    abs=1e-12)


def test_c_pTk_balanced_target():
    spec = SpecLimits(L=-1.5, U=2.5)
    target = float(STD_NORMAL.quantile((STD_NORMAL.cdf(-1.5) + STD_NORMAL.cdf(2.5)) / 2))
    split = c_pTk(inputs(spec, target=target))
    assert split.upper == pytest.approx(split.lower, abs=1e-12)


def test_explicit_target_overrides_spec_target():
    spec = SpecLimits(L=-1, U=3, T=1)
    assert c_pTk(inputs(spec, target=0.0)).value == pytest.approx(c_pyk(inputs(spec)).value, abs=1e-12)


def _transformed_cases():
    """(g, model of g(X)) for X ~ normal(1, 2) and strictly increasing g."""
    return [
        (np.exp, ParametricModel("lognormal", logmean=1.0, logsd=2.0)),
        (lambda x: 3.0 * x + 7.0, ParametricModel("normal", mean=10.0, sd=6.0)),
        (lambda x: special.ndtr((x - 1.0) / 2.0), ParametricModel("uniform", a=0.0, b=1.0)),
    ]


@pytest.mark.parametrize("desired_limits", [None, (-3.0, 6.0)], ids=["tails", "explicit"])
@pytest.mark.parametrize("case", range(3), ids=["exp", "affine", "probability_integral"])
def test_generalized_indices_depend_only_on_cdf_values(case, desired_limits):
    base = ParametricModel("normal", mean=1.0, sd=2.0)
    lower, upper, target = -2.0, 5.5, 2.2
    g, model = _transformed_cases()[case]

    def region(transform):
        if desired_limits is None:
            return DesiredRegion()
        return DesiredRegion(LDL=float(transform(desired_limits[0])), UDL=float(transform(desired_limits[1])))

    original = inputs(SpecLimits(L=lower, U=upper, T=target), base, region(lambda x: x))
    moved = inputs(SpecLimits(L=float(g(lower)), U=float(g(upper)), T=float(g(target))), model, region(g))
    for x in (lower, upper, target):
        assert float(model.cdf(g(x))) == pytest.approx(float(base.cdf(x)), rel=1e-12)

    assert c_py(moved) == pytest.approx(c_py(original), rel=1e-9)
    for index in (c_pyk, c_pTk):
        a, b = index(original), index(moved)
        assert b.value == pytest.approx(a.value, rel=1e-9)
        assert b.upper == pytest.approx(a.upper, rel=1e-9)
        assert b.lower == pytest.approx(a.lower, rel=1e-9)


def test_discrete_model():
    model = ParametricModel("poisson", lam=5.0)
    gi = inputs(SpecLimits(L=1, U=11), model)
    assert 0 < c_py(gi) < 1 / gi.p0()
    split = c_pyk(gi)
    assert split.value > 0 and split.lower > 0


def test_errors():
    uniform = ParametricModel("uniform", a=0, b=1)
    with pytest.raises(DomainError, match="p0"):
        c_py(inputs(SpecLimits(L=0.1, U=0.9), uniform, DesiredRegion(LDL=5, UDL=6)))
    with pytest.raises(DomainError, match="0.5"):
        c_pyk(inputs(SpecLimits(L=-1, U=1), desired=DesiredRegion(alpha1=0.6, alpha2=0.1)))
    with pytest.raises(DomainError, match="target"):
        c_pTk(inputs(SpecLimits(L=-1, U=1)))
