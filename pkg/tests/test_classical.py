import math

import numpy as np
import pytest
from pydantic import ValidationError

from py_capq.exceptions import ConfigError, DomainError
from py_capq.indices.classical import basic_indices, quadratic_loss, s_pk, spiring_cpw, vannman
from py_capq.schema import ProcessMoments, SpecLimits


@pytest.fixture
def worked_spec():
    return SpecLimits(L=10, U=30, T=20)


@pytest.fixture
def random_configs():
    """1000 random (spec, moments) pairs with the mean inside the specification."""
    rng = np.random.default_rng(2024)
    configs = []
    for _ in range(1000):
        lower = rng.uniform(-50, 50)
        upper = lower + rng.uniform(0.5, 40)
        mu = rng.uniform(lower, upper)
        sigma = rng.uniform(0.05, 10)
        target = rng.uniform(lower, upper)
        configs.append((SpecLimits(L=lower, U=upper, T=target), ProcessMoments(mu=mu, sigma=sigma)))
    return configs


def test_worked_example(worked_spec):
    b = basic_indices(worked_spec, ProcessMoments(mu=20, sigma=3))
    assert b.c_p == pytest.approx(20 / 18, abs=1e-12)
    b = basic_indices(worked_spec, ProcessMoments(mu=23, sigma=3))
    assert b.c_pk == pytest.approx(7 / 9, abs=1e-12)
    assert b.c_pm == pytest.approx(0.7857, abs=1e-4)
    assert b.c_pmk == pytest.approx(0.5500, abs=1e-4)
    assert b.c_pu == pytest.approx(7 / 9)
    assert b.c_pl == pytest.approx(13 / 9)
    assert b.k == pytest.approx(0.3)
    assert b.spread_ratio == pytest.approx(0.9)


def test_s_pk_examples(worked_spec):
    assert s_pk(worked_spec, ProcessMoments(mu=20, sigma=10 / 3)) == pytest.approx(1.0, abs=1e-12)
    assert s_pk(worked_spec, ProcessMoments(mu=23, sigma=3)) == pytest.approx(0.861, abs=1e-3)


def test_s_pk_decreases_to_zero(worked_spec):
    values = [s_pk(worked_spec, ProcessMoments(mu=21, sigma=s)) for s in np.geomspace(1, 1e4, 30)]
    assert np.all(np.diff(values) < 0)
    assert 0 < values[-1] < 1e-3


def test_s_pk_infinite_when_tails_vanish():
    assert math.isinf(s_pk(SpecLimits(L=-100, U=100), ProcessMoments(mu=0, sigma=1)))


def test_vannman_examples(worked_spec):
    mom = ProcessMoments(mu=23, sigma=3)
    b = basic_indices(worked_spec, mom)
    assert vannman(worked_spec, mom, 0, 0) == pytest.approx(b.c_p, abs=1e-12)
    assert vannman(worked_spec, mom, 1, 1) == pytest.approx(0.5500, abs=1e-4)
    assert vannman(worked_spec, mom, 0, 1) == pytest.approx(b.c_pm, abs=1e-12)


def test_vannman_specializations(random_configs):
    for spec, mom in random_configs:
        b = basic_indices(spec, mom)
        assert vannman(spec, mom, 0, 0) == pytest.approx(b.c_p, abs=1e-12)
        assert vannman(spec, mom, 1, 0) == pytest.approx(b.c_pk, abs=1e-12)
        assert vannman(spec, mom, 0, 1) == pytest.approx(b.c_pm, abs=1e-12)
        assert vannman(spec, mom, 1, 1) == pytest.approx(b.c_pmk, abs=1e-12)


def test_ordering_chains(random_configs):
    for spec, mom in random_configs:
        centred = SpecLimits(L=spec.lower, U=spec.upper)
        b = basic_indices(centred, mom)
        assert b.c_p >= b.c_pk >= b.c_pmk
        assert b.c_p >= b.c_pm >= b.c_pmk


def test_spiring(worked_spec):
    mom = ProcessMoments(mu=23, sigma=3)
    assert spiring_cpw(worked_spec, mom, lambda d: 0.0) == pytest.approx(basic_indices(worked_spec, mom).c_p)
    assert spiring_cpw(worked_spec, mom, quadratic_loss(1.0)) == pytest.approx(0.7857, abs=1e-4)


def test_spiring_matches_vannman(random_configs):
    for spec, mom in random_configs[:100]:
        assert spiring_cpw(spec, mom, quadratic_loss(2.0)) == pytest.approx(vannman(spec, mom, 0, 2), abs=1e-12)


def test_spiring_rejects_bad_loss(worked_spec):
    mom = ProcessMoments(mu=23, sigma=3)
    with pytest.raises(DomainError, match="non-negative"):
        spiring_cpw(worked_spec, mom, lambda d: -d ** 2)
    with pytest.raises(DomainError, match="vanish"):
        spiring_cpw(worked_spec, mom, lambda d: 1.0 + d ** 2)
    with pytest.raises(DomainError):
        quadratic_loss(-1.0)


def test_centered_coincidence():
    spec = SpecLimits(L=4, U=16, T=10)
    for sigma in (0.8, 1.5, 2.0, 3.0):
        mom = ProcessMoments(mu=10, sigma=sigma)
        b = basic_indices(spec, mom)
        for value in (b.c_pk, b.c_pm, b.c_pmk, s_pk(spec, mom)):
            assert value == pytest.approx(b.c_p, abs=1e-9)


def test_scale_invariance(random_configs):
    a, shift = 3.7, -12.5
    for spec, mom in random_configs[:200]:
        scaled_spec = SpecLimits(L=a * spec.lower + shift, U=a * spec.upper + shift, T=a * spec.target + shift)
        scaled_mom = ProcessMoments(mu=a * mom.mu + shift, sigma=a * mom.sigma)
        b, sb = basic_indices(spec, mom), basic_indices(scaled_spec, scaled_mom)
        for name in ("c_p", "c_pk", "c_pm", "c_pmk"):
            assert getattr(sb, name) == pytest.approx(getattr(b, name), abs=1e-12, rel=1e-12)
        assert s_pk(scaled_spec, scaled_mom) == pytest.approx(s_pk(spec, mom), abs=1e-12, rel=1e-12)


def test_monotone_in_sigma():
    spec = SpecLimits(L=0, U=10, T=6)
    rows = []
    for sigma in np.linspace(0.2, 4, 50):
        mom = ProcessMoments(mu=5.5, sigma=sigma)
        b = basic_indices(spec, mom)
        rows.append([b.c_p, b.c_pk, b.c_pm, b.c_pmk, s_pk(spec, mom), vannman(spec, mom, 1, 2)])
    assert np.all(np.diff(np.array(rows), axis=0) < 0)


def test_default_target_is_midpoint():
    spec = SpecLimits(L=10, U=30)
    mom = ProcessMoments(mu=23, sigma=3)
    assert basic_indices(spec, mom).c_pm == pytest.approx(basic_indices(SpecLimits(L=10, U=30, T=20), mom).c_pm)
    with pytest.raises(ConfigError, match="target"):
        basic_indices(spec, mom, require_target=True)


def test_invalid_inputs():
    with pytest.raises(ValidationError, match="sigma must be strictly positive"):
        ProcessMoments(mu=0, sigma=0)
    with pytest.raises(ValidationError, match="strictly less"):
        SpecLimits(L=5, U=5)
    with pytest.raises(ValidationError, match="within"):
        SpecLimits(L=0, U=1, T=2)
    with pytest.raises(DomainError, match="sigma"):
        basic_indices(SpecLimits(L=0, U=1), ProcessMoments.model_construct(mu=0.5, sigma=-1.0))
    with pytest.raises(DomainError, match="non-negative"):
        vannman(SpecLimits(L=0, U=1), ProcessMoments(mu=0.5, sigma=0.1), -1, 0)
