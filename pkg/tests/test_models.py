import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srgm_swarm.models import (
    DomainError,
    ModelKind,
    Params,
    SearchSpace,
    default_bounds,
    failure_intensity,
    mean_value,
)

ALL_KINDS = list(ModelKind)
positive_a = st.floats(min_value=1e-3, max_value=2000)
positive_b = st.floats(min_value=1e-5, max_value=1)
times = st.floats(min_value=0, max_value=1e4)


def test_exactly_four_models():
    assert len(ModelKind) == 4
    assert {k.label for k in ModelKind} == {"EXP(G-O)", "POW", "DSS", "M-O"}


@pytest.mark.parametrize(
    "kind, a, b, t, expected",
    [
        (ModelKind.GO_EXPONENTIAL, 1.0, 0.3, 0.0, 0.0),
        (ModelKind.POWER, 2.0, 0.5, 1.0, 2.0),
        (ModelKind.MUSA_OKUMOTO, 1.0, 1.0, math.e - 1, 1.0),
    ],
)
def test_mean_value_trivial_points(kind, a, b, t, expected):
    assert mean_value(kind, Params(a, b), t) == pytest.approx(expected, abs=1e-15)


def test_dss_against_high_precision():
    mpmath.mp.dps = 30
    ref = 10 * (1 - 2 * mpmath.e ** -1)
    got = mean_value(ModelKind.DELAYED_S_SHAPED, Params(10.0, 0.1), 10.0)
    assert got == pytest.approx(float(ref), rel=1e-14)
    assert got == pytest.approx(2.642411, abs=5e-7)


@pytest.mark.parametrize(
    "kind, a, b, t, expected",
    [
        (ModelKind.GO_EXPONENTIAL, 1.0, 0.3, 0.0, 0.3),
        (ModelKind.DELAYED_S_SHAPED, 7.0, 0.2, 0.0, 0.0),
        (ModelKind.DELAYED_S_SHAPED, 1234.5, 0.9, 0.0, 0.0),
        (ModelKind.MUSA_OKUMOTO, 2.0, 0.5, 2.0, 0.5),
    ],
)
def test_intensity_examples(kind, a, b, t, expected):
    assert failure_intensity(kind, Params(a, b), t) == pytest.approx(expected, abs=1e-15)


def test_power_intensity_is_derivative_not_misprint():
    # a*b*t**(b-1), not a*b*t*e**(b-1)
    p = Params(3.0, 0.5)
    assert failure_intensity(ModelKind.POWER, p, 4.0) == pytest.approx(3.0 * 0.5 * 4.0**-0.5)


def test_power_intensity_singular_at_zero():
    with pytest.raises(DomainError):
        failure_intensity(ModelKind.POWER, Params(1.0, 0.5), 0.0)
    assert failure_intensity(ModelKind.POWER, Params(2.0, 1.0), 0.0) == 2.0


@pytest.mark.parametrize("bad", [math.nan, math.inf, -1.0])
def test_bad_time_rejected(bad):
    with pytest.raises(DomainError):
        mean_value(ModelKind.GO_EXPONENTIAL, Params(1.0, 1.0), bad)


@pytest.mark.parametrize("a, b", [(0.0, 1.0), (1.0, -1.0), (math.nan, 1.0), (1.0, math.inf)])
def test_bad_params_rejected(a, b):
    with pytest.raises(DomainError):
        Params(a, b)


def test_array_input_matches_scalar():
    p = Params(120.0, 0.07)
    t = np.linspace(0, 50, 11)
    for kind in ALL_KINDS:
        arr = mean_value(kind, p, t)
        assert arr.shape == t.shape
        assert [mean_value(kind, p, float(x)) for x in t] == pytest.approx(list(arr), rel=0, abs=0)


def test_extreme_exponent_does_not_raise():
    p = Params(2000.0, 1.0)
    assert mean_value(ModelKind.GO_EXPONENTIAL, p, 1e6) == 2000.0
    assert failure_intensity(ModelKind.GO_EXPONENTIAL, p, 1e6) == 0.0
    assert failure_intensity(ModelKind.DELAYED_S_SHAPED, p, 1e6) == 0.0


def test_default_bounds_match_parameter_tables():
    s = default_bounds()
    assert (s.a_min, s.a_max, s.b_min, s.b_max) == (1e-5, 2000.0, 1e-5, 1.0)
    assert s.a_min < s.a_max and s.b_min < s.b_max


def test_search_space_validation():
    with pytest.raises(DomainError):
        SearchSpace(10.0, 1.0, 0.1, 1.0)
    with pytest.raises(DomainError):
        SearchSpace(1.0, 10.0, 0.5, 0.5)


def test_parse_model_names():
    assert ModelKind.parse("G-O") is ModelKind.GO_EXPONENTIAL
    assert ModelKind.parse("EXP(G-O)") is ModelKind.GO_EXPONENTIAL
    assert ModelKind.parse("POWER") is ModelKind.POWER
    assert ModelKind.parse("dss") is ModelKind.DELAYED_S_SHAPED
    assert ModelKind.parse("M-O") is ModelKind.MUSA_OKUMOTO
    with pytest.raises(DomainError, match="go, pow, dss, mo"):
        ModelKind.parse("weibull")


# -- properties ---------------------------------------------------------------


@pytest.mark.parametrize("kind", ALL_KINDS)
@given(a=positive_a, b=positive_b)
def test_zero_at_origin(kind, a, b):
    assert mean_value(kind, Params(a, b), 0.0) == 0.0


@pytest.mark.parametrize("kind", ALL_KINDS)
@given(a=positive_a, b=positive_b, t1=times, t2=times)
def test_non_decreasing(kind, a, b, t1, t2):
    lo, hi = sorted((t1, t2))
    p = Params(a, b)
    assert mean_value(kind, p, hi) >= mean_value(kind, p, lo)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_derivative_consistency(kind):
    rng = np.random.default_rng(7)
    for _ in range(150):
        p = Params(float(rng.uniform(1, 2000)), float(rng.uniform(1e-3, 1)))
        t = float(rng.uniform(0.05, 100))
        h = 1e-5 * max(1.0, t)
        fd = (mean_value(kind, p, t + h) - mean_value(kind, p, t - h)) / (2 * h)
        lam = failure_intensity(kind, p, t)
        assert abs(lam - fd) <= 1e-6 * max(1.0, lam), (kind, p, t, lam, fd)


@pytest.mark.parametrize("kind", [ModelKind.GO_EXPONENTIAL, ModelKind.DELAYED_S_SHAPED])
@given(a=positive_a, b=positive_b, t=times)
def test_saturating_models_stay_below_a(kind, a, b, t):
    assert mean_value(kind, Params(a, b), t) <= a


@pytest.mark.parametrize("kind", [ModelKind.GO_EXPONENTIAL, ModelKind.DELAYED_S_SHAPED])
@given(a=positive_a, b=positive_b)
def test_saturation_reached(kind, a, b):
    t = 20.0 / b
    assert mean_value(kind, Params(a, b), t) > 0.999 * a


@pytest.mark.parametrize("kind", [ModelKind.POWER, ModelKind.MUSA_OKUMOTO])
@settings(max_examples=50)
@given(a=positive_a, b=st.floats(min_value=0.01, max_value=1))
def test_unbounded_models_keep_growing(kind, a, b):
    p = Params(a, b)
    t = 10.0
    base = mean_value(kind, p, t)
    # POW doubles after scaling t by 2**(1/b); M-O roughly squares its argument
    later = 2.0 ** (1 / b) * t if kind is ModelKind.POWER else (1 + b * t) ** 2 / b
    assert mean_value(kind, p, later) >= 2 * base * (1 - 1e-12)
