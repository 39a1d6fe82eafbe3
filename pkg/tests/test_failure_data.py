import io
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from srgm_swarm.failure_data import (
    DatasetError,
    FailureDataset,
    SyntheticMode,
    generate_synthetic,
    load_csv,
    split_chronological,
    write_csv,
)
from srgm_swarm.models import DomainError, ModelKind, Params, mean_value


def _load(text, **kw):
    return load_csv(io.BytesIO(text.encode()), **kw)


def test_load_three_points():
    d = _load("time,failures\n1,5\n2,9\n3,12")
    assert d.points == [(1.0, 5.0), (2.0, 9.0), (3.0, 12.0)]


def test_load_accepts_crlf_and_text_streams():
    d = load_csv(io.StringIO("time,failures\r\n1,5\r\n2,9\r\n3,12\r\n"))
    assert len(d) == 3


def test_decreasing_time_rejected_with_line_number():
    with pytest.raises(DatasetError, match="line 3"):
        _load("time,failures\n2,5\n1,9\n3,12")


def test_decreasing_count_rejected():
    with pytest.raises(DatasetError, match="line 3"):
        _load("time,failures\n1,5\n2,4\n3,6")


def test_missing_header_rejected():
    with pytest.raises(DatasetError, match="line 1"):
        _load("1,5\n2,4")


def test_non_numeric_cell_named():
    with pytest.raises(DatasetError, match="line 3: non-numeric"):
        _load("time,failures\n1,5\n2,x\n3,12")


def test_too_few_rows():
    with pytest.raises(DatasetError, match="at least 3"):
        _load("time,failures\n1,5\n2,6")


@pytest.mark.parametrize(
    "n, f, n_train",
    [(10, 0.7, 7), (10, 1.0, 10), (3, 0.7, 2), (4, 0.625, 3), (10, 0.01, 1)],
)
def test_split_sizes(n, f, n_train):
    d = FailureDataset.from_points("d", [(i + 1, i) for i in range(n)])
    s = split_chronological(d, f)
    assert len(s.train) == n_train
    assert len(s.test) == n - n_train


@pytest.mark.parametrize("f", [0.0, -0.1, 1.01, math.nan])
def test_split_fraction_domain(f):
    d = FailureDataset.from_points("d", [(1, 1), (2, 2), (3, 3)])
    with pytest.raises(DomainError):
        split_chronological(d, f)


@given(n=st.integers(3, 200), f=st.floats(0.001, 1.0))
def test_split_partitions_in_order(n, f):
    d = FailureDataset.from_points("d", [(i + 1.0, 2.0 * i) for i in range(n)])
    s = split_chronological(d, f)
    assert len(s.train) >= 1
    assert len(s.train) + len(s.test) == n
    assert s.train.points + s.test.points == d.points


def test_deterministic_synthetic_matches_closed_form():
    d = generate_synthetic(ModelKind.GO_EXPONENTIAL, Params(500.0, 0.05), np.arange(1, 101))
    mpmath.mp.dps = 30
    ref = 500 * (1 - mpmath.e ** mpmath.mpf(-2.5))
    assert d.failures[49] == pytest.approx(float(ref), rel=1e-13)
    assert d.failures[49] == pytest.approx(458.96, abs=5e-3)


def test_synthetic_saturates_to_a():
    d = generate_synthetic(ModelKind.GO_EXPONENTIAL, Params(100.0, 1.0), [1, 10, 100, 1000])
    assert d.failures[-1] == 100.0


def test_poisson_is_reproducible_and_monotone():
    kw = dict(kind=ModelKind.DELAYED_S_SHAPED, p=Params(300.0, 0.1), times=np.arange(1, 51), mode=SyntheticMode.POISSON)
    d1 = generate_synthetic(seed=11, **kw)
    d2 = generate_synthetic(seed=11, **kw)
    d3 = generate_synthetic(seed=12, **kw)
    assert d1 == d2
    assert d1 != d3
    assert all(float(m).is_integer() for m in d1.failures)
    assert all(b >= a for a, b in zip(d1.failures, d1.failures[1:]))


def test_poisson_final_count_mean():
    p, t = Params(200.0, 0.05), np.arange(1, 31)
    finals = np.array(
        [generate_synthetic(ModelKind.GO_EXPONENTIAL, p, t, SyntheticMode.POISSON, seed=s).failures[-1] for s in range(1000)]
    )
    mu = mean_value(ModelKind.GO_EXPONENTIAL, p, 30.0)
    se = finals.std(ddof=1) / math.sqrt(len(finals))
    assert abs(finals.mean() - mu) <= 3 * se


def test_synthetic_rejects_bad_times():
    with pytest.raises(DomainError):
        generate_synthetic(ModelKind.GO_EXPONENTIAL, Params(1.0, 1.0), [1, 3, 2])


finite_decimals = st.decimals(min_value=0, max_value=10**6, places=6, allow_nan=False, allow_infinity=False)


@given(st.lists(finite_decimals, min_size=3, max_size=40, unique=True), st.data())
def test_csv_round_trip_bit_exact(raw_times, data):
    ts = sorted(float(x) + 1e-3 for x in raw_times)
    ts = [t for i, t in enumerate(ts) if i == 0 or t > ts[i - 1]]
    if len(ts) < 3:
        return
    counts = sorted(data.draw(st.lists(st.floats(0, 1e6), min_size=len(ts), max_size=len(ts))))
    d = FailureDataset.from_points("rt", zip(ts, counts))
    buf = io.StringIO()
    write_csv(d, buf)
    back = load_csv(io.StringIO(buf.getvalue()), name="rt")
    assert back == d


def test_synthetic_round_trip_exact(go_data):
    buf = io.StringIO()
    write_csv(go_data, buf)
    assert load_csv(io.StringIO(buf.getvalue()), name=go_data.name) == go_data
