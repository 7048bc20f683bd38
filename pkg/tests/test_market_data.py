import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from statsmodels.tsa.stattools import adfuller

from synthfin.errors import (
    DegenerateSeriesError,
    DomainError,
    InsufficientDataError,
    MalformedInputError,
    ShapeError,
)
from synthfin.market_data import (
    ReturnSeries,
    StandardizationParams,
    adf_critical_value_5pct,
    adf_test,
    default_adf_lag,
    load_prices,
    log_returns,
    make_windows,
    read_returns_csv,
    standardize,
    summary_stats,
    write_returns_csv,
)


def _write(tmp_path, text, name="p.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_load_two_rows(tmp_path):
    p = load_prices(_write(tmp_path, "date,close\n2020-01-01,100\n2020-01-02,105\n"))
    assert len(p) == 2
    assert p.assets == ("close",)
    np.testing.assert_array_equal(p.closes[:, 0], [100, 105])


def test_negative_price_is_domain_error(tmp_path):
    with pytest.raises(DomainError):
        load_prices(_write(tmp_path, "date,close\n2020-01-01,100\n2020-01-02,-1\n"))


def test_shuffled_dates_equal_sorted(tmp_path):
    rows = [("2020-01-0%d" % d, 100 + d) for d in range(1, 8)]
    ordered = "date,close\n" + "".join(f"{d},{v}\n" for d, v in rows)
    shuffled = "date,close\n" + "".join(f"{d},{v}\n" for d, v in (rows[3], rows[0], rows[6], rows[2],
                                                                    rows[5], rows[1], rows[4]))
    a = load_prices(_write(tmp_path, ordered, "a.csv"))
    b = load_prices(_write(tmp_path, shuffled, "b.csv"))
    assert a.dates == b.dates
    np.testing.assert_array_equal(a.closes, b.closes)


@pytest.mark.parametrize("body,line", [
    ("2020-01-01,100\n2020-01-01,101\n", 3),
    ("2020-01-01,100\nnot-a-date,101\n", 3),
    ("2020-01-01,abc\n", 2),
    ("2020-01-01,100,5\n", 2),
])
def test_malformed_rows_report_line(tmp_path, body, line):
    with pytest.raises(MalformedInputError) as exc:
        load_prices(_write(tmp_path, "date,close\n" + body))
    assert exc.value.line == line


def test_multi_asset_csv(tmp_path):
    p = load_prices(_write(tmp_path, "date,A,B\n2020-01-02,1,2\n2020-01-01,2,4\n"))
    assert p.assets == ("A", "B")
    np.testing.assert_array_equal(p.closes, [[2, 4], [1, 2]])


def _returns_from_closes(tmp_path, closes):
    body = "".join(f"2020-01-{i + 1:02d},{c}\n" for i, c in enumerate(closes))
    return log_returns(load_prices(_write(tmp_path, "date,close\n" + body)))


def test_log_returns_values(tmp_path):
    assert _returns_from_closes(tmp_path, [100, 105]).values[0, 0] == pytest.approx(math.log(1.05), abs=1e-15)
    assert _returns_from_closes(tmp_path, [100, 200]).values[0, 0] == pytest.approx(0.693147, abs=1e-6)
    np.testing.assert_array_equal(_returns_from_closes(tmp_path, [100, 100, 100]).values[:, 0], [0, 0])


def test_log_returns_need_two_prices(tmp_path):
    with pytest.raises(InsufficientDataError):
        _returns_from_closes(tmp_path, [100])


def test_standardize_hand_case():
    z, params = standardize(ReturnSeries.from_array([1.0, 3.0]))
    np.testing.assert_array_equal(z.values[:, 0], [-1.0, 1.0])
    assert params.mean[0] == 2.0 and params.std[0] == 1.0


def test_standardize_idempotent():
    z, _ = standardize(ReturnSeries.from_array(np.random.default_rng(0).normal(3, 2, 500)))
    z2, p2 = standardize(z)
    np.testing.assert_allclose(z2.values, z.values, atol=1e-12)
    assert p2.mean[0] == pytest.approx(0, abs=1e-12) and p2.std[0] == pytest.approx(1, abs=1e-12)


def test_standardize_constant_is_degenerate():
    with pytest.raises(DegenerateSeriesError):
        standardize(ReturnSeries.from_array([0.1, 0.1, 0.1]))


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.integers(3, 60), elements=finite))
def test_standardize_round_trip(x):
    if np.std(x) < 1e-6 * max(1.0, np.abs(x).max()):
        return
    z, params = standardize(ReturnSeries.from_array(x))
    np.testing.assert_allclose(params.invert(z.values)[:, 0], x, atol=1e-10 * max(1, np.abs(x).max()), rtol=0)


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.integers(1, 80), elements=st.floats(-0.2, 0.2)))
def test_log_returns_invert_exp_cumsum(r):
    from synthfin.market_data import PriceSeries
    import datetime as dt

    closes = 100 * np.exp(np.concatenate([[0.0], np.cumsum(r)]))
    dates = tuple(dt.date(2000, 1, 1) + dt.timedelta(days=i) for i in range(closes.size))
    back = log_returns(PriceSeries(dates, closes[:, None], ("x",))).values[:, 0]
    np.testing.assert_allclose(back, r, atol=1e-12, rtol=0)


def test_adf_matches_statsmodels():
    r = np.random.default_rng(3)
    for x in (r.standard_normal(1000), np.cumsum(r.standard_normal(1000)), r.standard_normal(300)):
        res = adf_test(x)
        ref = adfuller(x, maxlag=default_adf_lag(x.size), autolag=None, regression="c")
        assert res.statistic == pytest.approx(ref[0], rel=1e-8)
        assert res.lag_order == ref[2]
        assert res.nobs == ref[3]
        assert res.critical_value_5pct == pytest.approx(ref[4]["5%"], abs=1e-3)


def test_adf_examples():
    r = np.random.default_rng(11)
    assert adf_test(r.standard_normal(1000)).reject_unit_root_5pct
    assert not adf_test(np.cumsum(r.standard_normal(1000))).reject_unit_root_5pct
    assert adf_test(r.standard_normal(1000), max_lag=0).statistic < -5


def test_adf_rejection_rates():
    r = np.random.default_rng(12)
    white = sum(adf_test(r.standard_normal(1000)).reject_unit_root_5pct for _ in range(100))
    walk = sum(not adf_test(np.cumsum(r.standard_normal(1000))).reject_unit_root_5pct for _ in range(100))
    assert white >= 95 and walk >= 95


def test_adf_size_matches_nominal_level():
    # random walks are rejected at about the 5% nominal rate
    r = np.random.default_rng(13)
    rejections = sum(adf_test(np.cumsum(r.standard_normal(1000))).reject_unit_root_5pct for _ in range(2000))
    assert 0.03 <= rejections / 2000 <= 0.07


def test_adf_too_short():
    with pytest.raises(InsufficientDataError):
        adf_test(np.arange(12.0), max_lag=5)


def test_adf_critical_value_large_sample():
    assert adf_critical_value_5pct(10**9) == pytest.approx(-2.86154, abs=1e-6)


@pytest.mark.parametrize("n,T,stride,count", [(5, 3, 1, 3), (5, 5, 1, 1), (100, 20, 5, 17)])
def test_window_counts(n, T, stride, count):
    ws = make_windows(np.arange(float(n)), T, stride)
    assert ws.windows.shape == (count, T, 1)
    assert count == len(range(0, n - T + 1, stride))


def test_window_equal_to_series():
    x = np.arange(5.0)
    np.testing.assert_array_equal(make_windows(x, 5).windows[0, :, 0], x)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 12), st.integers(12, 80))
def test_stride_T_partitions_prefix(T, n):
    x = np.random.default_rng(n).standard_normal(n)
    ws = make_windows(x, T, T)
    flat = ws.windows[:, :, 0].ravel()
    np.testing.assert_array_equal(flat, x[:flat.size])
    assert n - flat.size < T


def test_window_preconditions():
    with pytest.raises((ShapeError, DomainError, InsufficientDataError)):
        make_windows(np.arange(3.0), 5)
    with pytest.raises((ShapeError, DomainError)):
        make_windows(np.arange(10.0), 1)
    with pytest.raises((ShapeError, DomainError)):
        make_windows(np.arange(10.0), 3, 0)


def test_summary_stats_normal():
    s = summary_stats(np.random.default_rng(5).standard_normal(10**5))
    assert abs(s["mean"]) < 0.02 and abs(s["std"] - 1) < 0.02
    assert abs(s["skewness"]) < 0.05 and abs(s["kurtosis"] - 3) < 0.1


def test_summary_stats_two_point():
    s = summary_stats(np.tile([-1.0, 1.0], 50))
    assert s["skewness"] == 0.0
    assert s["kurtosis"] == pytest.approx(1.0)


def test_summary_stats_short():
    with pytest.raises(InsufficientDataError):
        summary_stats(np.array([1.0, 2.0, 3.0]))


def test_returns_csv_round_trip(tmp_path):
    rs = ReturnSeries.from_array(np.random.default_rng(0).standard_normal((10, 2)), ["a", "b"])
    write_returns_csv(rs, tmp_path / "r.csv")
    back = read_returns_csv(tmp_path / "r.csv")
    assert back.assets == rs.assets and back.dates == rs.dates
    np.testing.assert_array_equal(back.values, rs.values)


def test_params_dict_round_trip():
    p = StandardizationParams(np.array([0.1, 0.2]), np.array([1.0, 2.0]))
    q = StandardizationParams.from_dict(p.to_dict())
    np.testing.assert_array_equal(q.mean, p.mean)
    np.testing.assert_array_equal(q.std, p.std)
