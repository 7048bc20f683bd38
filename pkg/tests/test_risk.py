import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import norm

from published_tables import RISK
from synthfin.errors import ContractError, DegenerateSeriesError, DomainError, FitError, InsufficientDataError
from synthfin.risk import GarchParams, fit_garch, garch_filter, garch_loglik, risk_report, var_es


def simulate(omega, alpha, beta, n, seed):
    r = np.random.default_rng(seed)
    z = r.standard_normal(n)
    out = np.empty(n)
    s2, prev = omega / (1 - alpha - beta), 0.0
    for t in range(n):
        s2 = omega + alpha * prev**2 + beta * s2 if t else s2
        prev = math.sqrt(s2) * z[t]
        out[t] = prev
    return out


def test_filter_collapses_without_dynamics():
    r = np.random.default_rng(0).standard_normal(50)
    s2 = garch_filter(r, GarchParams(0.3, 0.0, 0.0))
    np.testing.assert_array_equal(s2[1:], 0.3)


def test_filter_long_run_mean():
    r = simulate(0.1, 0.2, 0.7, 10**5, seed=1)
    p = GarchParams(0.1, 0.2, 0.7)
    assert p.unconditional_variance == pytest.approx(1.0)
    assert abs(garch_filter(r, p).mean() - 1.0) < 0.05


def test_filter_zero_returns_geometric():
    p = GarchParams(0.1, 0.2, 0.7)
    s2 = garch_filter(np.zeros(60), p, sigma0_sq=2.0)
    t = np.arange(60)
    limit = 0.1 / 0.3
    np.testing.assert_allclose(s2, limit + 0.7**t * (2.0 - limit), rtol=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-8, 10), st.floats(0, 0.5), st.floats(0, 0.49), st.integers(0, 10**6))
def test_filter_positive(omega, alpha, beta, seed):
    r = np.random.default_rng(seed).standard_normal(100) * 5
    assert np.all(garch_filter(r, GarchParams(omega, alpha, beta)) > 0)


def test_invalid_params():
    with pytest.raises(DomainError):
        GarchParams(0.1, 0.5, 0.5).validate()
    with pytest.raises(DomainError):
        GarchParams(0.0, 0.1, 0.5).validate()


def test_iid_fit_is_flat_or_close_to_constant_variance():
    r = np.random.default_rng(2).standard_normal(20000)
    p = fit_garch(r)
    mu, var = r.mean(), r.var()
    ll_const = float(np.sum(norm.logpdf(r, mu, math.sqrt(var))))
    assert p.alpha + p.beta < 0.2 or garch_loglik(r, p) - ll_const < 2.0


def test_fit_never_worse_than_start():
    r = simulate(0.05, 0.1, 0.85, 3000, seed=3)
    p = fit_garch(r)
    mu = r.mean()
    var = np.mean((r - mu) ** 2)
    start = GarchParams(var * 0.05, 0.05, 0.90, mu)
    assert garch_loglik(r, p) >= garch_loglik(r, start)


def test_fit_preconditions():
    with pytest.raises(InsufficientDataError):
        fit_garch(np.random.default_rng(0).standard_normal(10))
    with pytest.raises(DegenerateSeriesError):
        fit_garch(np.full(500, 0.01))


def test_fit_error_carries_trace():
    r = simulate(0.05, 0.1, 0.85, 2000, seed=4)
    with pytest.raises(FitError) as exc:
        fit_garch(r, max_iter=5)
    assert exc.value.trace and exc.value.last_iterate is not None


def test_var_es_standard_normal():
    var, es = var_es(0.0, 1.0, 0.95)
    assert var == pytest.approx(-1.6449, abs=1e-4)
    assert es == pytest.approx(-2.0627, abs=1e-4)


def test_var_es_published_scale():
    var, es = var_es(0.0, 0.0127, 0.95)
    assert var == pytest.approx(-0.0209, abs=5e-5)
    assert es == pytest.approx(-0.0262, abs=5e-5)
    # the published real-data row is of the same order
    _, p_var, p_es = RISK["Real Data"]
    assert abs(var - p_var) < 0.002 and abs(es - p_es) < 0.003


def test_var_es_contract():
    for conf in (0.5, 1.0, 0.3):
        with pytest.raises(ContractError):
            var_es(0.0, 1.0, conf)
    with pytest.raises(ContractError):
        var_es(0.0, 0.0, 0.95)


@settings(max_examples=200, deadline=None)
@given(st.floats(-0.1, 0.1), st.floats(1e-4, 1.0), st.floats(0.51, 0.999), st.floats(1.01, 3.0))
def test_var_es_monotone_in_sigma(mu, s, q, k):
    v1, e1 = var_es(mu, s, q)
    v2, e2 = var_es(mu, k * s, q)
    assert e1 < v1 and v2 < v1 and e2 < e1


def test_risk_report_volatility_scale():
    r = np.random.default_rng(5).normal(0, 0.0127, 5000)
    rep = risk_report(r)
    assert abs(rep.volatility - 0.0127) < 0.001


def test_risk_report_scale_equivariance():
    r = simulate(0.05, 0.1, 0.85, 3000, seed=6) * 0.01
    r = r - r.mean()
    a, b = risk_report(r), risk_report(2 * r)
    assert b.volatility == pytest.approx(2 * a.volatility, rel=1e-6)
    assert b.var == pytest.approx(2 * a.var, rel=1e-6)
    assert b.es == pytest.approx(2 * a.es, rel=1e-6)
