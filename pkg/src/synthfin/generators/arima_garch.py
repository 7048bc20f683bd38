"""ARMA(1,1) mean with GARCH(1,1) innovations, one equation per asset.

Cross-asset dependence is a constant correlation of the standardized innovations.
"""

from __future__ import annotations

import numpy as np
from scipy import optimize, signal

from ..errors import DegenerateSeriesError, FitError, InsufficientDataError
from ..market_data import ReturnSeries, WindowSet
from ..risk import GarchParams, fit_garch, garch_filter, garch_loglik
from .base import GeneratorModel, SyntheticDataset
from .config import GeneratorConfig

MIN_LENGTH = 250
_BOUND = 0.99


def arma_residuals(x: np.ndarray, c: float, phi: float, theta: float) -> np.ndarray:
    """e_t = x_t - c - phi x_{t-1} - theta e_{t-1} for t >= 1; e_0 = x_0 - c / (1 - phi)."""
    drive = np.empty_like(x)
    drive[0] = x[0] - c / (1.0 - phi)
    drive[1:] = x[1:] - c - phi * x[:-1]
    return signal.lfilter([1.0], [1.0, theta], drive)


def fit_arma(x: np.ndarray, ar: bool = True, ma: bool = True) -> tuple[float, float, float]:
    """Conditional least squares for (c, phi, theta), both coefficients kept inside (-1, 1)."""
    n = x.size
    mean = float(x.mean())

    def unpack(v):
        c = v[0]
        phi = _BOUND * np.tanh(v[1]) if ar else 0.0
        theta = _BOUND * np.tanh(v[2]) if ma else 0.0
        return c, phi, theta

    def sse(v):
        c, phi, theta = unpack(v)
        e = arma_residuals(x, c, phi, theta)
        return float(e @ e) / n

    if not ar and not ma:
        return mean, 0.0, 0.0
    d = x - mean
    phi0 = float(np.clip((d[:-1] @ d[1:]) / (d @ d), -0.9, 0.9)) if ar else 0.0
    v0 = np.array([mean * (1.0 - phi0), np.arctanh(phi0 / _BOUND), 0.0])
    res = optimize.minimize(sse, v0, method="Nelder-Mead",
                            options={"maxiter": 4000, "xatol": 1e-8, "fatol": 1e-12})
    if not res.success:
        raise FitError(f"ARMA least squares did not converge: {res.message}", last_iterate=unpack(res.x))
    c, phi, theta = unpack(res.x)
    return float(c), float(phi), float(theta)


def select_arma(x: np.ndarray, ar: bool = True, ma: bool = True) -> tuple[float, float, float]:
    """CLS fit of the configured ARMA order, reduced to a nested sub-model by BIC.

    ARMA(1,1) is not identified when phi = -theta (white noise lies on a whole ridge of
    equal fit), so coefficients the data do not support are pinned to zero.
    """
    n = x.size
    best, best_bic = None, np.inf
    for use_ar, use_ma in ((False, False), (True, False), (False, True), (True, True)):
        if (use_ar and not ar) or (use_ma and not ma):
            continue
        c, phi, theta = fit_arma(x, use_ar, use_ma)
        e = arma_residuals(x, c, phi, theta)
        bic = n * np.log(e @ e / n) + (1 + use_ar + use_ma) * np.log(n)
        if bic < best_bic:
            best, best_bic = (c, phi, theta), bic
    return best


def fit_arima_garch(returns: ReturnSeries, config: GeneratorConfig) -> GeneratorModel:
    x = returns.values
    if x.shape[0] < MIN_LENGTH:
        raise InsufficientDataError(f"ARIMA-GARCH needs at least {MIN_LENGTH} observations, got {x.shape[0]}")
    if np.any(np.ptp(x, axis=0) == 0):
        raise DegenerateSeriesError("constant series cannot be modelled")
    equations, shocks, log = [], [], []
    for j in range(x.shape[1]):
        c, phi, theta = select_arma(x[:, j], ar=config.ar_order > 0, ma=config.ma_order > 0)
        e = arma_residuals(x[:, j], c, phi, theta)
        g = fit_garch(e)
        log.append({"asset": returns.assets[j], "arma_mse": float(e @ e) / e.size,
                    "garch_loglik": garch_loglik(e, g)})
        shocks.append((e - g.mu) / np.sqrt(garch_filter(e, g)))
        equations.append({"c": c, "phi": phi, "theta": theta, "garch": g.to_dict()})
    z = np.column_stack(shocks)
    corr = np.corrcoef(z, rowvar=False).reshape(x.shape[1], x.shape[1]) if x.shape[1] > 1 else np.ones((1, 1))
    params = {"equations": equations, "correlation": corr.tolist()}
    return GeneratorModel(config, params, log, None, returns.assets)


def sample_arima_garch(model: GeneratorModel, n_windows: int, T: int | None = None,
                       seed: int = 0) -> SyntheticDataset:
    """Simulate ``n_windows`` independent paths, each after ``burn_in`` discarded steps."""
    T = model.config.window_length if T is None else T
    burn = model.config.burn_in
    eqs = model.parameters["equations"]
    k = len(eqs)
    corr = np.asarray(model.parameters["correlation"], dtype=float)
    chol = np.linalg.cholesky(corr + 1e-12 * np.eye(k))
    rng = np.random.default_rng(seed)
    steps = burn + T
    z = rng.standard_normal((steps, n_windows, k)) @ chol.T

    c = np.array([e["c"] for e in eqs])
    phi = np.array([e["phi"] for e in eqs])
    theta = np.array([e["theta"] for e in eqs])
    g = [GarchParams(**e["garch"]) for e in eqs]
    omega = np.array([p.omega for p in g])
    alpha = np.array([p.alpha for p in g])
    beta = np.array([p.beta for p in g])
    gmu = np.array([p.mu for p in g])

    x_prev = np.broadcast_to(c / (1.0 - phi), (n_windows, k)).copy()
    e_prev = np.broadcast_to(gmu, (n_windows, k)).copy()
    s2 = np.broadcast_to(omega / (1.0 - alpha - beta), (n_windows, k)).copy()
    out = np.empty((n_windows, T, k))
    for t in range(steps):
        s2 = omega + alpha * (e_prev - gmu) ** 2 + beta * s2 if t > 0 else s2
        e = gmu + np.sqrt(s2) * z[t]
        x = c + phi * x_prev + theta * e_prev + e
        if t >= burn:
            out[:, t - burn] = x
        x_prev, e_prev = x, e
    ws = WindowSet(T, out, model.standardization, model.assets)
    prov = {"family": model.family, "seed": int(seed), "n_windows": int(n_windows),
            "config": model.config.to_dict()}
    return SyntheticDataset(ws, prov, model.standardization)
