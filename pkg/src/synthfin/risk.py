"""GARCH(1,1) volatility by Gaussian quasi-maximum likelihood, and parametric VaR / ES."""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np
from scipy import optimize, signal
from scipy.special import expit, logit
from scipy.stats import norm

from .errors import ContractError, DegenerateSeriesError, DomainError, FitError, InsufficientDataError

MIN_FIT_LENGTH = 250
ALPHA0, BETA0 = 0.05, 0.90
_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GarchParams:
    omega: float
    alpha: float
    beta: float
    mu: float = 0.0

    def validate(self) -> None:
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise DomainError(f"omega must be positive, got {self.omega}")
        if self.alpha < 0 or self.beta < 0:
            raise DomainError("alpha and beta must be non-negative")
        if self.alpha + self.beta >= 1:
            raise DomainError(f"alpha + beta = {self.alpha + self.beta} violates stationarity")

    @property
    def unconditional_variance(self) -> float:
        return self.omega / (1.0 - self.alpha - self.beta)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RiskReport:
    volatility: float
    var: float
    es: float
    confidence: float
    garch: GarchParams

    def to_dict(self) -> dict:
        return {"volatility": self.volatility, "var": self.var, "es": self.es,
                "confidence": self.confidence, "garch": self.garch.to_dict()}


def garch_filter(returns, params: GarchParams, sigma0_sq: float | None = None) -> np.ndarray:
    """Conditional variance path for t = 0..n-1.

    sigma_0^2 is the sample variance of the returns unless given (the unconditional
    variance when that is zero); afterwards
    sigma_t^2 = omega + alpha * eps_{t-1}^2 + beta * sigma_{t-1}^2 with eps_t = r_t - mu.
    """
    params.validate()
    r = np.asarray(returns, dtype=float)
    eps = r - params.mu
    if sigma0_sq is None:
        sigma0_sq = float(np.var(r)) if r.size > 1 else 0.0
        if sigma0_sq <= 0:
            sigma0_sq = params.unconditional_variance
    n = eps.shape[0]
    if n == 0:
        return np.empty(0)
    # sigma2[t] - beta * sigma2[t-1] = omega + alpha * eps[t-1]^2, t >= 1
    drive = params.omega + params.alpha * eps[:-1] ** 2
    out = np.empty(n)
    out[0] = sigma0_sq
    if n > 1:
        out[1:], _ = signal.lfilter([1.0], [1.0, -params.beta], drive, zi=[params.beta * sigma0_sq])
    return out


def garch_loglik(returns, params: GarchParams) -> float:
    r = np.asarray(returns, dtype=float)
    s2 = garch_filter(r, params)
    eps = r - params.mu
    return float(-0.5 * np.sum(_LOG_2PI + np.log(s2) + eps**2 / s2))


def _unpack(theta: np.ndarray, mu: float) -> GarchParams:
    log_omega, u_ratio, u_persist = theta
    persistence = expit(u_persist)
    alpha = persistence * expit(u_ratio)
    return GarchParams(math.exp(log_omega), float(alpha), float(persistence - alpha), mu)


def _pack(p: GarchParams) -> np.ndarray:
    s = p.alpha + p.beta
    return np.array([math.log(p.omega), logit(p.alpha / s), logit(s)])


def fit_garch(returns, max_iter: int = 4000) -> GarchParams:
    """Gaussian quasi-MLE of GARCH(1,1); mu is fixed at the sample mean.

    Nelder-Mead runs over (log omega, logit(alpha / (alpha+beta)), logit(alpha+beta)),
    starting from variance targeting with alpha=0.05, beta=0.90. The optimum is only
    accepted if its log-likelihood is at least that of the starting point.
    """
    r = np.asarray(returns, dtype=float).ravel()
    if r.size < MIN_FIT_LENGTH:
        raise InsufficientDataError(f"GARCH fit needs at least {MIN_FIT_LENGTH} points, got {r.size}")
    if not np.all(np.isfinite(r)):
        raise DomainError("returns contain non-finite values")
    mu = float(r.mean())
    var = float(np.mean((r - mu) ** 2))
    if var <= 0 or var < 1e-14 * max(1.0, mu * mu):
        raise DegenerateSeriesError("constant series has no conditional variance to model")

    start = GarchParams(var * (1.0 - ALPHA0 - BETA0), ALPHA0, BETA0, mu)
    ll_start = garch_loglik(r, start)
    trace: list[float] = []

    def objective(theta):
        try:
            p = _unpack(theta, mu)
            if p.alpha + p.beta >= 1 or p.omega <= 0:
                return 1e300
            ll = garch_loglik(r, p)
        except (DomainError, FloatingPointError, OverflowError):
            return 1e300
        if not math.isfinite(ll):
            return 1e300
        trace.append(ll)
        return -ll

    res = optimize.minimize(
        objective, _pack(start), method="Nelder-Mead",
        options={"maxiter": max_iter, "maxfev": 2 * max_iter, "xatol": 1e-7, "fatol": 1e-9},
    )
    best = _unpack(res.x, mu)
    if not res.success:
        raise FitError(f"GARCH likelihood search did not converge: {res.message}",
                       last_iterate=best, trace=trace)
    if -res.fun < ll_start:
        return start
    return best


def var_es(mu: float, sigma: float, confidence: float) -> tuple[float, float]:
    """Gaussian VaR and ES with losses negative: tail probability a = 1 - confidence."""
    if not (0.5 < confidence < 1.0):
        raise ContractError(f"confidence must lie in (0.5, 1), got {confidence}")
    if not sigma > 0:
        raise ContractError(f"sigma must be positive, got {sigma}")
    a = 1.0 - confidence
    z = norm.ppf(a)
    var = mu + z * sigma
    es = mu - sigma * norm.pdf(z) / a
    return float(var), float(es)


def risk_report(returns, confidence: float = 0.95) -> RiskReport:
    r = np.asarray(returns, dtype=float).ravel()
    params = fit_garch(r)
    vol = float(np.mean(np.sqrt(garch_filter(r, params))))
    var, es = var_es(float(r.mean()), vol, confidence)
    return RiskReport(vol, var, es, confidence, params)
