r"""Mean-variance allocation.

Minimize w' Sigma w subject to w' mu = target and w' 1 = 1. The first-order
conditions give w = Sigma^{-1} (a mu + b 1), where (a, b) = (lambda/2, gamma/2) solves

    [mu' S mu   mu' S 1] [a]   [target]
    [1'  S mu   1'  S 1] [b] = [1     ]      with S = Sigma^{-1}.

``solve_long_only`` adds w >= 0 through a primal active-set loop.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import ContractError, InfeasibilityError, InsufficientDataError, SingularityError

MAX_CONDITION = 1e12
MIN_VARIANCE = "min-variance"


@dataclass(frozen=True)
class EstimatedMoments:
    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        sigma = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        if sigma.shape != (mu.size, mu.size):
            raise ContractError(f"sigma shape {sigma.shape} does not match mu length {mu.size}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def n_assets(self) -> int:
        return self.mu.size


@dataclass(frozen=True)
class PortfolioWeights:
    weights: np.ndarray
    target_return: float | None
    achieved_variance: float

    def to_dict(self, assets=None) -> dict:
        names = list(assets) if assets is not None else [f"asset{i}" for i in range(self.weights.size)]
        return {"weights": dict(zip(names, self.weights.tolist())),
                "target_return": self.target_return,
                "achieved_variance": self.achieved_variance}


def estimate_moments(returns) -> EstimatedMoments:
    """Sample mean and covariance (n-1 denominator) of a ``(n_obs, n_assets)`` matrix."""
    x = getattr(returns, "values", returns)
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n_obs, n_assets = x.shape
    if n_obs < n_assets + 2:
        raise InsufficientDataError(
            f"{n_obs} observations cannot estimate moments of {n_assets} assets (need {n_assets + 2})")
    sigma = np.cov(x, rowvar=False, ddof=1).reshape(n_assets, n_assets)
    return EstimatedMoments(x.mean(axis=0), 0.5 * (sigma + sigma.T))


def _factor(sigma: np.ndarray, loading: float = 0.0):
    s = sigma + loading * np.eye(sigma.shape[0]) if loading else sigma
    cond = np.linalg.cond(s)
    if not np.isfinite(cond) or cond >= MAX_CONDITION:
        raise SingularityError(f"covariance condition number {cond:.3g} exceeds {MAX_CONDITION:.0e}")
    try:
        return s, linalg.cho_factor(s)
    except linalg.LinAlgError:
        raise SingularityError("covariance is not positive definite") from None


def _equality_solution(sigma: np.ndarray, mu: np.ndarray, target: float | None, cho,
                       tol: float = 1e-12) -> tuple[np.ndarray, float, float]:
    """Weights and multiplier halves (a, b); target None gives the minimum-variance portfolio."""
    ones = np.ones(mu.size)
    s_mu = linalg.cho_solve(cho, mu)
    s_one = linalg.cho_solve(cho, ones)
    A = np.array([[mu @ s_mu, mu @ s_one], [ones @ s_mu, ones @ s_one]])
    mu_constant = np.ptp(mu) <= tol * max(1.0, np.max(np.abs(mu)))
    if target is None or mu_constant:
        if target is not None and abs(target - mu[0]) > 1e-10 * max(1.0, abs(mu[0])):
            raise InfeasibilityError(
                f"all expected returns equal {mu[0]:.6g}; target {target:.6g} is unattainable")
        b = 1.0 / A[1, 1]
        return b * s_one, 0.0, b
    a, b = np.linalg.solve(A, np.array([target, 1.0]))
    return a * s_mu + b * s_one, a, b


def solve_mean_variance(moments: EstimatedMoments, target_return: float | None,
                        loading: float = 0.0) -> PortfolioWeights:
    """Closed-form weights; ``target_return=None`` selects the global minimum-variance portfolio."""
    sigma, cho = _factor(moments.sigma, loading)
    w, _, _ = _equality_solution(sigma, moments.mu, target_return, cho)
    return PortfolioWeights(w, target_return, float(max(w @ moments.sigma @ w, 0.0)))


def _kkt_residuals(sigma, mu, w, a, b) -> np.ndarray:
    # stationarity: 2 Sigma w - 2a mu - 2b 1 - nu = 0, so nu is the bound multiplier
    return 2.0 * (sigma @ w - a * mu - b)


def _solve_on_support(sigma, mu, target, free):
    idx = np.flatnonzero(free)
    sub = sigma[np.ix_(idx, idx)]
    cho = linalg.cho_factor(sub)
    w_free, a, b = _equality_solution(sub, mu[idx], target, cho)
    w = np.zeros(mu.size)
    w[idx] = w_free
    return w, a, b


def solve_long_only(moments: EstimatedMoments, target_return: float | None,
                    loading: float = 0.0, tol: float = 1e-10,
                    max_iter: int = 100) -> PortfolioWeights:
    """Long-only weights by a primal active-set loop.

    Negative weights are pinned at zero and the equality problem re-solved on the
    rest; once feasible, a pinned asset whose bound multiplier is negative is released.
    If the loop stalls, the supports are enumerated exhaustively.
    """
    sigma, cho = _factor(moments.sigma, loading)
    mu = moments.mu
    n = mu.size
    if target_return is not None and np.ptp(mu) > 0:
        if not (mu.min() - 1e-12 <= target_return <= mu.max() + 1e-12):
            raise InfeasibilityError(
                f"target {target_return:.6g} outside [{mu.min():.6g}, {mu.max():.6g}] with w >= 0")

    w, a, b = _equality_solution(sigma, mu, target_return, cho)
    if np.all(w >= -tol):
        w = np.clip(w, 0.0, None)
        return PortfolioWeights(w, target_return, float(w @ moments.sigma @ w))

    free = np.ones(n, dtype=bool)
    for _ in range(max_iter):
        try:
            w, a, b = _solve_on_support(sigma, mu, target_return, free)
        except (InfeasibilityError, np.linalg.LinAlgError):
            break
        neg = free & (w < -tol)
        if neg.any():
            free &= ~neg
            if not free.any():
                break
            continue
        nu = _kkt_residuals(sigma, mu, w, a, b)
        pinned = ~free
        if not pinned.any() or nu[pinned].min() >= -1e-8:
            w = np.clip(w, 0.0, None)
            return PortfolioWeights(w, target_return, float(w @ moments.sigma @ w))
        release = np.flatnonzero(pinned)[np.argmin(nu[pinned])]
        free[release] = True

    w = _enumerate_supports(sigma, mu, target_return, tol)
    return PortfolioWeights(w, target_return, float(w @ moments.sigma @ w))


def _enumerate_supports(sigma, mu, target, tol) -> np.ndarray:
    n = mu.size
    if n > 16:
        raise InfeasibilityError("active-set loop failed and support enumeration is too large")
    best, best_var = None, np.inf
    for k in range(1, n + 1):
        for support in itertools.combinations(range(n), k):
            free = np.zeros(n, dtype=bool)
            free[list(support)] = True
            try:
                w, _, _ = _solve_on_support(sigma, mu, target, free)
            except (InfeasibilityError, np.linalg.LinAlgError, linalg.LinAlgError):
                continue
            if np.all(w >= -tol):
                var = w @ sigma @ w
                if var < best_var:
                    best, best_var = np.clip(w, 0.0, None), var
    if best is None:
        raise InfeasibilityError("no long-only portfolio meets the constraints")
    return best


def compare_allocations(w_real, w_syn) -> dict:
    a = np.asarray(getattr(w_real, "weights", w_real), dtype=float)
    b = np.asarray(getattr(w_syn, "weights", w_syn), dtype=float)
    if a.shape != b.shape:
        raise ContractError(f"weight vectors differ in length: {a.size} vs {b.size}")
    gaps = np.abs(a - b)
    return {"gaps": gaps.tolist(), "max_gap": float(gaps.max(initial=0.0))}
