"""Distributional and temporal similarity between real and synthetic return windows."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, InsufficientDataError
from .market_data import WindowSet, summary_stats

MOMENTS = ("mean", "std", "skewness", "kurtosis")


@dataclass(frozen=True)
class FidelityReport:
    ks: float
    wasserstein1: float
    acf_real: np.ndarray
    acf_syn: np.ndarray
    acf_max_abs_gap: float
    dtw_mean: float
    moment_gaps: dict[str, float]
    moments_real: dict[str, float]
    moments_syn: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "ks": self.ks,
            "wasserstein1": self.wasserstein1,
            "acf_real": self.acf_real.tolist(),
            "acf_syn": self.acf_syn.tolist(),
            "acf_max_abs_gap": self.acf_max_abs_gap,
            "dtw_mean": self.dtw_mean,
            "moment_gaps": dict(self.moment_gaps),
            "moments_real": dict(self.moments_real),
            "moments_syn": dict(self.moments_syn),
        }


def _sample(x, name: str) -> np.ndarray:
    a = np.asarray(x, dtype=float).ravel()
    if a.size == 0:
        raise ContractError(f"{name} sample is empty")
    return a


def ks_statistic(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|."""
    a = np.sort(_sample(a, "first"))
    b = np.sort(_sample(b, "second"))
    pooled = np.concatenate([a, b])
    # integer counts keep the difference exact; one division at the end
    ca = np.searchsorted(a, pooled, side="right").astype(np.int64) * b.size
    cb = np.searchsorted(b, pooled, side="right").astype(np.int64) * a.size
    return float(np.max(np.abs(ca - cb)) / (a.size * b.size))


def wasserstein1(a, b) -> float:
    """Integral of |F_a - F_b| over the real line, evaluated between pooled breakpoints."""
    a = np.sort(_sample(a, "first"))
    b = np.sort(_sample(b, "second"))
    pooled = np.sort(np.concatenate([a, b]))
    widths = np.diff(pooled)
    left = pooled[:-1]
    fa = np.searchsorted(a, left, side="right") / a.size
    fb = np.searchsorted(b, left, side="right") / b.size
    return float(np.sum(np.abs(fa - fb) * widths))


def acf(series, max_lag: int) -> np.ndarray:
    """Biased sample autocorrelation for lags 0..max_lag (lag 0 is exactly 1)."""
    x = np.asarray(series, dtype=float).ravel()
    n = x.size
    if max_lag < 0:
        raise ContractError("max_lag must be non-negative")
    if n <= max_lag + 1:
        raise InsufficientDataError(f"series of length {n} too short for {max_lag} lags")
    d = x - x.mean()
    denom = d @ d
    out = np.empty(max_lag + 1)
    out[0] = 1.0
    if denom == 0:
        out[1:] = 0.0
        return out
    for k in range(1, max_lag + 1):
        out[k] = (d[:-k] @ d[k:]) / denom
    return out


def pooled_acf(windows, max_lag: int) -> np.ndarray:
    """Autocorrelation pooled over many short windows.

    Uses the global mean and variance and averages lag products only within windows,
    which avoids the strong small-sample bias of per-window estimates at short T.
    """
    w = np.asarray(getattr(windows, "windows", windows), dtype=float)
    if w.ndim == 2:
        w = w[:, :, None]
    T = w.shape[1]
    if T <= max_lag + 1:
        raise InsufficientDataError(f"windows of length {T} too short for {max_lag} lags")
    d = w - w.mean(axis=(0, 1), keepdims=True)
    var = np.mean(d * d, axis=(0, 1))
    out = np.empty((max_lag + 1, w.shape[2]))
    out[0] = 1.0
    for k in range(1, max_lag + 1):
        out[k] = np.mean(d[:, :-k] * d[:, k:], axis=(0, 1)) / var
    return out.mean(axis=1)


def dtw(x, y) -> float:
    """DTW distance with |x_i - y_j| local cost, anchored at both ends, steps (1,0),(0,1),(1,1)."""
    x = _sample(x, "first")
    y = _sample(y, "second")
    n, m = x.size, y.size
    cost = np.abs(x[:, None] - y[None, :])
    D = np.full((n + 1, m + 1), np.inf)
    D[0, 0] = 0.0
    for i in range(1, n + 1):
        row_prev = D[i - 1]
        row = D[i]
        c = cost[i - 1]
        for j in range(1, m + 1):
            best = row_prev[j - 1]
            if row_prev[j] < best:
                best = row_prev[j]
            if row[j - 1] < best:
                best = row[j - 1]
            row[j] = c[j - 1] + best
    return float(D[n, m])


def _mean_window_acf(w: np.ndarray, max_lag: int) -> np.ndarray:
    return np.mean([acf(w[i, :, f], max_lag)
                    for i in range(w.shape[0]) for f in range(w.shape[2])], axis=0)


def fidelity_report(real: WindowSet, syn: WindowSet, max_lag: int = 5, dtw_pairs: int = 100,
                    seed: int = 0) -> FidelityReport:
    """Compare two window sets.

    KS and Wasserstein-1 use all values flattened; the ACF is averaged over windows
    (and assets); DTW is averaged over ``dtw_pairs`` seeded random real/synthetic pairs,
    matched per asset channel.
    """
    if real.window_length != syn.window_length:
        raise ContractError(
            f"window lengths differ: real {real.window_length}, synthetic {syn.window_length}")
    if real.n_features != syn.n_features:
        raise ContractError(f"asset counts differ: {real.n_features} vs {syn.n_features}")
    rw, sw = real.windows, syn.windows
    a, b = rw.ravel(), sw.ravel()

    acf_r = _mean_window_acf(rw, max_lag)
    acf_s = _mean_window_acf(sw, max_lag)

    # synthetic windows are exchangeable draws, so pairing by index is a random matching
    rng = np.random.default_rng(seed)
    ri = rng.choice(rw.shape[0], size=dtw_pairs, replace=dtw_pairs > rw.shape[0])
    si = ri % sw.shape[0]
    dists = [dtw(rw[i, :, f], sw[j, :, f])
             for i, j in zip(ri, si) for f in range(rw.shape[2])]

    m_r = summary_stats(a)
    m_s = summary_stats(b)
    return FidelityReport(
        ks=ks_statistic(a, b),
        wasserstein1=wasserstein1(a, b),
        acf_real=acf_r,
        acf_syn=acf_s,
        acf_max_abs_gap=float(np.max(np.abs(acf_r - acf_s))),
        dtw_mean=float(np.mean(dists)) if dists else 0.0,
        moment_gaps={k: abs(m_r[k] - m_s[k]) for k in MOMENTS},
        moments_real=m_r,
        moments_syn=m_s,
    )
