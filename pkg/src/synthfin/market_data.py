"""Price ingestion, log-returns, standardization, ADF stationarity test, rolling windows.

All series are stored as 2-D arrays of shape ``(n_obs, n_assets)`` so univariate and
multivariate data share one code path.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateSeriesError,
    DomainError,
    InsufficientDataError,
    MalformedInputError,
)

DEFAULT_WINDOW_LENGTHS = (10, 20, 60)

# MacKinnon (2010) response surface, constant / no trend, one variable:
# cv(n) = b0 + b1/n + b2/n^2 + b3/n^3
ADF_5PCT_CONSTANT = (-2.86154, -2.8903, -4.234, -40.040)


@dataclass(frozen=True)
class PriceSeries:
    dates: tuple[dt.date, ...]
    closes: np.ndarray  # (n, k)
    assets: tuple[str, ...]

    def __post_init__(self):
        closes = np.asarray(self.closes, dtype=float)
        if closes.ndim == 1:
            closes = closes[:, None]
        object.__setattr__(self, "closes", closes)
        if len(self.dates) != closes.shape[0]:
            raise DomainError("dates and closes differ in length")
        if closes.shape[1] != len(self.assets):
            raise DomainError("asset names do not match close columns")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise DomainError("dates must be strictly increasing")
        if not np.all(np.isfinite(closes)) or np.any(closes <= 0):
            raise DomainError("closes must be finite and strictly positive")

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class ReturnSeries:
    dates: tuple[dt.date, ...]
    values: np.ndarray  # (n, k)
    assets: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        object.__setattr__(self, "values", values)
        if len(self.dates) != values.shape[0]:
            raise DomainError("dates and values differ in length")
        if values.shape[1] != len(self.assets):
            raise DomainError("asset names do not match value columns")
        if not np.all(np.isfinite(values)):
            raise DomainError("returns must be finite")

    def __len__(self) -> int:
        return len(self.dates)

    @property
    def n_assets(self) -> int:
        return len(self.assets)

    def column(self, asset: str | int = 0) -> np.ndarray:
        idx = asset if isinstance(asset, int) else self.assets.index(asset)
        return self.values[:, idx]

    def slice(self, start: int, stop: int) -> "ReturnSeries":
        return ReturnSeries(self.dates[start:stop], self.values[start:stop], self.assets)

    @classmethod
    def from_array(cls, values, assets: Sequence[str] | None = None,
                   start: dt.date = dt.date(2000, 1, 3)) -> "ReturnSeries":
        """Wrap a bare array with consecutive calendar dates (for simulated data)."""
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if assets is None:
            assets = [f"asset{i}" for i in range(values.shape[1])]
        dates = tuple(start + dt.timedelta(days=i) for i in range(values.shape[0]))
        return cls(dates, values, tuple(assets))


@dataclass(frozen=True)
class StandardizationParams:
    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", np.atleast_1d(np.asarray(self.mean, dtype=float)))
        object.__setattr__(self, "std", np.atleast_1d(np.asarray(self.std, dtype=float)))
        if np.any(self.std <= 0):
            raise DegenerateSeriesError("standardization std must be positive")

    def apply(self, values: np.ndarray) -> np.ndarray:
        return (values - self.mean) / self.std

    def invert(self, values: np.ndarray) -> np.ndarray:
        return values * self.std + self.mean

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "StandardizationParams":
        return cls(np.array(d["mean"]), np.array(d["std"]))


@dataclass(frozen=True)
class WindowSet:
    """Batch of equal-length windows, shape ``(n_windows, window_length, n_assets)``."""

    window_length: int
    windows: np.ndarray
    source_params: StandardizationParams | None = None
    assets: tuple[str, ...] = field(default=())

    def __post_init__(self):
        w = np.asarray(self.windows, dtype=float)
        if w.ndim == 2:
            w = w[:, :, None]
        if w.ndim != 3 or w.shape[1] != self.window_length:
            raise DomainError(
                f"windows of shape {w.shape} do not have length {self.window_length}")
        object.__setattr__(self, "windows", w)
        if not self.assets:
            object.__setattr__(self, "assets", tuple(f"asset{i}" for i in range(w.shape[2])))

    def __len__(self) -> int:
        return self.windows.shape[0]

    @property
    def n_features(self) -> int:
        return self.windows.shape[2]


@dataclass(frozen=True)
class AdfResult:
    statistic: float
    lag_order: int
    critical_value_5pct: float
    nobs: int

    @property
    def reject_unit_root_5pct(self) -> bool:
        return self.statistic < self.critical_value_5pct

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "lag_order": self.lag_order,
            "critical_value_5pct": self.critical_value_5pct,
            "nobs": self.nobs,
            "reject_unit_root_5pct": self.reject_unit_root_5pct,
        }


def load_prices(path: str | Path) -> PriceSeries:
    """Read a ``date,close`` or ``date,<asset>,...`` CSV into a date-sorted PriceSeries.

    Raises MalformedInputError (with the offending line number) on unparsable rows and
    duplicate dates, and DomainError on non-positive prices.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedInputError("empty file", line=1) from None
        header = [h.strip() for h in header]
        if len(header) < 2 or header[0].lower() != "date":
            raise MalformedInputError("header must start with 'date'", line=1)
        assets = tuple(header[1:])
        if len(set(assets)) != len(assets):
            raise MalformedInputError("duplicate asset column", line=1)

        rows: dict[dt.date, tuple[list[float], int]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise MalformedInputError(
                    f"expected {len(header)} fields, got {len(row)}", line=lineno)
            try:
                date = dt.date.fromisoformat(row[0].strip())
            except ValueError:
                raise MalformedInputError(f"bad ISO-8601 date {row[0]!r}", line=lineno) from None
            try:
                prices = [float(c) for c in row[1:]]
            except ValueError:
                raise MalformedInputError("non-numeric price", line=lineno) from None
            for p in prices:
                if not math.isfinite(p):
                    raise MalformedInputError("non-finite price", line=lineno)
                if p <= 0:
                    raise DomainError(f"line {lineno}: non-positive price {p}")
            if date in rows:
                raise MalformedInputError(
                    f"duplicate date {date.isoformat()} (first seen on line {rows[date][1]})",
                    line=lineno)
            rows[date] = (prices, lineno)

    dates = tuple(sorted(rows))
    closes = np.array([rows[d][0] for d in dates], dtype=float).reshape(len(dates), len(assets))
    return PriceSeries(dates, closes, assets)


def log_returns(prices: PriceSeries) -> ReturnSeries:
    if len(prices) < 2:
        raise InsufficientDataError("need at least two prices for a return")
    values = np.log(prices.closes[1:] / prices.closes[:-1])
    return ReturnSeries(prices.dates[1:], values, prices.assets)


def standardize(returns: ReturnSeries) -> tuple[ReturnSeries, StandardizationParams]:
    """Zero mean, unit population std (n denominator) per asset, so (1, 3) -> (-1, 1)."""
    if len(returns) < 2:
        raise InsufficientDataError("need at least two observations to standardize")
    x = returns.values
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    if np.any(np.ptp(x, axis=0) == 0) or not np.all(np.isfinite(std)):
        raise DegenerateSeriesError("zero-variance series cannot be standardized")
    params = StandardizationParams(mean, std)
    z = params.apply(x)
    # second pass removes the O(eps) residual mean left by the first division
    z = z - z.mean(axis=0)
    z = z / z.std(axis=0)
    return ReturnSeries(returns.dates, z, returns.assets), params


def destandardize(returns: ReturnSeries, params: StandardizationParams) -> ReturnSeries:
    return ReturnSeries(returns.dates, params.invert(returns.values), returns.assets)


def default_adf_lag(n: int) -> int:
    return int(math.floor(12.0 * (n / 100.0) ** 0.25))


def adf_critical_value_5pct(nobs: int) -> float:
    b0, b1, b2, b3 = ADF_5PCT_CONSTANT
    return b0 + b1 / nobs + b2 / nobs**2 + b3 / nobs**3


def adf_test(returns, max_lag: int | None = None) -> AdfResult:
    """Augmented Dickey-Fuller test with intercept and a fixed lag order.

    Regresses Δx_t on [1, x_{t-1}, Δx_{t-1}, ..., Δx_{t-p}] by OLS and returns the
    t-statistic of the x_{t-1} coefficient. ``max_lag`` is the lag order used; ``None``
    selects floor(12 (n/100)^0.25).
    """
    x = _as_vector(returns)
    n = x.shape[0]
    p = default_adf_lag(n) if max_lag is None else int(max_lag)
    if p < 0:
        raise DomainError("lag order must be non-negative")
    if n < p + 10:
        raise InsufficientDataError(f"ADF with {p} lags needs at least {p + 10} points, got {n}")

    dx = np.diff(x)
    y = dx[p:]
    nobs = y.shape[0]
    cols = [np.ones(nobs), x[p:-1]]
    for i in range(1, p + 1):
        cols.append(dx[p - i:-i])
    X = np.column_stack(cols)

    coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        raise DegenerateSeriesError("ADF design matrix is rank deficient")
    resid = y - X @ coef
    dof = nobs - X.shape[1]
    s2 = resid @ resid / dof
    cov = s2 * np.linalg.inv(X.T @ X)
    stat = float(coef[1] / math.sqrt(cov[1, 1]))
    return AdfResult(stat, p, adf_critical_value_5pct(nobs), nobs)


def make_windows(returns: ReturnSeries | np.ndarray, T: int, stride: int = 1,
                 params: StandardizationParams | None = None) -> WindowSet:
    if T < 2:
        raise DomainError("window length must be at least 2")
    if stride < 1:
        raise DomainError("stride must be at least 1")
    if isinstance(returns, ReturnSeries):
        values, assets = returns.values, returns.assets
    else:
        values = np.asarray(returns, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        assets = ()
    n = values.shape[0]
    if n < T:
        raise InsufficientDataError(f"series of length {n} is shorter than window {T}")
    count = (n - T) // stride + 1
    starts = np.arange(count) * stride
    windows = np.stack([values[s:s + T] for s in starts])
    return WindowSet(T, windows, params, tuple(assets))


def summary_stats(returns) -> dict[str, np.ndarray | float]:
    """Mean, sample std (ddof=1), moment-ratio skewness and Pearson (non-excess) kurtosis."""
    x = returns.values if isinstance(returns, ReturnSeries) else np.asarray(returns, dtype=float)
    squeeze = x.ndim == 1
    if squeeze:
        x = x[:, None]
    if x.shape[0] < 4:
        raise InsufficientDataError("summary statistics need at least four observations")
    mean = x.mean(axis=0)
    d = x - mean
    m2 = np.mean(d**2, axis=0)
    if np.any(m2 <= 0):
        raise DegenerateSeriesError("zero-variance series has undefined skewness")
    out = {
        "mean": mean,
        "std": x.std(axis=0, ddof=1),
        "skewness": np.mean(d**3, axis=0) / m2**1.5,
        "kurtosis": np.mean(d**4, axis=0) / m2**2,
    }
    if squeeze:
        out = {k: float(v[0]) for k, v in out.items()}
    return out


def write_returns_csv(returns: ReturnSeries, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", *returns.assets])
        for d, row in zip(returns.dates, returns.values):
            w.writerow([d.isoformat(), *(format(v, ".17g") for v in row)])


def read_returns_csv(path: str | Path) -> ReturnSeries:
    """Inverse of :func:`write_returns_csv`."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "date":
            raise MalformedInputError("header must start with 'date'", line=1)
        dates, rows = [], []
        for lineno, row in enumerate(reader, start=2):
            try:
                dates.append(dt.date.fromisoformat(row[0]))
                rows.append([float(v) for v in row[1:]])
            except (ValueError, IndexError):
                raise MalformedInputError("unparsable row", line=lineno) from None
    values = np.array(rows, dtype=float).reshape(len(rows), len(header) - 1)
    return ReturnSeries(tuple(dates), values, tuple(header[1:]))


def _as_vector(returns) -> np.ndarray:
    if isinstance(returns, ReturnSeries):
        if returns.n_assets != 1:
            raise DomainError("expected a univariate series; select a column first")
        return returns.values[:, 0]
    x = np.asarray(returns, dtype=float)
    if x.ndim == 2 and x.shape[1] == 1:
        x = x[:, 0]
    if x.ndim != 1:
        raise DomainError("expected a univariate series")
    return x
