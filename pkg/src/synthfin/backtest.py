"""Rolling-window backtest: estimate on a training span, hold the weights over the next test span."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import DegenerateSeriesError, DomainError, InsufficientDataError
from .market_data import ReturnSeries
from .portfolio import MIN_VARIANCE, estimate_moments, solve_long_only, solve_mean_variance

TRADING_DAYS = 252


@dataclass(frozen=True)
class BacktestConfig:
    train_span: int = 1260
    test_span: int = 126
    risk_free_rate: float = 0.0
    target_return: float | str = MIN_VARIANCE
    long_only: bool = False
    annualize: bool = False

    def validate(self, n_assets: int = 1) -> None:
        if self.train_span <= 0 or self.test_span <= 0:
            raise DomainError("train_span and test_span must be positive")
        if self.train_span <= n_assets + 2:
            raise DomainError(f"train_span {self.train_span} must exceed n_assets + 2 = {n_assets + 2}")
        if isinstance(self.target_return, str) and self.target_return != MIN_VARIANCE:
            raise DomainError(f"target_return must be a number or {MIN_VARIANCE!r}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class WindowRecord:
    index: int
    train_start: int
    train_stop: int
    test_start: int
    test_stop: int
    weights: list[float]
    returns: list[float]

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class BacktestReport:
    windows: list[WindowRecord]
    sharpe: float
    sortino: float
    max_drawdown: float
    range_drawdown: float
    config: BacktestConfig
    assets: tuple[str, ...] = field(default=())

    @property
    def path(self) -> np.ndarray:
        return np.concatenate([np.asarray(w.returns) for w in self.windows])

    def to_dict(self) -> dict:
        return {"windows": [w.to_dict() for w in self.windows], "sharpe": self.sharpe,
                "sortino": self.sortino, "max_drawdown": self.max_drawdown,
                "range_drawdown": self.range_drawdown, "config": self.config.to_dict(),
                "assets": list(self.assets)}


def window_count(total: int, train_span: int, test_span: int) -> int:
    return max((total - train_span) // test_span, 0)


def sharpe(excess_returns) -> float:
    x = np.asarray(excess_returns, dtype=float)
    if x.size < 2:
        raise InsufficientDataError("Sharpe ratio needs at least two returns")
    sd = x.std(ddof=1)
    if np.ptp(x) == 0 or not sd > 0:
        raise DegenerateSeriesError("Sharpe ratio undefined for zero-volatility returns")
    return float(x.mean() / sd)


def sortino(excess_returns) -> float:
    x = np.asarray(excess_returns, dtype=float)
    if x.size == 0 or not np.any(x < 0):
        raise DegenerateSeriesError("Sortino ratio undefined without downside observations")
    downside = math.sqrt(np.mean(np.minimum(x, 0.0) ** 2))
    return float(x.mean() / downside)


def max_drawdown(values) -> tuple[float, float]:
    """(running-peak drawdown, (max P - min P) / max P) of a positive value path."""
    p = np.asarray(values, dtype=float)
    if p.size < 2:
        raise InsufficientDataError("drawdown needs at least two values")
    if np.any(p <= 0) or not np.all(np.isfinite(p)):
        raise DomainError("drawdown needs strictly positive values")
    peak = np.maximum.accumulate(p)
    running = float(np.max((peak - p) / peak))
    literal = float((p.max() - p.min()) / p.max())
    return running, literal


def _fit_weights(train: np.ndarray, config: BacktestConfig) -> np.ndarray:
    if train.shape[1] == 1:
        return np.ones(1)
    moments = estimate_moments(train)
    target = None if config.target_return == MIN_VARIANCE else float(config.target_return)
    solver = solve_long_only if config.long_only else solve_mean_variance
    return solver(moments, target).weights


def synthetic_training_returns(model, n_obs: int, seed: int) -> np.ndarray:
    """Draw enough synthetic windows to cover ``n_obs`` days, in raw return units."""
    from .generators import sample

    T = model.config.window_length
    n_windows = -(-n_obs // T)
    ds = sample(model, n_windows, seed)
    return ds.destandardized_values()[:n_obs]


def run_backtest(train_source, test_returns: ReturnSeries, config: BacktestConfig,
                 seed: int = 0) -> BacktestReport:
    """Roll over ``test_returns``.

    ``train_source`` is ``"real"``, a GeneratorConfig (refit on every training span) or a
    fitted GeneratorModel (reused for every window). Windows are independent, so results
    do not depend on evaluation order.
    """
    from .generators import GeneratorConfig, GeneratorModel, fit

    x = test_returns.values
    n_total, n_assets = x.shape
    config.validate(n_assets)
    count = window_count(n_total, config.train_span, config.test_span)
    if count == 0:
        raise InsufficientDataError(
            f"{n_total} observations leave no test window after a {config.train_span}-day train span")

    records: list[WindowRecord] = []
    for k in range(count):
        t0 = k * config.test_span
        t1 = t0 + config.train_span
        t2 = t1 + config.test_span
        train = x[t0:t1]
        if isinstance(train_source, str):
            if train_source != "real":
                raise DomainError(f"unknown train source {train_source!r}")
            train_data = train
        elif isinstance(train_source, GeneratorModel):
            train_data = synthetic_training_returns(train_source, config.train_span, seed + k)
        elif isinstance(train_source, GeneratorConfig):
            model = fit(test_returns.slice(t0, t1), train_source.replace(seed=train_source.seed + k))
            train_data = synthetic_training_returns(model, config.train_span, seed + k)
        else:
            raise DomainError(f"unsupported train source {type(train_source).__name__}")
        w = _fit_weights(train_data, config)
        port = x[t1:t2] @ w
        records.append(WindowRecord(k, t0, t1, t1, t2, w.tolist(), port.tolist()))

    path = np.concatenate([np.asarray(r.returns) for r in records])
    excess = path - config.risk_free_rate
    scale = math.sqrt(TRADING_DAYS) if config.annualize else 1.0
    wealth = np.concatenate([[1.0], np.cumprod(1.0 + path)])
    mdd, range_mdd = max_drawdown(wealth)
    return BacktestReport(records, scale * sharpe(excess), scale * sortino(excess), mdd, range_mdd,
                          config, test_returns.assets)
