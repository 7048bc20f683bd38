"""Bundled offline sample: three simulated assets with GARCH volatility and correlated shocks.

The CSV shipped in ``synthfin/data`` is exactly ``simulate_sample_prices()`` with the
default arguments; ``python -m synthfin.sample_data <path>`` regenerates it.
"""

from __future__ import annotations

import datetime as dt
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .market_data import PriceSeries

SAMPLE_SEED = 20240601
SAMPLE_DAYS = 2020
SAMPLE_ASSETS = ("EQ_A", "EQ_B", "BOND_C")

_DRIFT = np.array([0.0004, 0.0003, 0.0001])
_OMEGA = np.array([2.0e-6, 3.0e-6, 2.0e-7])
_ALPHA = np.array([0.08, 0.10, 0.05])
_BETA = np.array([0.90, 0.87, 0.93])
_CORR = np.array([[1.0, 0.6, -0.2],
                  [0.6, 1.0, -0.1],
                  [-0.2, -0.1, 1.0]])


def business_days(start: dt.date, n: int) -> list[dt.date]:
    out, d = [], start
    while len(out) < n:
        if d.weekday() < 5:
            out.append(d)
        d += dt.timedelta(days=1)
    return out


def simulate_sample_prices(seed: int = SAMPLE_SEED, n_days: int = SAMPLE_DAYS) -> PriceSeries:
    rng = np.random.default_rng(seed)
    chol = np.linalg.cholesky(_CORR)
    z = rng.standard_normal((n_days - 1, 3)) @ chol.T
    s2 = _OMEGA / (1 - _ALPHA - _BETA)
    eps = np.zeros(3)
    r = np.empty((n_days - 1, 3))
    for t in range(n_days - 1):
        s2 = _OMEGA + _ALPHA * eps**2 + _BETA * s2
        eps = np.sqrt(s2) * z[t]
        r[t] = _DRIFT + eps
    log_p = np.vstack([np.zeros(3), np.cumsum(r, axis=0)]) + np.log(100.0)
    closes = np.round(np.exp(log_p), 6)
    return PriceSeries(tuple(business_days(dt.date(2016, 1, 4), n_days)), closes, SAMPLE_ASSETS)


def write_prices_csv(prices: PriceSeries, path: str | Path) -> None:
    lines = ["date," + ",".join(prices.assets)]
    for d, row in zip(prices.dates, prices.closes):
        lines.append(d.isoformat() + "," + ",".join(f"{v:.6f}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def bundled_sample_path() -> Path:
    return Path(str(resources.files("synthfin") / "data" / "sample_prices.csv"))


if __name__ == "__main__":
    write_prices_csv(simulate_sample_prices(), sys.argv[1] if len(sys.argv) > 1 else bundled_sample_path())
