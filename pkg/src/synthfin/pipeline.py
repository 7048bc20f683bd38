"""End-to-end runs: ingest -> fit -> generate -> evaluate -> optimize -> risk -> backtest -> summary.

Every artifact is a pure function of (config, seed, input data); no timestamps or
host details are written, so reruns are byte-identical.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import backtest as bt
from .errors import ConfigError, ContractError, InputError, SynthFinError
from .fidelity import fidelity_report
from .generators import GeneratorConfig, GeneratorModel, fit, sample
from .generators.base import dumps
from .market_data import (
    ReturnSeries,
    adf_test,
    load_prices,
    log_returns,
    make_windows,
    standardize,
    summary_stats,
    write_returns_csv,
)
from .portfolio import MIN_VARIANCE, compare_allocations, estimate_moments, solve_long_only, solve_mean_variance
from .risk import risk_report
from .sample_data import bundled_sample_path

log = logging.getLogger(__name__)

_TOP_LEVEL = {"input", "generator", "window_length", "seeds", "confidence", "target_return",
              "long_only", "annualize", "backtest", "fidelity", "n_synthetic_windows",
              "adf_max_lag", "output_dir"}
_BACKTEST_KEYS = {"enabled", "train_span", "test_span", "risk_free_rate", "global_model"}
_FIDELITY_KEYS = {"max_lag", "dtw_pairs"}


@dataclass
class RunConfig:
    input_path: Path
    generator: dict
    window_length: int = 20
    seeds: list[int] = field(default_factory=lambda: [0])
    confidence: float = 0.95
    target_return: float | str = MIN_VARIANCE
    long_only: bool = False
    annualize: bool = False
    backtest: dict = field(default_factory=dict)
    fidelity: dict = field(default_factory=dict)
    n_synthetic_windows: int | None = None
    adf_max_lag: int | None = None
    output_dir: Path = Path("out")

    def generator_config(self, seed: int) -> GeneratorConfig:
        g = dict(self.generator)
        family = g.pop("family")
        return GeneratorConfig.default(family, window_length=self.window_length, seed=seed, **g)

    def backtest_config(self) -> bt.BacktestConfig:
        b = self.backtest
        return bt.BacktestConfig(
            train_span=int(b.get("train_span", 1260)),
            test_span=int(b.get("test_span", 126)),
            risk_free_rate=float(b.get("risk_free_rate", 0.0)),
            target_return=self.target_return,
            long_only=self.long_only,
            annualize=self.annualize,
        )

    def to_dict(self) -> dict:
        """Canonical form recorded in artifacts (input path stored by file name only)."""
        return {
            "input": self.input_path.name,
            "generator": self.generator,
            "window_length": self.window_length,
            "seeds": self.seeds,
            "confidence": self.confidence,
            "target_return": self.target_return,
            "long_only": self.long_only,
            "annualize": self.annualize,
            "backtest": self.backtest,
            "fidelity": self.fidelity,
            "n_synthetic_windows": self.n_synthetic_windows,
            "adf_max_lag": self.adf_max_lag,
        }


def _require(cond: bool, fld: str, msg: str) -> None:
    if not cond:
        raise ConfigError(fld, msg)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def parse_run_config(raw: dict, base_dir: Path | None = None) -> RunConfig:
    """Validate a config mapping field by field before anything is computed."""
    _require(isinstance(raw, dict), "<root>", "config must be a JSON object")
    unknown = set(raw) - _TOP_LEVEL
    _require(not unknown, "<root>", f"unknown fields {sorted(unknown)}")
    base_dir = base_dir or Path.cwd()

    inp = raw.get("input")
    if inp is None:
        input_path = bundled_sample_path()
    else:
        _require(isinstance(inp, str), "input", "must be a path string or null")
        input_path = Path(inp)
        if not input_path.is_absolute():
            input_path = base_dir / input_path
    _require(input_path.is_file(), "input", f"file not found: {input_path}")

    gen = raw.get("generator", {"family": "arima_garch"})
    _require(isinstance(gen, dict) and "family" in gen, "generator", "must be an object with a 'family'")
    T = raw.get("window_length", 20)
    _require(_is_int(T) and T >= 2, "window_length", "must be an integer >= 2")

    seeds = raw.get("seeds", [0])
    _require(isinstance(seeds, list) and len(seeds) > 0, "seeds", "must be a non-empty list")
    _require(all(_is_int(s) and 0 <= s < 2**64 for s in seeds), "seeds", "must be 64-bit unsigned integers")

    conf = raw.get("confidence", 0.95)
    _require(isinstance(conf, (int, float)) and 0.5 < conf < 1, "confidence", "must lie in (0.5, 1)")
    target = raw.get("target_return", MIN_VARIANCE)
    _require(target == MIN_VARIANCE or (isinstance(target, (int, float)) and not isinstance(target, bool)
                                         and math.isfinite(target)),
             "target_return", f"must be a number or {MIN_VARIANCE!r}")

    b = raw.get("backtest", {})
    _require(isinstance(b, dict), "backtest", "must be an object")
    bad = set(b) - _BACKTEST_KEYS
    _require(not bad, "backtest", f"unknown fields {sorted(bad)}")
    for key in ("train_span", "test_span"):
        if key in b:
            _require(_is_int(b[key]) and b[key] > 0, f"backtest.{key}", "must be a positive integer")

    f = raw.get("fidelity", {})
    _require(isinstance(f, dict) and not (set(f) - _FIDELITY_KEYS), "fidelity",
             f"must be an object with keys from {sorted(_FIDELITY_KEYS)}")
    n_syn = raw.get("n_synthetic_windows")
    _require(n_syn is None or (_is_int(n_syn) and n_syn > 0), "n_synthetic_windows",
             "must be a positive integer or null")
    adf_lag = raw.get("adf_max_lag")
    _require(adf_lag is None or (_is_int(adf_lag) and adf_lag >= 0), "adf_max_lag",
             "must be a non-negative integer or null")

    out = Path(raw.get("output_dir", "out"))
    cfg = RunConfig(input_path, dict(gen), T, list(seeds), float(conf), target,
                    bool(raw.get("long_only", False)), bool(raw.get("annualize", False)), dict(b),
                    dict(f), n_syn, adf_lag, out if out.is_absolute() else base_dir / out)
    cfg.generator_config(seeds[0])  # validates family and overrides
    cfg.backtest_config().validate()
    return cfg


def load_run_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError("--config", f"file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError("--config", f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return parse_run_config(raw, path.parent)


def _write(path: Path, obj) -> None:
    path.write_text(dumps(obj), encoding="utf-8")


def _skipped(reason: str) -> dict:
    return {"value": None, "reason": reason}


def _weights(returns: np.ndarray, cfg: RunConfig):
    if returns.shape[1] == 1:
        return None
    moments = estimate_moments(returns)
    target = None if cfg.target_return == MIN_VARIANCE else float(cfg.target_return)
    solver = solve_long_only if cfg.long_only else solve_mean_variance
    return solver(moments, target)


def evaluate_seed(cfg: RunConfig, returns: ReturnSeries, seed: int, out: Path,
                  model: GeneratorModel | None = None) -> dict:
    """Fit, sample and score one seed; writes per-stage artifacts into ``out``."""
    out.mkdir(parents=True, exist_ok=True)
    gcfg = cfg.generator_config(seed)
    T = gcfg.window_length
    if model is None:
        log.info("fitting %s (seed %d)", gcfg.family, seed)
        model = fit(returns, gcfg)
    model.save(out / "model.json")

    n_syn = cfg.n_synthetic_windows or -(-len(returns) // T)
    ds = sample(model, n_syn, seed)
    ds.write_csv(out / "synthetic.csv")
    syn_returns = ds.to_return_series(returns.dates[0])
    write_returns_csv(syn_returns, out / "synthetic_returns.csv")

    z, params = standardize(returns)
    real_windows = make_windows(z, T, stride=T, params=params)
    fid = fidelity_report(real_windows, ds.windows, max_lag=int(cfg.fidelity.get("max_lag", 5)),
                          dtw_pairs=int(cfg.fidelity.get("dtw_pairs", 100)), seed=seed)
    _write(out / "fidelity.json", {"model": gcfg.family, **fid.to_dict()})

    w_real = _weights(returns.values, cfg)
    w_syn = _weights(syn_returns.values, cfg)
    if w_real is None:
        portfolio = _skipped("single asset: weight is 1 by construction")
    else:
        portfolio = {"real": w_real.to_dict(returns.assets), "synthetic": w_syn.to_dict(returns.assets),
                     "comparison": compare_allocations(w_real, w_syn),
                     "solver": "long_only" if cfg.long_only else "closed_form"}
    _write(out / "portfolio.json", portfolio)

    risk = {"model": gcfg.family, "real": {}, "synthetic": {}}
    for j, asset in enumerate(returns.assets):
        risk["real"][asset] = risk_report(returns.values[:, j], cfg.confidence).to_dict()
        risk["synthetic"][asset] = risk_report(syn_returns.values[:, j], cfg.confidence).to_dict()
    _write(out / "risk.json", risk)

    return {"model": model, "fidelity": fid, "portfolio": portfolio, "risk": risk, "weights": (w_real, w_syn)}


def run_backtests(cfg: RunConfig, returns: ReturnSeries, seed: int, model: GeneratorModel,
                  out: Path) -> dict:
    bcfg = cfg.backtest_config()
    real = bt.run_backtest("real", returns, bcfg, seed=seed)
    source = model if cfg.backtest.get("global_model", False) else cfg.generator_config(seed)
    syn = bt.run_backtest(source, returns, bcfg, seed=seed)
    result = {"model": model.family, "real": real.to_dict(), "synthetic": syn.to_dict()}
    _write(out / "backtest.json", result)
    lines = ["t,real_trained,synthetic_trained"]
    for t, (a, b) in enumerate(zip(real.path, syn.path)):
        lines.append(f"{t},{a!r},{b!r}")
    (out / "backtest_path.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return result


def _fidelity_summary(fid) -> dict:
    return {"ks": fid.ks, "wasserstein1": fid.wasserstein1, "dtw_mean": fid.dtw_mean,
            "acf_max_abs_gap": fid.acf_max_abs_gap, "moment_gaps": fid.moment_gaps}


def _risk_summary(risk: dict) -> dict:
    return {side: {a: {k: v[k] for k in ("volatility", "var", "es")} for a, v in risk[side].items()}
            for side in ("real", "synthetic")}


def _backtest_summary(result: dict) -> dict:
    return {side: {k: result[side][k] for k in ("sharpe", "sortino", "max_drawdown", "range_drawdown")}
            for side in ("real", "synthetic")}


def _ingest(cfg: RunConfig, out: Path) -> ReturnSeries:
    prices = load_prices(cfg.input_path)
    returns = log_returns(prices)
    write_returns_csv(returns, out / "returns.csv")
    stats = summary_stats(returns)
    data = {"n_obs": len(returns), "assets": list(returns.assets),
            "summary_stats": {k: dict(zip(returns.assets, v.tolist())) for k, v in stats.items()},
            "adf": {a: adf_test(returns.column(j), cfg.adf_max_lag).to_dict()
                    for j, a in enumerate(returns.assets)}}
    _write(out / "data.json", data)
    return returns


def run_pipeline(cfg: RunConfig, out: Path | None = None, seed: int | None = None) -> dict:
    out = Path(out or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    seed = cfg.seeds[0] if seed is None else seed
    returns = _ingest(cfg, out)
    res = evaluate_seed(cfg, returns, seed, out)

    if cfg.backtest.get("enabled", True):
        try:
            backtest = _backtest_summary(run_backtests(cfg, returns, seed, res["model"], out))
        except SynthFinError as exc:
            if isinstance(exc, InputError):
                raise
            backtest = _skipped(f"backtest failed: {exc}")
    else:
        backtest = _skipped("disabled in config")

    portfolio = res["portfolio"]
    summary = {
        "config": cfg.to_dict(),
        "seed": seed,
        "model": cfg.generator["family"],
        "fidelity": _fidelity_summary(res["fidelity"]),
        "utility": {
            "portfolio": portfolio if portfolio.get("value", 0) is None else portfolio["comparison"],
            "risk": _risk_summary(res["risk"]),
            "backtest": backtest,
        },
        "robustness": _skipped("single-seed pipeline run; use the robustness command"),
    }
    _write(out / "summary.json", summary)
    return summary


def _dispersion(values: list) -> dict:
    arr = np.asarray(values, dtype=float)
    return {"values": arr.tolist(), "std": float(arr.std(axis=0).max()) if arr.ndim > 1 else float(arr.std()),
            "max_gap": float(np.max(arr.max(axis=0) - arr.min(axis=0)))}


def run_robustness(cfg: RunConfig, out: Path | None = None) -> dict:
    """Repeat fit/sample/evaluate per seed and summarize across-seed dispersion."""
    if len(cfg.seeds) < 2:
        raise ContractError("robustness needs at least two seeds")
    out = Path(out or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    returns = _ingest(cfg, out)

    per_seed, fits = [], {}
    for seed in cfg.seeds:
        seed_dir = out / f"seed_{seed}"
        res = evaluate_seed(cfg, returns, seed, seed_dir, model=fits.get(seed))
        fits[seed] = res["model"]
        per_seed.append(res)

    metrics: dict[str, dict] = {}
    for key in ("ks", "wasserstein1", "dtw_mean", "acf_max_abs_gap"):
        metrics[f"fidelity.{key}"] = _dispersion([getattr(r["fidelity"], key) for r in per_seed])
    if per_seed[0]["weights"][1] is not None:
        w = [r["weights"][1].weights for r in per_seed]
        d = _dispersion(w)
        d["std_per_asset"] = dict(zip(returns.assets, np.asarray(w).std(axis=0).tolist()))
        metrics["portfolio.synthetic_weights"] = d
    for asset in returns.assets:
        for k in ("volatility", "var", "es"):
            metrics[f"risk.{asset}.{k}"] = _dispersion([r["risk"]["synthetic"][asset][k] for r in per_seed])

    report = {
        "seeds": cfg.seeds,
        "model": cfg.generator["family"],
        "per_seed": [{"seed": s, "fidelity": _fidelity_summary(r["fidelity"]),
                      "portfolio": r["portfolio"], "risk": _risk_summary(r["risk"])}
                     for s, r in zip(cfg.seeds, per_seed)],
        "dispersion": metrics,
    }
    _write(out / "robustness.json", report)

    first = per_seed[0]
    portfolio = first["portfolio"]
    summary = {
        "config": cfg.to_dict(),
        "seed": cfg.seeds[0],
        "model": cfg.generator["family"],
        "fidelity": _fidelity_summary(first["fidelity"]),
        "utility": {
            "portfolio": portfolio if portfolio.get("value", 0) is None else portfolio["comparison"],
            "risk": _risk_summary(first["risk"]),
            "backtest": _skipped("not run by the robustness command"),
        },
        "robustness": {"seeds": cfg.seeds, "dispersion": metrics},
    }
    _write(out / "summary.json", summary)
    return report
