"""Plain-text tables and plot-ready CSVs built from pipeline artifacts.

JSON artifacts hold raw units; percent formatting happens only here.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import InputError
from .market_data import read_returns_csv

MODEL_LABELS = {"arima_garch": "ARIMA-GARCH", "vae": "VAE", "timegan": "TimeGAN"}
ARTIFACTS = ("fidelity.json", "risk.json", "backtest.json", "portfolio.json", "data.json",
             "robustness.json", "summary.json")


class MissingArtifactError(InputError):
    pass


def format_table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(str(c)) for c in col) for col in zip(headers, *rows)]
    line = lambda cells: "  ".join(  # noqa: E731
        str(c).ljust(w) if i == 0 else str(c).rjust(w) for i, (c, w) in enumerate(zip(cells, widths)))
    rule = "-" * (sum(widths) + 2 * (len(widths) - 1))
    return "\n".join([line(headers), rule, *(line(r) for r in rows)])


def fidelity_table(rows: dict[str, tuple[float, float]]) -> str:
    """Model x (KS, Wasserstein); raw units, KS to 3 and W1 to 4 decimals."""
    return format_table(["Model", "KS Statistic", "Wasserstein Distance"],
                        [[m, f"{ks:.3f}", f"{w:.4f}"] for m, (ks, w) in rows.items()])


def risk_table(rows: dict[str, tuple[float, float, float]], confidence: float = 0.95) -> str:
    """Dataset x (volatility, VaR, ES), given as fractions, printed as percent."""
    c = f"{confidence:g}"
    return format_table(["Dataset", "Volatility (%)", f"VaR_{c} (%)", f"ES_{c} (%)"],
                        [[d, *(f"{100 * v:.2f}" for v in vals)] for d, vals in rows.items()])


def performance_table(rows: dict[str, tuple[float, float, float]]) -> str:
    """Training data x (Sharpe, Sortino, max drawdown as a fraction)."""
    return format_table(["Training Data", "Sharpe Ratio", "Sortino Ratio", "Max Drawdown (%)"],
                        [[d, f"{s:.2f}", f"{so:.2f}", f"{100 * dd:.1f}"]
                         for d, (s, so, dd) in rows.items()])


def weights_table(real: dict[str, float], synthetic: dict[str, float]) -> str:
    return format_table(["Asset", "Real Data Weight", "Synthetic Data Weight"],
                        [[a, f"{real[a]:.2f}", f"{synthetic[a]:.2f}"] for a in real])


def summary_stats_table(stats: dict[str, dict[str, float]]) -> str:
    """``stats`` maps mean/std/skewness/kurtosis to per-asset values."""
    assets = list(stats["mean"])
    return format_table(["Statistic", "Mean", "Std. Dev.", "Skewness", "Kurtosis"],
                        [[a, f"{stats['mean'][a]:.5f}", f"{stats['std'][a]:.4f}",
                          f"{stats['skewness'][a]:.2f}", f"{stats['kurtosis'][a]:.2f}"] for a in assets])


def _load(path: Path):
    return json.loads(path.read_text(encoding="utf-8"))


def _run_dirs(root: Path) -> list[Path]:
    dirs = [root] if any((root / a).is_file() for a in ARTIFACTS) else []
    dirs += sorted((d for d in root.glob("seed_*") if d.is_dir()),
                   key=lambda d: int(d.name.split("_", 1)[1]) if d.name.split("_", 1)[1].isdigit() else 0)
    return dirs


def _label(family: str, run: Path, root: Path) -> str:
    name = MODEL_LABELS.get(family, family)
    return name if run == root else f"{name} ({run.name})"


def _asset_suffix(asset: str, n_assets: int) -> str:
    return "" if n_assets == 1 else f" [{asset}]"


def histogram_rows(real: np.ndarray, syn: np.ndarray, bins: int = 50) -> list[list[float]]:
    edges = np.histogram_bin_edges(np.concatenate([real, syn]), bins=bins)
    h_real, _ = np.histogram(real, edges, density=True)
    h_syn, _ = np.histogram(syn, edges, density=True)
    return [[edges[i], edges[i + 1], h_real[i], h_syn[i]] for i in range(bins)]


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([format(v, ".10g") if isinstance(v, float) else v for v in r])


def _write_plot_csvs(run: Path, out: Path) -> list[str]:
    written = []
    real_p, syn_p = run / "returns.csv", run / "synthetic_returns.csv"
    if not real_p.is_file() and (run.parent / "returns.csv").is_file():
        real_p = run.parent / "returns.csv"
    if real_p.is_file() and syn_p.is_file():
        real, syn = read_returns_csv(real_p), read_returns_csv(syn_p)
        rows = []
        for j, asset in enumerate(real.assets):
            rows += [[asset, *map(float, r)] for r in histogram_rows(real.values[:, j], syn.values[:, j])]
        _write_csv(out / "histogram.csv", ["asset", "bin_left", "bin_right", "real_density",
                                           "synthetic_density"], rows)
        n = len(real)
        cum_real = np.exp(np.cumsum(real.values, axis=0)) - 1
        cum_syn = np.exp(np.cumsum(syn.values[:n], axis=0)) - 1
        header = ["t", *(f"real_{a}" for a in real.assets), *(f"synthetic_{a}" for a in real.assets)]
        rows = []
        for t in range(n):
            rows.append([t, *map(float, cum_real[t]),
                         *(map(float, cum_syn[t]) if t < len(cum_syn) else [""] * len(real.assets))])
        _write_csv(out / "cumulative_returns.csv", header, rows)
        written += ["histogram.csv", "cumulative_returns.csv"]
    if (run / "fidelity.json").is_file():
        fid = _load(run / "fidelity.json")
        _write_csv(out / "acf.csv", ["lag", "real", "synthetic"],
                   [[k + 1, float(a), float(b)] for k, (a, b) in enumerate(zip(fid["acf_real"], fid["acf_syn"]))])
        written.append("acf.csv")
    return written


def render_report(artifact_dir: str | Path, out: str | Path | None = None) -> str:
    """Render text tables for every run found under ``artifact_dir`` and write plot CSVs.

    Raises MissingArtifactError if the directory is missing or holds no artifacts.
    """
    root = Path(artifact_dir)
    if not root.is_dir():
        raise MissingArtifactError(f"artifact directory not found: {root}")
    runs = _run_dirs(root)
    if not runs:
        raise MissingArtifactError(f"no pipeline artifacts in {root}")
    out = Path(out) if out is not None else root
    out.mkdir(parents=True, exist_ok=True)

    sections = []
    data_path = root / "data.json"
    if data_path.is_file():
        sections.append(("Summary statistics of daily log-returns",
                         summary_stats_table(_load(data_path)["summary_stats"])))

    fid_rows, risk_rows, perf_rows, confidence = {}, {}, {}, 0.95
    for run in runs:
        if (run / "fidelity.json").is_file():
            fid = _load(run / "fidelity.json")
            fid_rows[_label(fid["model"], run, root)] = (fid["ks"], fid["wasserstein1"])
        if (run / "risk.json").is_file():
            risk = _load(run / "risk.json")
            label = _label(risk["model"], run, root)
            n_assets = len(risk["real"])
            for asset, r in risk["real"].items():
                confidence = r["confidence"]
                risk_rows.setdefault("Real Data" + _asset_suffix(asset, n_assets),
                                     (r["volatility"], r["var"], r["es"]))
            for asset, r in risk["synthetic"].items():
                risk_rows[label + _asset_suffix(asset, n_assets)] = (r["volatility"], r["var"], r["es"])
        if (run / "backtest.json").is_file():
            b = _load(run / "backtest.json")
            perf_rows.setdefault("Real Data", (b["real"]["sharpe"], b["real"]["sortino"],
                                               b["real"]["max_drawdown"]))
            s = b["synthetic"]
            perf_rows[_label(b["model"], run, root)] = (s["sharpe"], s["sortino"], s["max_drawdown"])
        if (run / "portfolio.json").is_file():
            p = _load(run / "portfolio.json")
            if p.get("real"):
                title = "Portfolio weights: real vs synthetic" + ("" if run == root else f" ({run.name})")
                sections.append((title, weights_table(p["real"]["weights"], p["synthetic"]["weights"])))

    if fid_rows:
        sections.insert(0 if not data_path.is_file() else 1,
                        ("Distributional similarity (lower is better)", fidelity_table(fid_rows)))
    if risk_rows:
        sections.append(("Risk metrics", risk_table(risk_rows, confidence)))
    if perf_rows:
        sections.append(("Portfolio performance by training data", performance_table(perf_rows)))

    rob = root / "robustness.json"
    if rob.is_file():
        disp = _load(rob)["dispersion"]
        sections.append(("Across-seed dispersion", format_table(
            ["Metric", "Std", "Max gap"], [[k, f"{v['std']:.4g}", f"{v['max_gap']:.4g}"] for k, v in disp.items()])))

    written = _write_plot_csvs(runs[0], out)
    text = "\n\n".join(f"{title}\n{table}" for title, table in sections)
    if written:
        text += "\n\nPlot data: " + ", ".join(written) + "\n"
    (out / "report.txt").write_text(text, encoding="utf-8")
    return text
