"""``synthfin <command> --config <path> [--out <dir>] [--long-only] [--annualize] [--seed <n>]``

Exit codes: 0 success, 1 computation failure, 2 input or validation failure.
Failures print one JSON object to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from .errors import ConfigError, InputError, SynthFinError
from .pipeline import load_run_config, run_pipeline, run_robustness
from .report import render_report

EXIT_OK, EXIT_COMPUTE, EXIT_INPUT = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="synthfin", description="Synthetic financial return pipeline")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (("pipeline", "fit, generate and evaluate one seed"),
                        ("robustness", "repeat the pipeline across the configured seeds")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", help="output directory (overrides output_dir)")
        p.add_argument("--long-only", action="store_true", help="no short positions")
        p.add_argument("--annualize", action="store_true", help="annualize Sharpe and Sortino")
        p.add_argument("--seed", type=int, help="override the seed list with one seed")

    p = sub.add_parser("report", help="render tables and plot CSVs from an artifact directory")
    p.add_argument("artifact_dir", nargs="?", help="directory written by pipeline or robustness")
    p.add_argument("--config", help="config whose output_dir holds the artifacts")
    p.add_argument("--out", help="where to write CSVs and report.txt (default: artifact dir)")
    return parser


def _error(kind: str, exc: BaseException, **extra) -> None:
    payload = {"error": kind, "type": type(exc).__name__, "message": str(exc), **extra}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def _run(args) -> None:
    if args.command == "report":
        if args.artifact_dir:
            target = Path(args.artifact_dir)
        elif args.config:
            target = load_run_config(args.config).output_dir
        else:
            raise ConfigError("artifact_dir", "give an artifact directory or --config")
        print(render_report(target, args.out))
        return

    cfg = load_run_config(args.config)
    overrides = {}
    if args.long_only:
        overrides["long_only"] = True
    if args.annualize:
        overrides["annualize"] = True
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed", "must be non-negative")
        overrides["seeds"] = [args.seed]
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
        cfg.backtest_config().validate()
    if args.command == "robustness" and len(cfg.seeds) < 2:
        raise ConfigError("seeds", "robustness needs at least two seeds")
    out = Path(args.out) if args.out else cfg.output_dir
    if args.command == "pipeline":
        run_pipeline(cfg, out)
    else:
        run_robustness(cfg, out)
    print(str(out))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _run(args)
    except InputError as exc:
        _error("input", exc, **({"field": exc.field} if isinstance(exc, ConfigError) else {}))
        return EXIT_INPUT
    except (FileNotFoundError, NotADirectoryError) as exc:
        _error("input", exc, path=exc.filename)
        return EXIT_INPUT
    except SynthFinError as exc:
        _error("computation", exc)
        return EXIT_COMPUTE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
