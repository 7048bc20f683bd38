from __future__ import annotations

import csv
import datetime as dt
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DivergenceError, MalformedInputError
from ..market_data import ReturnSeries, StandardizationParams, WindowSet
from .config import GeneratorConfig


@dataclass
class GeneratorModel:
    config: GeneratorConfig
    parameters: dict
    training_log: list[dict] = field(default_factory=list)
    standardization: StandardizationParams | None = None
    assets: tuple[str, ...] = ()

    @property
    def family(self) -> str:
        return self.config.family

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "config": self.config.to_dict(),
            "parameters": self.parameters,
            "training_log": self.training_log,
            "standardization": self.standardization.to_dict() if self.standardization else None,
            "assets": list(self.assets),
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(dumps(self.to_dict()), encoding="utf-8")

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorModel":
        std = d.get("standardization")
        return cls(GeneratorConfig.from_dict(d["config"]), d["parameters"], list(d["training_log"]),
                   StandardizationParams.from_dict(std) if std else None, tuple(d.get("assets", ())))

    @classmethod
    def load(cls, path: str | Path) -> "GeneratorModel":
        try:
            blob = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"model file is not JSON: {exc.msg}", line=exc.lineno) from None
        return cls.from_dict(blob)


@dataclass
class SyntheticDataset:
    windows: WindowSet
    provenance: dict
    params: StandardizationParams | None = None

    def __len__(self) -> int:
        return len(self.windows)

    def destandardized(self) -> WindowSet:
        w = self.windows.windows
        raw = self.params.invert(w) if self.params is not None else w.copy()
        return WindowSet(self.windows.window_length, raw, self.params, self.windows.assets)

    def destandardized_values(self) -> np.ndarray:
        """All windows concatenated in time, raw return units, shape ``(n*T, n_assets)``."""
        raw = self.destandardized().windows
        return raw.reshape(-1, raw.shape[2])

    def to_return_series(self, start: dt.date = dt.date(2000, 1, 3)) -> ReturnSeries:
        return ReturnSeries.from_array(self.destandardized_values(), self.windows.assets, start)

    def write_csv(self, path: str | Path, raw_units: bool = False) -> None:
        w = self.destandardized().windows if raw_units else self.windows.windows
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["seq_id", "t", *self.windows.assets])
            for i in range(w.shape[0]):
                for t in range(w.shape[1]):
                    out.writerow([i, t, *(format(v, ".17g") for v in w[i, t])])


def read_synthetic_csv(path: str | Path) -> WindowSet:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["seq_id", "t"]:
            raise MalformedInputError("synthetic CSV header must start with seq_id,t", line=1)
        rows: dict[int, dict[int, list[float]]] = {}
        for lineno, row in enumerate(reader, start=2):
            try:
                rows.setdefault(int(row[0]), {})[int(row[1])] = [float(v) for v in row[2:]]
            except (ValueError, IndexError):
                raise MalformedInputError("bad synthetic row", line=lineno) from None
    T = len(next(iter(rows.values())))
    arr = np.array([[rows[s][t] for t in range(T)] for s in sorted(rows)])
    return WindowSet(T, arr, None, tuple(header[2:]))


def check_finite(loss: float, epoch: int, phase: str | None = None) -> float:
    if not math.isfinite(loss):
        raise DivergenceError(f"non-finite loss {loss}", epoch=epoch, phase=phase)
    return loss


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"
