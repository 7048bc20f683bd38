from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from ..errors import ConfigError

FAMILIES = ("arima_garch", "vae", "timegan")

# hidden / latent / lr / batch / epochs per family
_DEFAULTS = {
    "timegan": dict(hidden_size=24, latent_dim=8, learning_rate=0.001, batch_size=128, epochs=100),
    "vae": dict(hidden_size=32, latent_dim=16, learning_rate=0.001, batch_size=128, epochs=150),
    "arima_garch": dict(hidden_size=0, latent_dim=0, learning_rate=0.0, batch_size=0, epochs=0),
}


@dataclass(frozen=True)
class GeneratorConfig:
    family: str
    window_length: int = 20
    hidden_size: int = 0
    latent_dim: int = 0
    learning_rate: float = 0.001
    batch_size: int = 128
    epochs: int = 100
    seed: int = 0
    stride: int = 1
    # arima_garch
    ar_order: int = 1
    ma_order: int = 1
    burn_in: int = 500
    # vae
    kl_weight: float = 1.0
    # timegan
    phase_split: tuple[float, float, float] = (0.5, 0.25, 0.25)
    gamma: float = 1.0
    supervised_weight: float = 10.0
    moment_weight: float = 10.0
    generator_steps: int = 2
    d_loss_threshold: float = 0.15
    collapse_patience: int = 20

    @classmethod
    def default(cls, family: str, **overrides) -> "GeneratorConfig":
        if family not in FAMILIES:
            raise ConfigError("family", f"unknown generator family {family!r}; expected one of {FAMILIES}")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(overrides) - known
        if unknown:
            raise ConfigError("generator", f"unknown fields {sorted(unknown)}")
        if "phase_split" in overrides:
            overrides["phase_split"] = tuple(overrides["phase_split"])
        cfg = cls(family=family, **{**_DEFAULTS[family], **overrides})
        cfg.validate()
        return cfg

    def replace(self, **changes) -> "GeneratorConfig":
        return dataclasses.replace(self, **changes)

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise ConfigError("family", f"unknown generator family {self.family!r}")
        if self.window_length < 2:
            raise ConfigError("window_length", "must be at least 2")
        if self.stride < 1:
            raise ConfigError("stride", "must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "must be a 64-bit unsigned integer")
        if self.family == "arima_garch":
            if (self.ar_order, self.ma_order) not in {(0, 0), (1, 0), (0, 1), (1, 1)}:
                raise ConfigError("ar_order", "ARMA orders above (1,1) are not supported")
            if self.burn_in < 0:
                raise ConfigError("burn_in", "must be non-negative")
            return
        for name in ("hidden_size", "latent_dim", "batch_size", "epochs"):
            if getattr(self, name) <= 0:
                raise ConfigError(name, "must be positive")
        if not self.learning_rate > 0:
            raise ConfigError("learning_rate", "must be positive")
        if len(self.phase_split) != 3 or any(p < 0 for p in self.phase_split) or sum(self.phase_split) <= 0:
            raise ConfigError("phase_split", "must be three non-negative fractions")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["phase_split"] = list(self.phase_split)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorConfig":
        d = dict(d)
        family = d.pop("family")
        return cls.default(family, **d)
