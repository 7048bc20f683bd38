"""Three generator families behind one ``fit`` / ``sample`` interface.

``fit`` takes raw returns, standardizes them (parameters are stored on the model) and
trains in standardized units; ``sample`` returns standardized windows that
:meth:`SyntheticDataset.destandardized` maps back to return units.
"""

from __future__ import annotations

from ..market_data import ReturnSeries, make_windows, standardize
from .arima_garch import fit_arima_garch, sample_arima_garch
from .base import GeneratorModel, SyntheticDataset, read_synthetic_csv
from .config import FAMILIES, GeneratorConfig
from .timegan import fit_timegan, sample_timegan
from .vae import fit_vae, sample_vae

__all__ = [
    "FAMILIES", "GeneratorConfig", "GeneratorModel", "SyntheticDataset", "fit", "sample",
    "fit_arima_garch", "sample_arima_garch", "fit_vae", "sample_vae", "fit_timegan",
    "sample_timegan", "read_synthetic_csv",
]


def fit(returns: ReturnSeries, config: GeneratorConfig) -> GeneratorModel:
    config.validate()
    z, params = standardize(returns)
    if config.family == "arima_garch":
        model = fit_arima_garch(z, config)
        model.standardization = params
        return model
    windows = make_windows(z, config.window_length, config.stride, params)
    if config.family == "vae":
        return fit_vae(windows, config)
    return fit_timegan(windows, config)


def sample(model: GeneratorModel, n_windows: int, seed: int) -> SyntheticDataset:
    if model.family == "arima_garch":
        return sample_arima_garch(model, n_windows, model.config.window_length, seed)
    if model.family == "vae":
        return sample_vae(model, n_windows, seed)
    return sample_timegan(model, n_windows, seed)
