"""Dense sequence VAE: flattened window -> hidden -> (mu_z, log var_z) -> hidden -> window."""

from __future__ import annotations

import numpy as np

from .. import autodiff as ad
from ..autodiff import Adam, Dense, Module, Tensor
from ..autodiff.nn import all_finite, load_params_json, params_to_json
from ..errors import DivergenceError, InsufficientDataError
from ..market_data import WindowSet
from .base import GeneratorModel, SyntheticDataset, check_finite
from .config import GeneratorConfig


class VAENet(Module):
    def __init__(self, input_dim: int, hidden: int, latent: int, rng: np.random.Generator):
        super().__init__()
        self.input_dim, self.latent = input_dim, latent
        self.enc = self.add_module("enc", Dense(input_dim, hidden, rng, ad.tanh))
        self.enc_mu = self.add_module("enc_mu", Dense(hidden, latent, rng))
        self.enc_logvar = self.add_module("enc_logvar", Dense(hidden, latent, rng))
        self.dec = self.add_module("dec", Dense(latent, hidden, rng, ad.tanh))
        self.dec_out = self.add_module("dec_out", Dense(hidden, input_dim, rng))

    def encode(self, x: Tensor) -> tuple[Tensor, Tensor]:
        h = self.enc(x)
        return self.enc_mu(h), self.enc_logvar(h)

    def decode(self, z: Tensor) -> Tensor:
        return self.dec_out(self.dec(z))


def kl_to_standard_normal(mu: Tensor, logvar: Tensor) -> Tensor:
    """Batch mean of KL(N(mu, exp(logvar)) || N(0, I)), summed over latent dimensions."""
    terms = ad.sub(ad.add(ad.exp(logvar), ad.square(mu)), ad.add(logvar, 1.0))
    return ad.mul(ad.mean(ad.sum_(terms, axis=1)), 0.5)


def elbo_loss(net: VAENet, x: Tensor, eps: np.ndarray, kl_weight: float = 1.0):
    """Negative ELBO under a unit-variance Gaussian decoder: per-window SSE + KL."""
    mu, logvar = net.encode(x)
    z = ad.add(mu, ad.mul(ad.exp(ad.mul(logvar, 0.5)), Tensor(eps)))
    recon = net.decode(z)
    sse = ad.mean(ad.sum_(ad.square(ad.sub(recon, x)), axis=1))
    kl = kl_to_standard_normal(mu, logvar)
    return ad.add(sse, ad.mul(kl, kl_weight)), sse, kl


def _build(config: GeneratorConfig, input_dim: int, rng=None) -> VAENet:
    rng = rng if rng is not None else np.random.default_rng(0)
    return VAENet(input_dim, config.hidden_size, config.latent_dim, rng)


def reconstruction_mse(net: VAENet, windows: np.ndarray) -> float:
    """Per-element MSE when decoding the posterior mean (no sampling noise)."""
    x = windows.reshape(windows.shape[0], -1)
    with ad.no_grad():
        mu, _ = net.encode(Tensor(x))
        return float(np.mean((net.decode(mu).data - x) ** 2))


def fit_vae(windows: WindowSet, config: GeneratorConfig) -> GeneratorModel:
    n = len(windows)
    if n < 2 * config.batch_size:
        raise InsufficientDataError(f"VAE needs at least {2 * config.batch_size} windows, got {n}")
    rng = np.random.default_rng(config.seed)
    data = windows.windows.reshape(n, -1)
    net = _build(config, data.shape[1], rng)
    opt = Adam(net.parameters(), lr=config.learning_rate)

    log = []
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        tot = rec = kls = 0.0
        batches = 0
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            eps = rng.standard_normal((idx.size, config.latent_dim))
            opt.zero_grad()
            loss, sse, kl = elbo_loss(net, Tensor(data[idx]), eps, config.kl_weight)
            check_finite(loss.item(), epoch)
            ad.backward(loss)
            opt.step()
            tot += loss.item()
            rec += sse.item()
            kls += kl.item()
            batches += 1
        if not all_finite(net.parameters()):
            raise DivergenceError("non-finite parameters", epoch=epoch)
        log.append({"epoch": epoch, "loss": tot / batches, "reconstruction": rec / batches,
                    "kl": kls / batches})

    params = params_to_json(net.named_parameters())
    params["_input_dim"] = data.shape[1]
    return GeneratorModel(config, params, log, windows.source_params, windows.assets)


def restore_vae(model: GeneratorModel) -> VAENet:
    params = dict(model.parameters)
    input_dim = params.pop("_input_dim")
    net = _build(model.config, input_dim)
    load_params_json(net.named_parameters(), params)
    return net


def decode(model: GeneratorModel, z: np.ndarray) -> np.ndarray:
    """Decode latent codes ``(n, latent_dim)`` to windows ``(n, T, n_assets)``."""
    net = restore_vae(model)
    with ad.no_grad():
        out = net.decode(Tensor(np.atleast_2d(z))).data
    return out.reshape(out.shape[0], model.config.window_length, -1)


def sample_vae(model: GeneratorModel, n_windows: int, seed: int = 0) -> SyntheticDataset:
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n_windows, model.config.latent_dim))
    w = decode(model, z)
    ws = WindowSet(model.config.window_length, w, model.standardization, model.assets)
    prov = {"family": "vae", "seed": int(seed), "n_windows": int(n_windows),
            "config": model.config.to_dict()}
    return SyntheticDataset(ws, prov, model.standardization)
