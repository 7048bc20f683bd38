"""TimeGAN at desk scale.

Five single-layer GRU networks share one latent space of width ``latent_dim``:

* embedder       data   -> latent
* recovery       latent -> data
* generator      noise  -> latent
* supervisor     latent -> next-step latent
* discriminator  latent -> per-step real/fake logit

Training runs three phases: autoencoding, supervised next-step prediction in latent
space, then joint adversarial training.
"""

from __future__ import annotations

import contextlib

import numpy as np

from .. import autodiff as ad
from ..autodiff import Adam, GRUNet, Module, Tensor
from ..autodiff.nn import all_finite, load_params_json, params_to_json
from ..errors import DivergenceError, InsufficientDataError
from ..market_data import WindowSet
from .base import GeneratorModel, SyntheticDataset, check_finite
from .config import GeneratorConfig

NETWORKS = ("embedder", "recovery", "generator", "supervisor", "discriminator")


class TimeGANNets(Module):
    def __init__(self, n_features: int, hidden: int, latent: int, rng: np.random.Generator):
        super().__init__()
        self.n_features, self.latent = n_features, latent
        self.embedder = self.add_module("embedder", GRUNet(n_features, hidden, latent, rng, ad.sigmoid))
        self.recovery = self.add_module("recovery", GRUNet(latent, hidden, n_features, rng))
        self.generator = self.add_module("generator", GRUNet(latent, hidden, latent, rng, ad.sigmoid))
        self.supervisor = self.add_module("supervisor", GRUNet(latent, hidden, latent, rng, ad.sigmoid))
        self.discriminator = self.add_module("discriminator", GRUNet(latent, hidden, 1, rng))

    def synthesize(self, noise: Tensor) -> Tensor:
        return self.recovery(self.supervisor(self.generator(noise)))


@contextlib.contextmanager
def frozen(*modules: Module):
    """Stop parameter gradients for ``modules`` while still propagating through them."""
    params = [p for m in modules for p in m.parameters()]
    for p in params:
        p.requires_grad = False
    try:
        yield
    finally:
        for p in params:
            p.requires_grad = True


def _noise(rng: np.random.Generator, n: int, T: int, dim: int) -> np.ndarray:
    return rng.uniform(0.0, 1.0, size=(n, T, dim))


def supervised_loss(nets: TimeGANNets, H: Tensor) -> Tensor:
    """Next-step prediction error of the supervisor on latent sequences."""
    T = H.shape[1]
    pred = nets.supervisor(H)
    return ad.mse(ad.slice_(H, (slice(None), slice(1, T))), ad.slice_(pred, (slice(None), slice(0, T - 1))))


def moment_loss(x_hat: Tensor, x: Tensor) -> Tensor:
    """Mean |std gap| + mean |mean gap| across the batch axis, per time step and feature."""
    m_hat, m = ad.mean(x_hat, axis=0), ad.mean(x, axis=0)
    v_hat = ad.mean(ad.square(ad.sub(x_hat, m_hat)), axis=0)
    v = ad.mean(ad.square(ad.sub(x, m)), axis=0)
    std_gap = ad.abs_(ad.sub(ad.sqrt(ad.add(v_hat, 1e-6)), ad.sqrt(ad.add(v, 1e-6))))
    return ad.add(ad.mean(std_gap), ad.mean(ad.abs_(ad.sub(m_hat, m))))


def _recon_loss(nets: TimeGANNets, X: Tensor) -> Tensor:
    return ad.mul(ad.sqrt(ad.mse(nets.recovery(nets.embedder(X)), X)), 10.0)


def _ones_like(t: Tensor) -> Tensor:
    return Tensor(np.ones(t.shape))


def _zeros_like(t: Tensor) -> Tensor:
    return Tensor(np.zeros(t.shape))


def _accuracy(real_logits: np.ndarray, fake_logits: np.ndarray) -> float:
    correct = np.sum(real_logits > 0) + np.sum(fake_logits < 0)
    return float(correct / (real_logits.size + fake_logits.size))


def phase_epochs(config: GeneratorConfig) -> tuple[int, int, int]:
    split = np.asarray(config.phase_split, dtype=float)
    split = split / split.sum()
    e1 = int(round(config.epochs * split[0]))
    e2 = int(round(config.epochs * split[1]))
    return e1, e2, max(config.epochs - e1 - e2, 0)


def fit_timegan(windows: WindowSet, config: GeneratorConfig) -> GeneratorModel:
    n, T, F = windows.windows.shape
    if n < 2 * config.batch_size:
        raise InsufficientDataError(f"TimeGAN needs at least {2 * config.batch_size} windows, got {n}")
    rng = np.random.default_rng(config.seed)
    nets = TimeGANNets(F, config.hidden_size, config.latent_dim, rng)
    data = windows.windows
    lr = config.learning_rate
    e1, e2, e3 = phase_epochs(config)

    er_params = nets.embedder.parameters() + nets.recovery.parameters()
    gs_params = nets.generator.parameters() + nets.supervisor.parameters()
    opt_ae = Adam(er_params, lr=lr)
    opt_sup = Adam(gs_params, lr=lr)
    opt_gen = Adam(gs_params, lr=lr)
    opt_emb = Adam(er_params, lr=lr)
    opt_disc = Adam(nets.discriminator.parameters(), lr=lr)

    log: list[dict] = []
    epoch = 0

    def batches():
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            yield data[order[start:start + config.batch_size]]

    def finish(record: dict):
        if not all_finite(nets.parameters()):
            raise DivergenceError("non-finite parameters", epoch=record["epoch"], phase=record["phase"])
        log.append(record)

    # phase 1: embedder/recovery autoencoding
    for _ in range(e1):
        losses = []
        for xb in batches():
            X = Tensor(xb)
            nets.zero_grad()
            with frozen(nets.generator, nets.supervisor, nets.discriminator):
                loss = _recon_loss(nets, X)
            losses.append(check_finite(loss.item(), epoch, "autoencoder"))
            ad.backward(loss)
            opt_ae.step()
        finish({"epoch": epoch, "phase": "autoencoder", "reconstruction": float(np.mean(losses))})
        epoch += 1

    # phase 2: supervised next-step loss in latent space
    for _ in range(e2):
        losses = []
        for xb in batches():
            with ad.no_grad():
                H = nets.embedder(Tensor(xb))
            nets.zero_grad()
            loss = supervised_loss(nets, Tensor(H.data))
            losses.append(check_finite(loss.item(), epoch, "supervised"))
            ad.backward(loss)
            opt_sup.step()
        finish({"epoch": epoch, "phase": "supervised", "supervised": float(np.mean(losses))})
        epoch += 1

    # phase 3: joint adversarial training
    saturated = 0
    collapse_flagged = False
    for _ in range(e3):
        g_losses, e_losses, d_losses, accs = [], [], [], []
        for xb in batches():
            X = Tensor(xb)
            b = xb.shape[0]
            for _ in range(config.generator_steps):
                Z = Tensor(_noise(rng, b, T, config.latent_dim))
                nets.zero_grad()
                with frozen(nets.embedder, nets.recovery, nets.discriminator):
                    e_hat = nets.generator(Z)
                    h_hat = nets.supervisor(e_hat)
                    x_hat = nets.recovery(h_hat)
                    y_fake = nets.discriminator(h_hat)
                    y_fake_e = nets.discriminator(e_hat)
                    H = nets.embedder(X)
                    loss_s = supervised_loss(nets, H)
                    loss = ad.add(
                        ad.add(ad.bce_with_logits(y_fake, _ones_like(y_fake)),
                               ad.mul(ad.bce_with_logits(y_fake_e, _ones_like(y_fake_e)), config.gamma)),
                        ad.add(ad.mul(ad.sqrt(loss_s), config.supervised_weight),
                               ad.mul(moment_loss(x_hat, X), config.moment_weight)))
                g_losses.append(check_finite(loss.item(), epoch, "joint"))
                ad.backward(loss)
                opt_gen.step()

            nets.zero_grad()
            with frozen(nets.generator, nets.supervisor, nets.discriminator):
                H = nets.embedder(X)
                recon = ad.mul(ad.sqrt(ad.mse(nets.recovery(H), X)), 10.0)
                e_loss = ad.add(recon, ad.mul(supervised_loss(nets, H), 0.1))
            e_losses.append(check_finite(e_loss.item(), epoch, "joint"))
            ad.backward(e_loss)
            opt_emb.step()

            Z = Tensor(_noise(rng, b, T, config.latent_dim))
            with ad.no_grad():
                H = nets.embedder(X)
                e_hat = nets.generator(Z)
                h_hat = nets.supervisor(e_hat)
            nets.zero_grad()
            y_real = nets.discriminator(Tensor(H.data))
            y_fake = nets.discriminator(Tensor(h_hat.data))
            y_fake_e = nets.discriminator(Tensor(e_hat.data))
            d_loss = ad.add(
                ad.add(ad.bce_with_logits(y_real, _ones_like(y_real)),
                       ad.bce_with_logits(y_fake, _zeros_like(y_fake))),
                ad.mul(ad.bce_with_logits(y_fake_e, _zeros_like(y_fake_e)), config.gamma))
            d_val = check_finite(d_loss.item(), epoch, "joint")
            d_losses.append(d_val)
            accs.append(_accuracy(y_real.data, np.concatenate([y_fake.data, y_fake_e.data])))
            if d_val > config.d_loss_threshold:
                ad.backward(d_loss)
                opt_disc.step()
            else:
                ad.get_tape().clear()

        acc = float(np.mean(accs))
        saturated = saturated + 1 if acc >= 1.0 else 0
        record = {"epoch": epoch, "phase": "joint", "generator": float(np.mean(g_losses)),
                  "embedder": float(np.mean(e_losses)), "discriminator": float(np.mean(d_losses)),
                  "discriminator_accuracy": acc}
        if saturated >= config.collapse_patience and not collapse_flagged:
            record["warning"] = (f"mode collapse suspected: discriminator accuracy 1.0 for "
                                 f"{saturated} consecutive epochs")
            collapse_flagged = True
        finish(record)
        epoch += 1

    params = params_to_json(nets.named_parameters())
    params["_n_features"] = F
    return GeneratorModel(config, params, log, windows.source_params, windows.assets)


def restore_timegan(model: GeneratorModel) -> TimeGANNets:
    params = dict(model.parameters)
    F = params.pop("_n_features")
    cfg = model.config
    nets = TimeGANNets(F, cfg.hidden_size, cfg.latent_dim, np.random.default_rng(0))
    load_params_json(nets.named_parameters(), params)
    return nets


def untrained_timegan(config: GeneratorConfig, n_features: int, assets=(), params=None) -> GeneratorModel:
    """Model wrapper around freshly initialized networks (same init as ``fit_timegan``)."""
    nets = TimeGANNets(n_features, config.hidden_size, config.latent_dim,
                       np.random.default_rng(config.seed))
    blob = params_to_json(nets.named_parameters())
    blob["_n_features"] = n_features
    return GeneratorModel(config, blob, [], params, tuple(assets))


def sample_timegan(model: GeneratorModel, n_windows: int, seed: int = 0) -> SyntheticDataset:
    nets = restore_timegan(model)
    T = model.config.window_length
    rng = np.random.default_rng(seed)
    with ad.no_grad():
        x = nets.synthesize(Tensor(_noise(rng, n_windows, T, model.config.latent_dim))).data
    ws = WindowSet(T, x, model.standardization, model.assets)
    prov = {"family": "timegan", "seed": int(seed), "n_windows": int(n_windows),
            "config": model.config.to_dict()}
    return SyntheticDataset(ws, prov, model.standardization)
