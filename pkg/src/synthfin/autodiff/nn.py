"""Dense layers, a GRU cell and unrolled GRU, plus parameter (de)serialization."""

from __future__ import annotations

import math
from typing import Callable, Iterable

import numpy as np

from ..errors import ShapeError
from . import tensor as ad
from .tensor import Tensor


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


class Module:
    """Owns named parameter tensors; submodules are flattened with dotted prefixes."""

    def __init__(self):
        self._params: dict[str, Tensor] = {}
        self._children: dict[str, Module] = {}

    def add_param(self, name: str, value: np.ndarray) -> Tensor:
        t = Tensor(value, requires_grad=True, name=name)
        self._params[name] = t
        return t

    def add_module(self, name: str, module: "Module") -> "Module":
        self._children[name] = module
        return module

    def named_parameters(self, prefix: str = "") -> dict[str, Tensor]:
        out = {prefix + k: v for k, v in self._params.items()}
        for cname, child in self._children.items():
            out.update(child.named_parameters(prefix + cname + "."))
        return out

    def parameters(self) -> list[Tensor]:
        return list(self.named_parameters().values())

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.grad = None


class Dense(Module):
    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator,
                 activation: Callable[[Tensor], Tensor] | None = None):
        super().__init__()
        self.in_dim, self.out_dim = in_dim, out_dim
        self.W = self.add_param("W", glorot_uniform(rng, in_dim, out_dim))
        self.b = self.add_param("b", np.zeros(out_dim))
        self.activation = activation

    def __call__(self, x: Tensor) -> Tensor:
        if x.shape[-1] != self.in_dim:
            raise ShapeError(f"Dense expects width {self.in_dim}, got shape {x.shape}")
        y = ad.add(ad.matmul(x, self.W), self.b)
        return self.activation(y) if self.activation is not None else y


class GRUCell(Module):
    """h' = (1 - z) * n + z * h with update gate z, reset gate r and candidate n."""

    def __init__(self, input_dim: int, hidden_dim: int, rng: np.random.Generator):
        super().__init__()
        self.input_dim, self.hidden_dim = input_dim, hidden_dim
        for gate in ("z", "r", "n"):
            self.add_param(f"W_{gate}", glorot_uniform(rng, input_dim, hidden_dim))
            self.add_param(f"U_{gate}", glorot_uniform(rng, hidden_dim, hidden_dim))
            self.add_param(f"b_{gate}", np.zeros(hidden_dim))

    def __call__(self, x_t: Tensor, h_prev: Tensor) -> Tensor:
        return gru_cell(x_t, h_prev, self._params)


def gru_cell(x_t: Tensor, h_prev: Tensor, params: dict[str, Tensor]) -> Tensor:
    W_z, U_z, b_z = params["W_z"], params["U_z"], params["b_z"]
    W_r, U_r, b_r = params["W_r"], params["U_r"], params["b_r"]
    W_n, U_n, b_n = params["W_n"], params["U_n"], params["b_n"]
    in_dim, hid = W_z.shape
    if x_t.ndim != 2 or x_t.shape[1] != in_dim:
        raise ShapeError(f"gru_cell: input shape {x_t.shape} does not match input dim {in_dim}")
    if h_prev.ndim != 2 or h_prev.shape[1] != hid or h_prev.shape[0] != x_t.shape[0]:
        raise ShapeError(f"gru_cell: state shape {h_prev.shape} does not match "
                         f"({x_t.shape[0]}, {hid})")
    z = ad.sigmoid(ad.add(ad.add(ad.matmul(x_t, W_z), ad.matmul(h_prev, U_z)), b_z))
    r = ad.sigmoid(ad.add(ad.add(ad.matmul(x_t, W_r), ad.matmul(h_prev, U_r)), b_r))
    n = ad.tanh(ad.add(ad.add(ad.matmul(x_t, W_n), ad.matmul(ad.mul(r, h_prev), U_n)), b_n))
    return ad.add(ad.mul(ad.sub(1.0, z), n), ad.mul(z, h_prev))


class GRUNet(Module):
    """Unrolled single-layer GRU followed by a per-step dense projection.

    Input ``(batch, T, in_dim)`` -> output ``(batch, T, out_dim)``.
    """

    def __init__(self, in_dim: int, hidden_dim: int, out_dim: int, rng: np.random.Generator,
                 out_activation: Callable[[Tensor], Tensor] | None = None):
        super().__init__()
        self.hidden_dim = hidden_dim
        self.cell = self.add_module("cell", GRUCell(in_dim, hidden_dim, rng))
        self.proj = self.add_module("proj", Dense(hidden_dim, out_dim, rng, out_activation))

    def __call__(self, x: Tensor) -> Tensor:
        batch, T, _ = x.shape
        h = Tensor(np.zeros((batch, self.hidden_dim)))
        outs = []
        for t in range(T):
            h = self.cell(ad.slice_(x, (slice(None), t, slice(None))), h)
            outs.append(self.proj(h))
        return ad.stack(outs, axis=1)


def params_to_json(named: dict[str, Tensor]) -> dict:
    """Flat ``name -> {shape, values}`` map, row-major values, keys sorted."""
    return {name: {"shape": list(named[name].shape),
                   "values": named[name].data.ravel().tolist()}
            for name in sorted(named)}


def load_params_json(named: dict[str, Tensor], blob: dict) -> None:
    missing = set(named) - set(blob)
    if missing:
        raise ShapeError(f"serialized parameters missing {sorted(missing)}")
    for name, t in named.items():
        entry = blob[name]
        shape = tuple(entry["shape"])
        if shape != t.shape:
            raise ShapeError(f"parameter {name}: stored shape {shape} != model shape {t.shape}")
        t.data = np.array(entry["values"], dtype=np.float64).reshape(shape)


def all_finite(params: Iterable[Tensor]) -> bool:
    return all(np.all(np.isfinite(p.data)) for p in params)
