"""Low-rank adapters on dense layers.

An adapted layer computes ``x W^T + b + (alpha/r) * drop(x) A^T B^T`` with
``A: [r, in]`` and ``B: [out, r]``; merging folds the update into the base
weight, ``W + (alpha/r) B A``. Dropout acts on the adapter input only and
only while training adapters.
"""

from dataclasses import dataclass

import numpy as np

from ..core.mlp import MlpParams, layer_name, linear
from ..core.tensor import DTYPE, as_matrix
from ..errors import ConfigError, InputError, ShapeError


@dataclass
class LoraAdapter:
    target_name: str
    A: np.ndarray
    B: np.ndarray
    alpha: float
    r: int
    dropout: float = 0.0

    def __post_init__(self):
        if self.A.ndim != 2 or self.B.ndim != 2:
            raise ShapeError(f"{self.target_name}: adapter factors must be matrices")
        if self.A.shape[0] != self.r or self.B.shape[1] != self.r:
            raise ShapeError(f"{self.target_name}: A {self.A.shape} and B {self.B.shape} "
                             f"do not share rank {self.r}")
        if self.r < 1 or self.r > min(self.A.shape[1], self.B.shape[0]):
            raise ConfigError(f"{self.target_name}: rank {self.r} exceeds "
                              f"min({self.A.shape[1]}, {self.B.shape[0]})")

    @property
    def scale(self):
        return self.alpha / self.r

    @classmethod
    def init(cls, target_name, in_dim, out_dim, config, rng, dtype=DTYPE):
        """A uniform(+-1/sqrt(in)), B zero: the adapted layer starts equal to its base."""
        bound = 1.0 / np.sqrt(in_dim)
        A = rng.uniform(-bound, bound, size=(config.r, in_dim)).astype(dtype)
        B = np.zeros((out_dim, config.r), dtype=dtype)
        return cls(target_name, A, B, config.alpha, config.r, config.dropout)


def merge_lora(base, adapter):
    base = np.asarray(base)
    if base.shape != (adapter.B.shape[0], adapter.A.shape[1]):
        raise ShapeError(f"{adapter.target_name}: base weight {base.shape} does not match adapter "
                         f"({adapter.B.shape[0]}, {adapter.A.shape[1]})")
    # a zero update returns the base bit for bit
    if adapter.alpha == 0 or not np.any(adapter.B):
        return base.copy()
    return base + adapter.scale * (adapter.B @ adapter.A)


def adapters_from_params(param_set, lora_config, n_layers_total):
    adapters = {}
    for k in range(n_layers_total):
        name = layer_name(k)
        if f'{name}.lora_A' in param_set:
            adapters[k] = LoraAdapter(name, param_set[f'{name}.lora_A'], param_set[f'{name}.lora_B'],
                                      lora_config.alpha, lora_config.r, lora_config.dropout)
    return adapters


def merge_into(base, adapters, biases=None):
    """New MlpParams with every adapter merged and optional bias overrides."""
    if not isinstance(base, MlpParams):
        raise InputError("lora merging needs base MlpParams")
    layers = []
    for k, (weight, bias) in enumerate(base.layers):
        if k in adapters:
            weight = merge_lora(weight, adapters[k])
        else:
            weight = weight.copy()
        name = layer_name(k)
        if biases and f'{name}.bias' in biases:
            bias = np.asarray(biases[f'{name}.bias']).copy()
        else:
            bias = bias.copy()
        layers.append((weight, bias))
    return MlpParams(layers)


def lora_forward_cached(base, adapters, x, rng=None):
    """Unmerged forward pass; dropout on adapter inputs is active when ``rng`` is given."""
    x = as_matrix(x)
    cache = []
    h = x
    last = len(base.layers) - 1
    for k, (weight, bias) in enumerate(base.layers):
        if h.shape[1] != weight.shape[1]:
            raise ShapeError(f"layer {layer_name(k)} expects {weight.shape[1]} inputs, got {h.shape[1]}")
        a = linear(h, weight, bias)
        entry = {'input': h, 'mask': None, 'u': None}
        adapter = adapters.get(k)
        if adapter is not None:
            dropped = h
            if rng is not None and adapter.dropout > 0:
                keep = 1.0 - adapter.dropout
                entry['mask'] = (rng.random(h.shape) < keep).astype(h.dtype) / keep
                dropped = h * entry['mask']
            entry['dropped'] = dropped
            entry['u'] = dropped @ adapter.A.T
            a = a + adapter.scale * (entry['u'] @ adapter.B.T)
        entry['pre'] = a
        cache.append(entry)
        h = np.maximum(a, 0) if k < last else a
    return h, cache


def lora_backward(base, adapters, cache, grad_out, with_bias=False):
    """Gradients for every adapter's (A, B); the base stays frozen.

    With ``with_bias`` the biases of adapted layers get gradients too.
    """
    grads = {}
    g = grad_out
    for k in range(len(base.layers) - 1, -1, -1):
        weight = base.layers[k][0]
        entry = cache[k]
        adapter = adapters.get(k)
        grad_input = g @ weight if k > 0 else None
        if adapter is not None:
            grads[f'{layer_name(k)}.lora_B'] = adapter.scale * (g.T @ entry['u'])
            grad_u = adapter.scale * (g @ adapter.B)
            grads[f'{layer_name(k)}.lora_A'] = grad_u.T @ entry['dropped']
            if with_bias:
                grads[f'{layer_name(k)}.bias'] = g.sum(axis=0)
            if k > 0:
                through = grad_u @ adapter.A
                if entry['mask'] is not None:
                    through = through * entry['mask']
                grad_input = grad_input + through
        if k > 0:
            g = grad_input * (cache[k - 1]['pre'] > 0)
    return grads
