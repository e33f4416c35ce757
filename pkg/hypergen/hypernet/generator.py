"""Module-wise parameter generator.

Every registry entry gets its own affine head ``z -> W z + b`` whose output
is the entry's values, flattened row-major and reshaped back. Heads are
keyed by (name, shape), so tasks whose targets share a tensor shape share
its head, and one generator serves targets of different sizes.

A ParameterSet is a plain ``{name: array}`` dict in registry order.
"""

from dataclasses import dataclass

import numpy as np

from ..core.tensor import DTYPE
from ..errors import ConsistencyError, ShapeError

HEAD_WEIGHT_SCALE = 0.01


@dataclass
class Head:
    weight: np.ndarray   # [numel, latent_dim]
    bias: np.ndarray     # [numel]


def init_head(entry, latent_dim, rng, dtype=DTYPE):
    bound = 1.0 / np.sqrt(latent_dim)
    weight = rng.uniform(-bound, bound, size=(entry.numel, latent_dim)) * HEAD_WEIGHT_SCALE
    target_bound = 1.0 / np.sqrt(entry.fan_in)
    bias = rng.uniform(-target_bound, target_bound, size=entry.numel)
    return Head(weight.astype(dtype), bias.astype(dtype))


class GeneratorParams:
    def __init__(self, latent_dim, heads=None):
        self.latent_dim = latent_dim
        self.heads = dict(heads or {})

    @classmethod
    def init(cls, latent_dim, registries, rng, dtype=DTYPE):
        params = cls(latent_dim)
        for registry in registries:
            params.ensure(registry, rng, dtype)
        return params

    def ensure(self, registry, rng, dtype=DTYPE):
        """Allocate heads for any entry of ``registry`` not seen before."""
        for entry in registry:
            if entry.key not in self.heads:
                self.heads[entry.key] = init_head(entry, self.latent_dim, rng, dtype)

    def check(self, registry):
        for entry in registry:
            head = self.heads.get(entry.key)
            if head is None:
                raise ConsistencyError(f"generator has no head for {entry.key}")
            if head.weight.shape != (entry.numel, self.latent_dim) or head.bias.shape != (entry.numel,):
                raise ConsistencyError(
                    f"head {entry.key} has shape {head.weight.shape}, expected "
                    f"({entry.numel}, {self.latent_dim})")

    def named(self):
        out = {}
        for key in sorted(self.heads):
            out[f'{key}/weight'] = self.heads[key].weight
            out[f'{key}/bias'] = self.heads[key].bias
        return out

    @classmethod
    def from_named(cls, named, latent_dim):
        parts = {}
        for name, value in named.items():
            key, part = name.rsplit('/', 1)
            parts.setdefault(key, {})[part] = value
        heads = {key: Head(p['weight'], p['bias']) for key, p in parts.items()}
        return cls(latent_dim, heads)


def _check_latent(z, params):
    z = np.asarray(z)
    if z.shape != (params.latent_dim,):
        raise ShapeError(f"latent z has shape {z.shape}, generator expects ({params.latent_dim},)")
    return z


def generate(z, params, registry):
    z = _check_latent(z, params)
    params.check(registry)
    out = {}
    for entry in registry:
        head = params.heads[entry.key]
        out[entry.name] = (head.weight @ z + head.bias).reshape(entry.shape)
    return out


def generate_backward(z, params, registry, upstream):
    """Chain ``upstream`` (dL/d generated tensor, by name) through the heads.

    Returns ``(head_grads, grad_z)`` where head_grads uses the ``named()`` keys.
    """
    z = _check_latent(z, params)
    grads = {}
    grad_z = np.zeros_like(z)
    for entry in registry:
        g = np.asarray(upstream[entry.name]).reshape(-1)
        head = params.heads[entry.key]
        grads[f'{entry.key}/weight'] = np.outer(g, z)
        grads[f'{entry.key}/bias'] = g.copy()
        grad_z += head.weight.T @ g
    return grads, grad_z
