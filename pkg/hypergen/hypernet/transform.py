from dataclasses import dataclass

import numpy as np

from ..core.mlp import MlpParams, init_mlp, mlp_backward, mlp_forward_cached
from ..core.tensor import DTYPE


@dataclass
class TransformParams:
    """Two affine layers ``d0 -> d -> d`` with a ReLU between them."""
    mlp: MlpParams

    @property
    def latent_dim(self):
        return self.mlp.out_dim

    @classmethod
    def init(cls, in_dim, latent_dim, rng, dtype=DTYPE):
        return cls(init_mlp(in_dim, latent_dim, 0, latent_dim, rng, dtype))

    def named(self):
        return self.mlp.named()

    @classmethod
    def from_named(cls, named):
        return cls(MlpParams.from_named(named))


def transform(z0, params, return_cache=False):
    z, cache = mlp_forward_cached(params.mlp, np.asarray(z0)[None, :])
    if return_cache:
        return z[0], cache
    return z[0]


def transform_backward(params, cache, grad_z):
    grads, grad_z0 = mlp_backward(params.mlp, cache, grad_z[None, :], need_input_grad=True)
    return MlpParams(grads).named(), grad_z0[0]
