"""Dense ReLU multilayer perceptron with a hand-written backward pass.

Layers follow the reference target::

    mlp.0: in_dim -> hidden_dim
    mlp.1 .. mlp.n_layers: hidden_dim -> hidden_dim
    mlp.{n_layers+1}: hidden_dim -> out_dim

ReLU sits between layers, never after the last one. Weights are stored
``[out, in]`` so a layer computes ``x @ W.T + b``. Every function computes
in the dtype of the arrays it is handed.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError
from .tensor import DTYPE, as_matrix, check_finite


def layer_name(index):
    return f"mlp.{index}"


@dataclass
class MlpParams:
    layers: list

    def __post_init__(self):
        if not self.layers:
            raise ShapeError("an MLP needs at least one layer")
        for k, (weight, bias) in enumerate(self.layers):
            if weight.ndim != 2 or bias.shape != (weight.shape[0],):
                raise ShapeError(
                    f"layer {k}: weight {weight.shape} and bias {bias.shape} do not match")
            if k > 0 and weight.shape[1] != self.layers[k - 1][0].shape[0]:
                raise ShapeError(
                    f"layer {k} takes {weight.shape[1]} inputs but layer {k - 1} "
                    f"produces {self.layers[k - 1][0].shape[0]}")

    @property
    def in_dim(self):
        return self.layers[0][0].shape[1]

    @property
    def out_dim(self):
        return self.layers[-1][0].shape[0]

    @property
    def n_layers(self):
        return len(self.layers) - 2

    def copy(self):
        return MlpParams([(w.copy(), b.copy()) for w, b in self.layers])

    def named(self):
        """Flat ``{'mlp.k.weight': ..., 'mlp.k.bias': ...}`` view in canonical order."""
        out = {}
        for k, (weight, bias) in enumerate(self.layers):
            out[f"{layer_name(k)}.weight"] = weight
            out[f"{layer_name(k)}.bias"] = bias
        return out

    @classmethod
    def from_named(cls, named):
        layers = []
        k = 0
        while f"{layer_name(k)}.weight" in named:
            layers.append((named[f"{layer_name(k)}.weight"], named[f"{layer_name(k)}.bias"]))
            k += 1
        return cls(layers)


def layer_dims(in_dim, hidden_dim, n_layers, out_dim):
    """(fan_in, fan_out) per layer."""
    dims = [in_dim] + [hidden_dim] * (n_layers + 1) + [out_dim]
    return list(zip(dims[:-1], dims[1:]))


def init_mlp(in_dim, hidden_dim, n_layers, out_dim, rng, dtype=DTYPE):
    """Seeded uniform(+-1/sqrt(fan_in)) initialisation for weights and biases."""
    layers = []
    for fan_in, fan_out in layer_dims(in_dim, hidden_dim, n_layers, out_dim):
        bound = 1.0 / np.sqrt(fan_in)
        weight = rng.uniform(-bound, bound, size=(fan_out, fan_in)).astype(dtype)
        bias = rng.uniform(-bound, bound, size=(fan_out,)).astype(dtype)
        layers.append((weight, bias))
    return MlpParams(layers)


def linear(x, weight, bias):
    return x @ weight.T + bias


def _check_layer_input(k, x, weight):
    if x.shape[1] != weight.shape[1]:
        raise ShapeError(
            f"layer {layer_name(k)} expects {weight.shape[1]} inputs, got {x.shape[1]}")


def mlp_forward(params, x):
    x = check_finite(as_matrix(x), 'input batch')
    h = x
    last = len(params.layers) - 1
    for k, (weight, bias) in enumerate(params.layers):
        _check_layer_input(k, h, weight)
        h = linear(h, weight, bias)
        if k < last:
            h = np.maximum(h, 0)
    return h


def mlp_forward_cached(params, x):
    """Forward pass that also returns what ``mlp_backward`` needs."""
    x = as_matrix(x)
    inputs, pre = [], []
    h = x
    last = len(params.layers) - 1
    for k, (weight, bias) in enumerate(params.layers):
        _check_layer_input(k, h, weight)
        inputs.append(h)
        a = linear(h, weight, bias)
        pre.append(a)
        h = np.maximum(a, 0) if k < last else a
    return h, (inputs, pre)


def mlp_backward(params, cache, grad_out, need_input_grad=False):
    """Gradients of every layer given dL/d(output).

    Returns ``[(grad_weight, grad_bias), ...]`` in layer order, plus dL/dx when
    ``need_input_grad`` is set.
    """
    inputs, pre = cache
    grads = [None] * len(params.layers)
    g = grad_out
    for k in range(len(params.layers) - 1, -1, -1):
        weight = params.layers[k][0]
        grads[k] = (g.T @ inputs[k], g.sum(axis=0))
        if k > 0 or need_input_grad:
            g = g @ weight
        if k > 0:
            g = g * (pre[k - 1] > 0)
    if need_input_grad:
        return grads, g
    return grads
