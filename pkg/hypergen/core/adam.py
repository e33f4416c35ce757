# Adam with bias correction and L2 weight decay folded into the gradient.
# The *_update functions return the increment, not the new parameters.

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import InputError, TrainingError


@dataclass
class AdamState:
    step: int = 0
    m: Optional[np.ndarray] = None
    v: Optional[np.ndarray] = None


def _prepare(params, grads, weight_decay, step):
    if params.shape != grads.shape:
        raise InputError(f"params {params.shape} and grads {grads.shape} differ in shape")
    if not np.all(np.isfinite(grads)):
        raise TrainingError("non-finite gradient", step=step)
    if weight_decay:
        grads = grads + weight_decay * params
    return grads


def adam_update(state, params, grads, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8,
                weight_decay=0.0):
    """Return ``(increment, new_state)``; the new parameters are ``params + increment``."""
    if state.step < 0:
        raise InputError(f"Adam step counter must be >= 0, got {state.step}")
    t = state.step + 1
    g = _prepare(params, grads, weight_decay, t)

    m = np.zeros_like(params) if state.m is None else state.m
    v = np.zeros_like(params) if state.v is None else state.v
    m = beta1 * m + (1.0 - beta1) * g
    v = beta2 * v + (1.0 - beta2) * (g * g)

    # bias corrections
    m_hat = m / (1.0 - beta1 ** t)
    v_hat = v / (1.0 - beta2 ** t)
    increment = -lr * m_hat / (np.sqrt(v_hat) + eps)
    return increment.astype(params.dtype, copy=False), AdamState(t, m, v)


def adam_step(state, params, grads, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8,
              weight_decay=0.0):
    """One Adam step. Returns ``(new_params, new_state)``; inputs are left untouched."""
    increment, new_state = adam_update(state, params, grads, lr, beta1, beta2, eps, weight_decay)
    return params + increment, new_state


def sgd_update(params, grads, lr, weight_decay=0.0, step=None):
    g = _prepare(params, grads, weight_decay, step)
    return (-lr * g).astype(params.dtype, copy=False)


class Adam:
    """Adam over a dict of named tensors, one moment table per name.

    Names with no gradient in a given step are skipped, their moments and
    step counters left as they were.
    """

    def __init__(self, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8, weight_decay=0.0):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.weight_decay = weight_decay
        self.state = {}

    def step(self, params, grads):
        for name, grad in grads.items():
            state = self.state.get(name, AdamState())
            params[name], self.state[name] = adam_step(
                state, params[name], grad, self.lr, self.beta1, self.beta2,
                self.eps, self.weight_decay)
