import numpy as np

from ..core.adam import AdamState, adam_update, sgd_update
from ..core.mlp import MlpParams
from ..errors import InputError, TrainingError
from .loss import task_loss

INNER_OPTIMIZERS = ('adam', 'sgd')


def inner_step(theta, batch, task, target_lr, optimizer='adam', weight_decay=0.0,
               task_id=None, batch_index=None):
    """One optimizer step on generated parameters; returns ``(loss, delta)``.

    ``theta`` is left as it was. Adam starts from a fresh state every call,
    so its first step is taken with bias-corrected moments of this batch only.
    """
    if not target_lr > 0:
        raise InputError(f"target_lr must be positive, got {target_lr}")
    if optimizer not in INNER_OPTIMIZERS:
        raise InputError(f"inner optimizer must be one of {INNER_OPTIMIZERS}, got {optimizer!r}")

    loss, grads = task_loss(MlpParams.from_named(theta), batch, task)
    if not np.isfinite(loss):
        raise TrainingError("non-finite task loss", task=task_id, batch=batch_index)

    delta = {}
    try:
        for name, grad in grads.items():
            if optimizer == 'sgd':
                delta[name] = sgd_update(theta[name], grad, target_lr, weight_decay)
            else:
                delta[name], _ = adam_update(AdamState(), theta[name], grad, target_lr,
                                             weight_decay=weight_decay)
    except TrainingError as e:
        raise TrainingError("non-finite target gradient", step=e.step, task=task_id,
                            batch=batch_index) from e
    return loss, delta
