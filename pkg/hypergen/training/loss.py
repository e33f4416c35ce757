import numpy as np

from ..core.losses import mse_loss, softmax_cross_entropy
from ..core.mlp import MlpParams, mlp_backward, mlp_forward_cached
from ..errors import ShapeError


def task_loss(model, batch, task):
    """Loss of a target model on one batch and its gradient per named tensor.

    ``model`` is a GeneratedModel or bare MlpParams; the gradient dict uses
    the ``mlp.k.weight`` / ``mlp.k.bias`` names.
    """
    params = getattr(model, 'params', model)
    x, y = batch
    out, cache = mlp_forward_cached(params, x)
    if out.shape[1] != task.out_dim:
        raise ShapeError(f"model produces {out.shape[1]} outputs, {task.kind} task needs {task.out_dim}")
    if task.is_classification:
        loss, grad = softmax_cross_entropy(out, y)
    else:
        loss, grad = mse_loss(out, np.asarray(y).reshape(-1, 1))
    layer_grads = mlp_backward(params, cache, grad)
    return loss, MlpParams(layer_grads).named()
