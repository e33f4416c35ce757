import numpy as np

from ..errors import InputError
from .tensor import as_matrix


def softmax_cross_entropy(logits, labels):
    """Mean cross-entropy over the batch and its gradient w.r.t. the logits."""
    logits = as_matrix(logits, 'logits')
    labels = np.asarray(labels)
    n, n_classes = logits.shape
    if n < 1:
        raise InputError("cross-entropy needs a batch of at least one row")
    if labels.shape != (n,):
        raise InputError(f"expected {n} labels, got shape {labels.shape}")
    if labels.min() < 0 or labels.max() >= n_classes:
        raise InputError(f"labels must lie in [0, {n_classes}), got range "
                         f"[{labels.min()}, {labels.max()}]")
    labels = labels.astype(np.int64)

    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    sums = exp.sum(axis=1, keepdims=True)
    rows = np.arange(n)
    log_probs = shifted[rows, labels] - np.log(sums[:, 0])
    loss = -np.mean(log_probs, dtype=np.float64)

    grad = exp / sums
    grad[rows, labels] -= 1
    grad /= n
    return float(loss), grad.astype(logits.dtype, copy=False)


def mse_loss(pred, target):
    pred = np.asarray(pred)
    target = np.asarray(target)
    if pred.shape != target.shape:
        raise InputError(f"prediction shape {pred.shape} != target shape {target.shape}")
    diff = pred - target.astype(pred.dtype, copy=False)
    loss = np.mean(np.square(diff), dtype=np.float64)
    grad = 2 * diff / diff.size
    return float(loss), grad.astype(pred.dtype, copy=False)
