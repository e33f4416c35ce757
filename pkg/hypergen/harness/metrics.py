import numpy as np

from ..core.mlp import mlp_forward
from ..errors import InputError

TOP_K = (3, 5)


def accuracy(logits, labels):
    """Top-1 accuracy in percent."""
    return 100.0 * float(np.mean(np.asarray(logits).argmax(axis=1) == np.asarray(labels)))


def top_k_accuracy(logits, labels, k):
    logits = np.asarray(logits)
    if k >= logits.shape[1]:
        raise InputError(f"top-{k} accuracy needs more than {k} classes, got {logits.shape[1]}")
    top = np.argsort(-logits, axis=1, kind='stable')[:, :k]
    return 100.0 * float(np.mean(np.any(top == np.asarray(labels)[:, None], axis=1)))


def pearson(pred, target):
    pred = np.asarray(pred, dtype=np.float64).ravel()
    target = np.asarray(target, dtype=np.float64).ravel()
    if pred.std() == 0 or target.std() == 0:
        return 0.0
    return float(np.corrcoef(pred, target)[0, 1])


def score(params, x, y, task):
    """Metric dict of a target network on ``(x, y)``.

    Classification: ``accuracy`` plus ``acc@k`` for every k below the class
    count. Regression: ``pearson`` and ``mse``.
    """
    params = getattr(params, 'params', params)
    out = mlp_forward(params, x)
    if task.is_classification:
        metrics = {'accuracy': accuracy(out, y)}
        for k in TOP_K:
            if task.n_classes > k:
                metrics[f'acc@{k}'] = top_k_accuracy(out, y, k)
        return metrics
    pred = out[:, 0]
    target = np.asarray(y).ravel()
    return {'pearson': pearson(pred, target),
            'mse': float(np.mean(np.square(pred.astype(np.float64) - target)))}


def headline(metrics):
    """The single number a report leads with."""
    return metrics['accuracy'] if 'accuracy' in metrics else metrics['pearson']
