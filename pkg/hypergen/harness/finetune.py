"""Plain per-task training of a target MLP, all parameters trainable."""

from dataclasses import dataclass

import numpy as np

from ..core.adam import Adam
from ..core.mlp import MlpParams, mlp_forward
from ..errors import ConfigError
from ..training.loss import task_loss
from ..training.schedule import iterate_minibatches
from .metrics import accuracy

HARNESS = 'harness'


@dataclass(frozen=True)
class FinetuneSettings:
    epochs: int = 20
    lr: float = 2e-2
    weight_decay: float = 1e-4
    batch_size: int = 64
    init_study_epochs: int = 40
    seeds: int = 5

    def __post_init__(self):
        if self.epochs < 0 or self.init_study_epochs < 1 or self.seeds < 1:
            raise ConfigError(f"invalid finetune settings {self}")
        if self.lr <= 0 or self.batch_size < 1:
            raise ConfigError(f"finetune lr and batch_size must be positive: {self}")

    @classmethod
    def from_settings(cls, settings):
        return cls(**settings['finetune'])


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    eval_loss: float
    train_acc: float
    eval_acc: float


def evaluate_split(params, x, y, task):
    loss, _ = task_loss(params, (x, y), task)
    acc = accuracy(mlp_forward(params, x), y) if task.is_classification else float('nan')
    return loss, acc


@dataclass
class FinetuneResult:
    params: MlpParams
    history: list
    best_epoch: int = 0
    best_params: MlpParams = None


def is_better(record, best, task):
    """Earliest epoch with the highest eval accuracy; lowest eval loss for regression."""
    if best is None:
        return True
    if task.is_classification:
        return record.eval_acc > best.eval_acc
    return record.eval_loss < best.eval_loss


def finetune(params, dataset, task, settings, rng, epochs=None, record=False):
    """Train every tensor of ``params`` with Adam on the dataset's train split.

    With ``record`` every epoch is measured after its updates and the best
    eval epoch is kept alongside the final parameters.
    """
    epochs = settings.epochs if epochs is None else epochs
    x, y = dataset.read('train', reader=HARNESS)
    if record:
        x_eval, y_eval = dataset.read('eval', reader=HARNESS)
    named = {name: value.copy() for name, value in params.named().items()}
    optimizer = Adam(settings.lr, weight_decay=settings.weight_decay)
    history = []
    best, best_params = None, None
    for epoch in range(1, epochs + 1):
        for rows in iterate_minibatches(len(x), settings.batch_size, rng):
            _, grads = task_loss(MlpParams.from_named(named), (x[rows], y[rows]), task)
            optimizer.step(named, grads)
        if record:
            current = MlpParams.from_named(named)
            train_loss, train_acc = evaluate_split(current, x, y, task)
            eval_loss, eval_acc = evaluate_split(current, x_eval, y_eval, task)
            history.append(EpochRecord(epoch, train_loss, eval_loss, train_acc, eval_acc))
            if is_better(history[-1], best, task):
                best, best_params = history[-1], current.copy()
    final = MlpParams.from_named(named)
    if best is None:
        return FinetuneResult(final, history, epochs, final)
    return FinetuneResult(final, history, best.epoch, best_params)
