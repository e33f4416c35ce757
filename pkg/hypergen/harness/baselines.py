"""The four methods of the comparison grid.

    finetune     fresh seeded init, all parameters, ``finetune.epochs`` epochs
    lora         frozen random dense base, adapters only, same number of epochs
    modelgpt     one generation pass from the requirement, no training
    modelgpt_f   generation followed by exactly one all-parameter epoch

Runtime is wall-clock from the start of the method to a ready model; the
final test-split scoring is shared by all methods and left out.
"""

import logging
import time
from dataclasses import dataclass, replace

import numpy as np

from ..core.adam import Adam
from ..core.losses import mse_loss, softmax_cross_entropy
from ..core.mlp import init_mlp, layer_name
from ..errors import ConfigError, InputError
from ..hypernet.architecture import ArchitectureSpec, LoraConfig, RuleTable, SizeProfile
from ..hypernet.assemble import GeneratedModel
from ..hypernet.lora import LoraAdapter, lora_backward, lora_forward_cached, merge_into
from ..training.schedule import iterate_minibatches
from .finetune import HARNESS, FinetuneSettings, finetune
from .metrics import score

logger = logging.getLogger(__name__)

METHODS = ('finetune', 'lora', 'modelgpt', 'modelgpt_f')
GENERATED_METHODS = ('modelgpt', 'modelgpt_f')


@dataclass
class BaselineResult:
    method: str
    task: str
    metrics: dict
    epochs: int
    runtime_s: float
    checkpoint_id: str = None
    model: GeneratedModel = None
    relative_efficiency: float = 1.0


def _rng(seed, method, task_name):
    return np.random.default_rng([seed, METHODS.index(method), *task_name.encode('utf-8')])


def fresh_model(dataset, task, profile, rng):
    params = init_mlp(dataset.n_features, profile.hidden_dim, profile.n_layers, task.out_dim, rng)
    spec = ArchitectureSpec(dataset.n_features, task.out_dim, profile.hidden_dim,
                            profile.n_layers, task=task)
    return spec, params


def train_lora(dataset, task, lora_config, hidden_dim, n_layers, settings, rng, epochs=None):
    """Adapters (and with ``bias='all'`` the adapted biases) on a frozen random base.

    Ranks larger than a layer allows are clamped to ``min(fan_in, fan_out)``.
    """
    epochs = settings.epochs if epochs is None else epochs
    spec = ArchitectureSpec.dense_lora(dataset.n_features, task.out_dim, lora_config,
                                       hidden_dim, n_layers, task)
    base = init_mlp(spec.in_dim, spec.hidden_dim, spec.n_layers, spec.out_dim, rng)
    adapters = {}
    for k, (weight, _) in enumerate(base.layers):
        name = layer_name(k)
        if lora_config.targets(name):
            fan_out, fan_in = weight.shape
            layer_config = replace(lora_config, r=min(lora_config.r, fan_in, fan_out))
            adapters[k] = LoraAdapter.init(name, fan_in, fan_out, layer_config, rng)
    if not adapters:
        raise ConfigError(f"target_modules {lora_config.target_modules!r} matches no layer")
    with_bias = lora_config.bias == 'all'

    trainable = {}
    for k, adapter in adapters.items():
        trainable[f'{adapter.target_name}.lora_A'] = adapter.A
        trainable[f'{adapter.target_name}.lora_B'] = adapter.B
        if with_bias:
            trainable[f'{adapter.target_name}.bias'] = base.layers[k][1].copy()
    optimizer = Adam(settings.lr, weight_decay=settings.weight_decay)

    def sync():
        for k, adapter in adapters.items():
            adapter.A = trainable[f'{adapter.target_name}.lora_A']
            adapter.B = trainable[f'{adapter.target_name}.lora_B']
            if with_bias:
                base.layers[k] = (base.layers[k][0], trainable[f'{adapter.target_name}.bias'])

    x, y = dataset.read('train', reader=HARNESS)
    for _ in range(epochs):
        for rows in iterate_minibatches(len(x), settings.batch_size, rng):
            out, cache = lora_forward_cached(base, adapters, x[rows], rng)
            if task.is_classification:
                _, grad = softmax_cross_entropy(out, y[rows])
            else:
                _, grad = mse_loss(out, y[rows].reshape(-1, 1))
            optimizer.step(trainable, lora_backward(base, adapters, cache, grad, with_bias))
            sync()
    merged = merge_into(base, adapters)
    return GeneratedModel(spec, merged)


def build_baseline(method, pair, settings, network=None, seed=2024, rules=None):
    """Timed part of a cell: run one method on one pair up to a ready model.

    The returned result has no metrics yet; see :func:`score_baseline`.
    """
    if method not in METHODS:
        raise InputError(f"unknown method {method!r}, expected one of {METHODS}")
    if method in GENERATED_METHODS and network is None:
        raise ConfigError(f"{method} needs a trained hypernetwork checkpoint")
    ft = FinetuneSettings.from_settings(settings)
    task = pair.dataset.task
    rng = _rng(seed, method, pair.name)
    if rules is None and method in GENERATED_METHODS:
        rules = RuleTable.from_settings(settings)
    checkpoint_id = None

    start = time.perf_counter()
    if method == 'finetune':
        spec, params = fresh_model(pair.dataset, task, SizeProfile.from_settings(settings), rng)
        model = GeneratedModel(spec, finetune(params, pair.dataset, task, ft, rng).params)
        epochs = ft.epochs
    elif method == 'lora':
        lora = settings['lora']
        model = train_lora(pair.dataset, task, LoraConfig.from_settings(settings),
                           int(lora['hidden_dim']), int(lora['n_layers']), ft, rng)
        epochs = ft.epochs
    else:
        model = network.generate_model(pair.requirement, rules)
        checkpoint_id = model.provenance.checkpoint_id
        epochs = 0
        if method == 'modelgpt_f':
            epochs = 1
            tuned = finetune(model.params, pair.dataset, task, ft, rng, epochs=1).params
            model = GeneratedModel(model.spec, tuned, model.provenance)
    runtime = time.perf_counter() - start
    return BaselineResult(method, pair.name, {}, epochs, runtime, checkpoint_id, model)


def score_baseline(result, pair):
    x, y = pair.dataset.read('test', reader=HARNESS)
    result.metrics = score(result.model.params, x, y, pair.dataset.task)
    logger.info("%-10s %-20s %s in %.3fs", result.method, pair.name,
                ', '.join(f'{k}={v:.2f}' for k, v in result.metrics.items()), result.runtime_s)
    return result


def run_baseline(method, pair, settings, network=None, seed=2024, rules=None):
    """Run one method on one pair; returns a BaselineResult scored on the test split."""
    return score_baseline(build_baseline(method, pair, settings, network, seed, rules), pair)
