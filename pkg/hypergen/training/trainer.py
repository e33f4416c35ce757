"""Meta-training of the hypernetwork over task-requirement pairs.

Per batch: generate target parameters from the pair's requirement, take one
inner optimizer step on them, and push the hypernetwork along that step by
back-propagating ``-delta`` from the generated tensors. After every epoch
the summed held-out loss of all pairs decides whether to checkpoint.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from tqdm import tqdm

from ..core.adam import Adam
from ..core.mlp import MlpParams
from ..errors import ConsistencyError, InputError, TrainingError
from ..hypernet.architecture import DEFAULT_RULES, SizeProfile
from ..hypernet.network import HyperNetwork
from ..hypernet.registry import register_shapes
from .inner import inner_step
from .loss import task_loss
from .schedule import balance_tasks, batch_count, plan_batches

logger = logging.getLogger(__name__)

TRAINER = 'trainer'


@dataclass
class Checkpoint:
    params: dict
    avg_eval_loss: float
    epoch: int
    profile: SizeProfile = SizeProfile()
    encoder_vocab: int = 4096
    encoder_dim: int = 64
    latent_dim: int = 25
    trained_on: tuple = ()
    history: list = field(default_factory=list)
    diverged: bool = False

    def network(self):
        net = HyperNetwork.from_named({k: v.copy() for k, v in self.params.items()}, self.profile)
        if net.latent_dim != self.latent_dim:
            raise ConsistencyError(f"checkpoint latent size {self.latent_dim} does not match "
                                   f"its tensors ({net.latent_dim})")
        return net

    @property
    def checkpoint_id(self):
        return HyperNetwork.from_named(self.params, self.profile).checkpoint_id()


def hyper_backward(network, delta, cache):
    """Gradients of every hypernetwork parameter for one inner-step delta.

    The generated tensors receive ``-delta`` as their upstream gradient, so a
    descent step on the hypernetwork moves its output along the inner update.
    """
    upstream = {name: -value for name, value in delta.items()}
    return network.backward(upstream, cache)


def _pair_eval_loss(network, pair, registry, task):
    x, y = pair.dataset.read('eval', reader=TRAINER)
    if len(x) == 0:
        x, y = pair.dataset.read('train', reader=TRAINER)
    theta = network.generate(pair.requirement, registry)
    loss, _ = task_loss(MlpParams.from_named(theta), (x, y), task)
    return loss


def evaluate(network, pairs, registries, tasks, workers=1):
    """Average held-out loss per pair, in pair order."""
    jobs = list(zip(pairs, registries, tasks))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda job: _pair_eval_loss(network, *job), jobs))
    return [_pair_eval_loss(network, *job) for job in jobs]


def prepare(pairs, cfg, network=None, rules=DEFAULT_RULES):
    """Validate pairs, size their targets and make sure every head exists."""
    if not pairs:
        raise InputError("training needs at least one task-requirement pair")
    held_out = [pair.name for pair in pairs if pair.held_out]
    if held_out:
        raise InputError(f"zero-shot tasks cannot be trained on: {', '.join(held_out)}")
    profile = SizeProfile(cfg.hidden_dim, cfg.n_layers)
    tasks = [pair.validate(rules) for pair in pairs]
    registries = [register_shapes(pair.arch_spec(profile, rules)) for pair in pairs]
    rng = np.random.default_rng(cfg.seed)
    if network is None:
        network = HyperNetwork.init(registries, rng, cfg.encoder_vocab, cfg.encoder_dim,
                                    cfg.latent_dim, profile)
    else:
        network.ensure_heads(registries, rng)
    return network, tasks, registries, rng


def train(pairs, cfg, network=None, rules=DEFAULT_RULES):
    network, tasks, registries, rng = prepare(pairs, cfg, network, rules)
    optimizer = Adam(cfg.hyper_lr, cfg.beta1, cfg.beta2, cfg.eps, cfg.hyper_weight_decay)
    train_data = [pair.dataset.read('train', reader=TRAINER) for pair in pairs]
    base_batches = cfg.base_batches or max(batch_count(len(x), cfg.batch_size) for x, _ in train_data)
    portions = [pair.portion for pair in pairs]

    def checkpoint(losses, epoch, history):
        return Checkpoint(network.snapshot(), sum(losses) / len(losses), epoch,
                          network.profile, cfg.encoder_vocab, cfg.encoder_dim, cfg.latent_dim,
                          tuple(pair.name for pair in pairs), history)

    losses = evaluate(network, pairs, registries, tasks, cfg.eval_workers)
    best_total = sum(losses)
    if not np.isfinite(best_total):
        raise TrainingError("initial evaluation loss is not finite", step=0)
    best = checkpoint(losses, 0, [best_total / len(losses)])
    logger.info("Meta-training on %d pairs, %d batches per unit portion, eval loss %.4f",
                len(pairs), base_batches, best.avg_eval_loss)

    step = 0
    epochs = tqdm(range(1, cfg.epochs + 1), desc='meta-train', unit='epoch',
                  disable=not cfg.progress)
    for epoch in epochs:
        schedule = balance_tasks(portions, base_batches, rng)
        counts = [sum(1 for i, _ in schedule if i == k) for k in range(len(pairs))]
        plans = [plan_batches(len(x), cfg.batch_size, count, rng)
                 for (x, _), count in zip(train_data, counts)]
        running = 0.0
        try:
            for i, b in schedule:
                x, y = train_data[i]
                rows = plans[i][b]
                theta, cache = network.forward(pairs[i].requirement, registries[i])
                loss, delta = inner_step(theta, (x[rows], y[rows]), tasks[i], cfg.target_lr,
                                         cfg.inner_optimizer, cfg.target_weight_decay,
                                         task_id=pairs[i].name, batch_index=b)
                network.step(optimizer, hyper_backward(network, delta, cache))
                running += loss
                step += 1
        except TrainingError as e:
            logger.error("Meta-training diverged in epoch %d: %s", epoch, e)
            return replace(best, diverged=True)

        losses = evaluate(network, pairs, registries, tasks, cfg.eval_workers)
        total = sum(losses)
        if not np.isfinite(total):
            logger.error("Eval loss is %s after epoch %d, keeping epoch %d", total, epoch, best.epoch)
            return replace(best, diverged=True)
        if total < best_total:
            best_total = total
            best = checkpoint(losses, epoch, best.history + [total / len(losses)])
        logger.debug("Epoch %d: train %.4f, eval %.4f (best %.4f @ %d)", epoch,
                     running / max(len(schedule), 1), total / len(losses),
                     best.avg_eval_loss, best.epoch)
        epochs.set_postfix(eval=f'{total / len(losses):.4f}', best=best.epoch)

    logger.info("Meta-training done after %d steps, best epoch %d, eval loss %.4f",
                step, best.epoch, best.avg_eval_loss)
    return best
