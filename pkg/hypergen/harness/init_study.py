"""Generated weights as an initialisation.

The same finetuning recipe runs from the zero-shot generated parameters
and from a fresh seeded init, once per seed; the seed drives the batch
order (and, for the fresh init, the weights). For each run we keep the
curves, the earliest epoch with the best eval accuracy, and the test score
of the parameters at that epoch.
"""

import logging
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd

from ..core.mlp import init_mlp
from .finetune import HARNESS, finetune
from .metrics import headline, score

logger = logging.getLogger(__name__)

try:
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt
    MATPLOTLIB_AVAILABLE = True
except ImportError:
    MATPLOTLIB_AVAILABLE = False
    logger.debug("matplotlib not installed, init-study figures disabled")

CURVE_COLUMNS = ['seed', 'epoch', 'train_loss', 'eval_loss', 'train_acc', 'eval_acc']
PANELS = [('train_loss', 'train loss'), ('eval_loss', 'eval loss'),
          ('train_acc', 'train accuracy (%)'), ('eval_acc', 'eval accuracy (%)')]


@dataclass
class InitStudy:
    task: str
    epochs_to_best_ours: list
    epochs_to_best_baseline: list
    curves_ours: pd.DataFrame
    curves_baseline: pd.DataFrame
    test_ours: list
    test_baseline: list

    @property
    def median_ours(self):
        return float(np.median(self.epochs_to_best_ours))

    @property
    def median_baseline(self):
        return float(np.median(self.epochs_to_best_baseline))

    def summary(self):
        return pd.DataFrame({
            'init': ['generated', 'fresh'],
            'median_epochs_to_best': [self.median_ours, self.median_baseline],
            'test_mean': [np.mean(self.test_ours), np.mean(self.test_baseline)],
            'test_std': [np.std(self.test_ours), np.std(self.test_baseline)],
        })


def _curves(seed, history):
    return [dict(seed=seed, **asdict(record)) for record in history]


def weight_init_study(model, dataset, settings, seeds=None, epochs=None):
    """Finetune from ``model``'s generated init and from fresh inits.

    ``model`` must come from the dataset's requirement alone (zero-shot).
    """
    seeds = settings.seeds if seeds is None else seeds
    epochs = settings.init_study_epochs if epochs is None else epochs
    task = dataset.task
    x_test, y_test = dataset.read('test', reader=HARNESS)
    spec = model.spec
    results = {'ours': ([], [], []), 'baseline': ([], [], [])}

    for seed in range(seeds):
        fresh = init_mlp(spec.in_dim, spec.hidden_dim, spec.n_layers, spec.out_dim,
                         np.random.default_rng([seed, 1]))
        for label, start in (('ours', model.params), ('baseline', fresh)):
            run = finetune(start, dataset, task, settings, np.random.default_rng([seed, 0]),
                           epochs=epochs, record=True)
            best, rows, tests = results[label]
            best.append(run.best_epoch)
            rows.extend(_curves(seed, run.history))
            tests.append(headline(score(run.best_params, x_test, y_test, task)))
        logger.info("Init study %s seed %d: best epoch %d (generated) vs %d (fresh)",
                    dataset.name, seed, results['ours'][0][-1], results['baseline'][0][-1])

    study = InitStudy(dataset.name, results['ours'][0], results['baseline'][0],
                      pd.DataFrame(results['ours'][1], columns=CURVE_COLUMNS),
                      pd.DataFrame(results['baseline'][1], columns=CURVE_COLUMNS),
                      results['ours'][2], results['baseline'][2])
    logger.info("Init study %s: median epochs to best %.1f (generated) vs %.1f (fresh)",
                dataset.name, study.median_ours, study.median_baseline)
    return study


def plot_init_study(study, path):
    """Four panels, mean over seeds with a one-std band, best eval epoch dotted."""
    if not MATPLOTLIB_AVAILABLE:
        logger.warning("matplotlib not available, skipping %s", path)
        return None
    fig, axes = plt.subplots(2, 2, figsize=(10, 7), sharex=True)
    for ax, (column, title) in zip(axes.ravel(), PANELS):
        for label, curves, color in (('generated init', study.curves_ours, 'tab:red'),
                                     ('fresh init', study.curves_baseline, 'tab:blue')):
            stats = curves.groupby('epoch')[column].agg(['mean', 'std']).fillna(0.0)
            ax.plot(stats.index, stats['mean'], color=color, label=label)
            ax.fill_between(stats.index, stats['mean'] - stats['std'],
                            stats['mean'] + stats['std'], color=color, alpha=0.2)
            if column == 'eval_acc':
                best = stats['mean'].idxmax()
                ax.plot([best], [stats['mean'][best]], 'o', color=color)
        ax.set_title(title)
        ax.set_xlabel('epoch')
    axes[0, 0].legend()
    fig.suptitle(f'{study.task}: generated vs fresh initialisation')
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    logger.info("Wrote %s", path)
    return path
