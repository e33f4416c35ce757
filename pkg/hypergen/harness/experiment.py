"""Method x task comparison grid and the end-to-end protocol."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..config import TrainConfig
from ..data.dataset import AccessLog
from ..data.synthetic import make_synthetic_suite
from ..errors import ConsistencyError, InputError
from ..hypernet.architecture import RuleTable
from ..training.trainer import TRAINER, train
from .artifact import save_checkpoint
from .baselines import METHODS, build_baseline, score_baseline
from .finetune import FinetuneSettings
from .init_study import weight_init_study
from .metrics import headline
from .report import write_reports

logger = logging.getLogger(__name__)


@dataclass
class ExperimentReport:
    """Results grid in fixed (method, task) order."""
    methods: list
    tasks: list
    cells: list
    zero_shot: dict = field(default_factory=dict)
    checkpoint_id: str = None

    def __post_init__(self):
        # relative efficiency per task: slowest method on that task / this method
        slowest = {}
        for cell in self.cells:
            slowest[cell.task] = max(slowest.get(cell.task, 0.0), cell.runtime_s)
        for cell in self.cells:
            cell.relative_efficiency = slowest[cell.task] / max(cell.runtime_s, 1e-12)

    def cell(self, method, task):
        for c in self.cells:
            if c.method == method and c.task == task:
                return c
        raise KeyError((method, task))

    def frame(self):
        rows = []
        for c in self.cells:
            row = {'method': c.method, 'task': c.task, 'zero_shot': c.task in self.zero_shot,
                   'epochs': c.epochs, 'runtime_s': c.runtime_s,
                   'relative_efficiency': c.relative_efficiency}
            row.update(c.metrics)
            row['score'] = headline(c.metrics)
            rows.append(row)
        return pd.DataFrame(rows)

    def averages(self):
        """Per method: mean score, mean runtime, and efficiency against the slowest method."""
        grid = self.frame()
        out = grid.groupby('method', sort=False).agg(score=('score', 'mean'),
                                                     epochs=('epochs', 'mean'),
                                                     runtime_s=('runtime_s', 'mean'))
        out['relative_efficiency'] = out['runtime_s'].max() / out['runtime_s'].clip(lower=1e-12)
        return out.reindex(self.methods)

    def scores(self):
        """Method x task table of headline scores."""
        return self.frame().pivot(index='method', columns='task', values='score').reindex(
            index=self.methods, columns=self.tasks)


def _check_isolation(pairs):
    report = {}
    for pair in pairs:
        if not pair.held_out:
            continue
        log = pair.dataset.access_log
        reads = log.reads(pair.name, TRAINER) if log is not None else 0
        if reads:
            raise ConsistencyError(f"zero-shot task {pair.name} was read {reads} times by the trainer")
        report[pair.name] = reads
    return report


def run_experiment(pairs, settings, checkpoint=None, methods=METHODS, seed=2024, workers=1,
                   progress=False):
    """Every method on every pair, one hypernetwork checkpoint for all generated cells."""
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise InputError(f"unknown methods: {', '.join(sorted(unknown))}")
    network = checkpoint.network() if checkpoint is not None else None
    rules = RuleTable.from_settings(settings)
    grid = [(method, pair) for method in methods for pair in pairs]

    # timed builds stay on one thread; only test-split scoring is spread over workers
    bar = dict(total=len(grid), desc='bench', unit='cell', disable=not progress)
    built = [(build_baseline(method, pair, settings, network, seed, rules), pair)
             for method, pair in tqdm(grid, **bar)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(lambda job: score_baseline(*job), built))
    else:
        cells = [score_baseline(result, pair) for result, pair in built]

    ids = {c.checkpoint_id for c in cells if c.checkpoint_id is not None}
    if len(ids) > 1:
        raise ConsistencyError(f"generated cells used {len(ids)} different checkpoints")
    report = ExperimentReport(list(methods), [p.name for p in pairs], cells,
                              _check_isolation(pairs), ids.pop() if ids else None)
    for method, row in report.averages().iterrows():
        logger.info("%-10s mean score %.2f, runtime %.3fs, relative efficiency %.1f",
                    method, row['score'], row['runtime_s'], row['relative_efficiency'])
    return report


@dataclass
class ZeroShotResult:
    task: str
    majority: float
    generated: float
    finetune: float


def zero_shot_summary(report, pairs):
    out = []
    for pair in pairs:
        if not pair.held_out or 'modelgpt' not in report.methods:
            continue
        finetune = (headline(report.cell('finetune', pair.name).metrics)
                    if 'finetune' in report.methods else float('nan'))
        out.append(ZeroShotResult(pair.name, pair.dataset.majority_accuracy('test'),
                                  headline(report.cell('modelgpt', pair.name).metrics), finetune))
    return out


@dataclass
class ProtocolResult:
    checkpoint: object
    report: ExperimentReport
    zero_shot: list
    study: object = None


def build_suite(settings, seed=None, extra_pairs=(), access_log=None):
    protocol = settings['protocol']
    seed = settings['train']['seed'] if seed is None else seed
    access_log = access_log if access_log is not None else AccessLog()
    pairs = make_synthetic_suite(seed, int(protocol['k_tasks']), int(protocol['siblings']),
                                 access_log=access_log)
    for pair in extra_pairs:
        if pair.dataset.access_log is None:
            pair.dataset.access_log = access_log
    return list(extra_pairs) + pairs


def run_protocol(settings, out_dir, pairs=None, methods=None, progress=False, study=True):
    """Meta-train once on the seen tasks, then grid, zero-shot check and init study."""
    out_dir = Path(out_dir)
    pairs = build_suite(settings) if pairs is None else pairs
    seen = [pair for pair in pairs if not pair.held_out]
    methods = methods or [m.strip() for m in settings['protocol']['methods'].split(',')]
    cfg = TrainConfig.from_settings(settings, progress=progress)

    rules = RuleTable.from_settings(settings)
    checkpoint = train(seen, cfg, rules=rules)
    save_checkpoint(checkpoint, out_dir / 'hypernet.mgpt')
    report = run_experiment(pairs, settings, checkpoint, methods, cfg.seed, progress=progress)
    zero_shot = zero_shot_summary(report, pairs)
    for z in zero_shot:
        logger.info("Zero-shot %s: generated %.1f, majority %.1f, finetune %.1f",
                    z.task, z.generated, z.majority, z.finetune)

    result = ProtocolResult(checkpoint, report, zero_shot)
    if study:
        target = next((p for p in pairs if p.held_out), pairs[0])
        model = checkpoint.network().generate_model(target.requirement, rules)
        result.study = weight_init_study(model, target.dataset,
                                         FinetuneSettings.from_settings(settings))
    write_reports(result, out_dir)
    return result


def mean_score(report, method, zero_shot=None):
    grid = report.frame()
    grid = grid[grid['method'] == method]
    if zero_shot is not None:
        grid = grid[grid['zero_shot'] == zero_shot]
    return float(np.mean(grid['score']))
