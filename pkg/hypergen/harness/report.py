import logging
import math
from pathlib import Path

from .init_study import plot_init_study

logger = logging.getLogger(__name__)

METHOD_LABELS = {'finetune': 'Finetune', 'lora': 'LoRA', 'modelgpt': 'ModelGPT',
                 'modelgpt_f': 'ModelGPT-F'}


def _fmt(value, digits=1):
    if isinstance(value, str):
        return value
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return '-'
    if isinstance(value, int):
        return str(value)
    return f'{value:.{digits}f}'


def markdown_table(header, rows):
    lines = ['| ' + ' | '.join(header) + ' |',
             '|' + '|'.join(['---'] * len(header)) + '|']
    for row in rows:
        lines.append('| ' + ' | '.join(_fmt(v) for v in row) + ' |')
    return '\n'.join(lines)


def grid_markdown(report):
    """Methods as rows, tasks then Avg, #Epoch, E2E runtime and relative efficiency as columns."""
    scores = report.scores()
    averages = report.averages()
    header = ['Method'] + list(report.tasks) + ['Avg', '#Epoch', 'E2E Runtime (s)',
                                                 'Relative Efficiency']
    rows = []
    for method in report.methods:
        avg = averages.loc[method]
        rows.append([METHOD_LABELS.get(method, method)]
                    + [float(scores.loc[method, task]) for task in report.tasks]
                    + [float(avg['score']), int(round(avg['epochs'])),
                       _fmt(float(avg['runtime_s']), 3), float(avg['relative_efficiency'])])
    return markdown_table(header, rows)


def write_report(report, out_dir, zero_shot=()):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report.frame().to_csv(out_dir / 'results.csv', index=False)
    sections = ['# Results', '', grid_markdown(report), '']
    if report.checkpoint_id:
        sections += [f'All generated cells use hypernetwork checkpoint `{report.checkpoint_id}`.', '']
    if zero_shot:
        sections += ['## Zero-shot tasks', '',
                     markdown_table(['Task', 'Majority class', 'Generated', 'Finetune'],
                                    [[z.task, z.majority, z.generated, z.finetune]
                                     for z in zero_shot]),
                     '',
                     'Trainer reads of zero-shot data: '
                     + ', '.join(f'{name}={n}' for name, n in report.zero_shot.items()), '']
    (out_dir / 'results.md').write_text('\n'.join(sections))
    logger.info("Wrote %s and %s", out_dir / 'results.csv', out_dir / 'results.md')


def write_study(study, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    study.curves_ours.to_csv(out_dir / 'curves_generated.csv', index=False)
    study.curves_baseline.to_csv(out_dir / 'curves_fresh.csv', index=False)
    summary = study.summary()
    rows = [[row.init, row.median_epochs_to_best, f'{row.test_mean:.1f} ± {row.test_std:.1f}']
            for row in summary.itertuples()]
    text = ['# Weight initialisation study', '', f'Task: {study.task}', '',
            markdown_table(['Init', 'Median epochs to best', 'Test score at best'], rows), '']
    (out_dir / 'init_study.md').write_text('\n'.join(text))
    plot_init_study(study, out_dir / 'init_study.png')


def write_reports(result, out_dir):
    write_report(result.report, out_dir, result.zero_shot)
    if result.study is not None:
        write_study(result.study, out_dir)
