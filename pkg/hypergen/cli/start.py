#!/usr/bin/env python3
"""
hypergen command line entry point
"""

import argparse
import logging
import sys
from pathlib import Path

from ..config import TrainConfig, load_config
from ..data.csv_task import CsvSchema, load_csv_task, read_frame
from ..data.dataset import AccessLog
from ..errors import HypergenError, InputError
from ..harness.artifact import load_checkpoint, save_checkpoint, save_model
from ..harness.experiment import build_suite, run_experiment, run_protocol, zero_shot_summary
from ..harness.finetune import FinetuneSettings
from ..harness.init_study import weight_init_study
from ..harness.report import write_report, write_study
from ..hypernet.architecture import RuleTable
from ..requirement.client import ChatClient
from ..requirement.prompt import user_input_from_frame
from ..requirement.schema import TASK_KINDS, Requirement
from ..requirement.template import RequirementGenerator, fallback_template
from ..training.pairs import TaskRequirementPair
from ..training.trainer import train

logger = logging.getLogger('hypergen')

SYNTHETIC = 'synthetic'


def task_kind(args, settings):
    return getattr(args, 'kind', None) or settings['data']['kind']


def load_pairs(sources, settings, kind=None, access_log=None):
    """CSV files, directories of CSV files, and the ``synthetic`` suite."""
    kind = kind or settings['data']['kind']
    access_log = access_log or AccessLog()
    csv_pairs = []
    synthetic = False
    for source in sources:
        if source == SYNTHETIC:
            synthetic = True
            continue
        path = Path(source)
        files = sorted(path.glob('*.csv')) if path.is_dir() else [path]
        if not files:
            raise InputError(f"no CSV files in {path}")
        for file in files:
            dataset = load_csv_task(file, CsvSchema(kind=kind), settings['train']['seed'],
                                    access_log)
            csv_pairs.append(TaskRequirementPair(dataset, fallback_template(dataset.meta)))
    if synthetic:
        return build_suite(settings, extra_pairs=csv_pairs, access_log=access_log)
    return csv_pairs


def cmd_train(args, settings):
    pairs = load_pairs(args.tasks, settings, task_kind(args, settings))
    pairs = [p for p in pairs if not p.held_out]
    cfg = TrainConfig.from_settings(settings, progress=not args.quiet)
    checkpoint = train(pairs, cfg, rules=RuleTable.from_settings(settings))
    save_checkpoint(checkpoint, args.out)
    logger.info("Checkpoint %s (epoch %d, eval loss %.4f) saved to %s",
                checkpoint.checkpoint_id, checkpoint.epoch, checkpoint.avg_eval_loss, args.out)
    return 0


def cmd_generate(args, settings):
    network = load_checkpoint(args.ckpt).network()
    model = network.generate_model(Requirement(args.requirement), RuleTable.from_settings(settings))
    save_model(model, args.out)
    print(model.spec.to_text())
    return 0


def cmd_bench(args, settings):
    methods = [m.strip() for m in (args.methods or settings['protocol']['methods']).split(',')]
    pairs = load_pairs(args.tasks, settings, task_kind(args, settings))
    if args.ckpt is None:
        run_protocol(settings, args.report, pairs, methods, progress=not args.quiet,
                     study=not args.no_study)
        print((Path(args.report) / 'results.md').read_text())
        return 0
    checkpoint = load_checkpoint(args.ckpt)
    report = run_experiment(pairs, settings, checkpoint, methods, settings['train']['seed'],
                            workers=args.workers, progress=not args.quiet)
    write_report(report, args.report, zero_shot_summary(report, pairs))
    print((Path(args.report) / 'results.md').read_text())
    return 0


def cmd_init_study(args, settings):
    network = load_checkpoint(args.ckpt).network()
    dataset = load_csv_task(args.task, CsvSchema(kind=task_kind(args, settings)),
                            settings['train']['seed'])
    requirement = fallback_template(dataset.meta)
    model = network.generate_model(requirement, RuleTable.from_settings(settings))
    study = weight_init_study(model, dataset, FinetuneSettings.from_settings(settings),
                              seeds=args.seeds)
    write_study(study, args.report)
    print(study.summary().to_string(index=False))
    return 0


def cmd_requirement(args, settings):
    dataset = load_csv_task(args.data, CsvSchema(label_column=args.label_column,
                                                 kind=task_kind(args, settings)),
                            settings['train']['seed'])
    frame = read_frame(args.data)
    label_column = args.label_column or frame.columns[-1]
    max_rows = int(settings['requirement']['max_rows'])
    user_input = user_input_from_frame(frame, label_column, args.description, max_rows)
    client = ChatClient.from_settings(settings) if args.llm else None
    generator = RequirementGenerator(client, max_rows, RuleTable.from_settings(settings))
    requirement = generator.resolve(dataset.meta, user_input)
    print(requirement.sentence)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog='hypergen',
                                     description='Generate task-specific models from requirements')
    parser.add_argument('-v', '--verbose', action='store_true', help='debug logging')
    parser.add_argument('-q', '--quiet', action='store_true', help='no progress bars')
    parser.add_argument('--config', help='TOML file overriding the default settings')
    commands = parser.add_subparsers(dest='command', required=True)

    p = commands.add_parser('train', help='meta-train a hypernetwork')
    p.add_argument('--tasks', nargs='+', required=True, help="CSV files, directories or 'synthetic'")
    p.add_argument('--out', required=True, help='checkpoint file to write')
    p.add_argument('--kind', choices=TASK_KINDS, help='CSV task kind, default from [data] kind')
    p.set_defaults(func=cmd_train)

    p = commands.add_parser('generate', help='generate a model from one requirement sentence')
    p.add_argument('--ckpt', required=True)
    p.add_argument('--requirement', required=True)
    p.add_argument('--out', required=True, help='model artifact to write')
    p.set_defaults(func=cmd_generate)

    p = commands.add_parser('bench', help='run the method x task comparison grid')
    p.add_argument('--ckpt', help='trained checkpoint; without it the full protocol runs')
    p.add_argument('--tasks', nargs='+', required=True, help="CSV files, directories or 'synthetic'")
    p.add_argument('--methods', help='comma separated, default from [protocol] methods')
    p.add_argument('--report', required=True, help='report directory')
    p.add_argument('--workers', type=int, default=1)
    p.add_argument('--no-study', action='store_true', help='skip the weight-init study')
    p.add_argument('--kind', choices=TASK_KINDS, help='CSV task kind, default from [data] kind')
    p.set_defaults(func=cmd_bench)

    p = commands.add_parser('init-study', help='generated vs fresh initialisation')
    p.add_argument('--ckpt', required=True)
    p.add_argument('--task', required=True, help='CSV file')
    p.add_argument('--seeds', type=int, default=None)
    p.add_argument('--report', required=True)
    p.add_argument('--kind', choices=TASK_KINDS, help='CSV task kind, default from [data] kind')
    p.set_defaults(func=cmd_init_study)

    p = commands.add_parser('requirement', help='summarize a dataset into a requirement sentence')
    p.add_argument('--data', required=True, help='CSV file')
    p.add_argument('--description')
    p.add_argument('--label-column')
    p.add_argument('--llm', action='store_true', help='ask the chat endpoint, template otherwise')
    p.add_argument('--kind', choices=TASK_KINDS, help='CSV task kind, default from [data] kind')
    p.set_defaults(func=cmd_requirement)
    return parser


def main(argv=None):
    """Main application entry point"""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
                        stream=sys.stdout)
    try:
        settings = load_config(args.config)
        return args.func(args, settings)
    except HypergenError as e:
        logger.error("%s", e)
        return 1


if __name__ == "__main__":
    sys.exit(main())
