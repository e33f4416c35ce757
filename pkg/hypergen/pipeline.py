from pathlib import Path

from .config import TrainConfig, load_config
from .harness.artifact import load_checkpoint, save_checkpoint, save_model
from .harness.experiment import run_experiment, zero_shot_summary
from .harness.report import write_report
from .hypernet.architecture import RuleTable
from .requirement.client import ChatClient
from .requirement.schema import Requirement
from .requirement.template import RequirementGenerator
from .training.trainer import train


class HyperGen:
    def __init__(self, config=None, checkpoint=None, llm=False):
        self.settings = load_config(config)
        self.rules = RuleTable.from_settings(self.settings)
        self.checkpoint = None
        self.network = None
        if checkpoint is not None:
            self.load(checkpoint)

        client = ChatClient.from_settings(self.settings) if llm else None
        self.requirements = RequirementGenerator(client, int(self.settings['requirement']['max_rows']),
                                                 self.rules)

    def load(self, path):
        self.checkpoint = load_checkpoint(path)
        self.network = self.checkpoint.network()

    def save(self, path):
        save_checkpoint(self.checkpoint, path)

    def train(self, pairs, **overrides):
        cfg = TrainConfig.from_settings(self.settings, **overrides)
        self.checkpoint = train([p for p in pairs if not p.held_out], cfg, rules=self.rules)
        self.network = self.checkpoint.network()
        return self.checkpoint

    def requirement(self, meta, user_input=None):
        return self.requirements.resolve(meta, user_input)

    def generate(self, requirement, out=None):
        if isinstance(requirement, str):
            requirement = Requirement(requirement)
        model = self.network.generate_model(requirement, self.rules)
        if out is not None:
            save_model(model, Path(out).expanduser())
        return model

    def bench(self, pairs, report_dir, methods=None):
        methods = methods or [m.strip() for m in self.settings['protocol']['methods'].split(',')]
        report = run_experiment(pairs, self.settings, self.checkpoint, methods,
                                self.settings['train']['seed'])
        write_report(report, report_dir, zero_shot_summary(report, pairs))
        return report
