"""Requirement sentence -> task type -> target architecture.

The mapping is a keyword rule table. The defaults cover the template
grammar (``tabular classification into K classes task on N-dimensional
rows``) and the usual free-form phrasings; a TOML file with a ``[rules]``
table can add more without touching the code.
"""

import json
import re
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

from ..errors import ConfigError, InputError, UnrecognizedRequirementError
from ..requirement.schema import TASK_KINDS
from .encoder import tokenize

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

FAMILIES = ('mlp', 'dense')
ADAPTER_MODES = ('full_weights', 'lora')

_TEMPLATE = re.compile(r'\btabular (?:classification into (\d+) classes|regression) task\b')
_INTO_K = re.compile(r'\binto (\d+) (?:classes|categories)\b')
_K_CLASS = re.compile(r'\b(\d+)[- ](?:class|way)\b')
_N_DIM = re.compile(r'\b(\d+)-dimensional\b')


@dataclass(frozen=True)
class RuleTable:
    regression: tuple = ('regression', 'regress', 'regressor')
    classification: tuple = ('classification', 'classify', 'classifying', 'classifier',
                             'analysis', 'categorization')
    binary: tuple = ('binary',)

    @classmethod
    def load(cls, path):
        try:
            with open(path, 'rb') as handle:
                data = tomllib.load(handle)
        except FileNotFoundError:
            raise ConfigError(f"Rule table not found: {path}") from None
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"Rule table {path} is not valid TOML: {e}") from None
        rules = data.get('rules', {})
        unknown = set(rules) - {'regression', 'classification', 'binary'}
        if unknown:
            raise ConfigError(f"Unknown rule keys: {', '.join(sorted(unknown))}")
        table = asdict(cls())
        for name, words in rules.items():
            table[name] = tuple(table[name]) + tuple(w.lower() for w in words)
        return cls(**table)

    @classmethod
    def from_settings(cls, settings):
        """The table named by ``[model] rules``, or the built-in one when unset."""
        path = settings['model'].get('rules')
        return cls.load(path) if path else DEFAULT_RULES


DEFAULT_RULES = RuleTable()


@dataclass(frozen=True)
class TaskType:
    kind: str
    n_classes: Optional[int] = None
    n_inputs: Optional[int] = None

    def __post_init__(self):
        if self.kind not in TASK_KINDS:
            raise InputError(f"task kind must be one of {TASK_KINDS}, got {self.kind!r}")
        if self.kind == 'classification' and self.n_classes is not None and self.n_classes < 2:
            raise InputError(f"classification needs n_classes >= 2, got {self.n_classes}")
        if self.kind == 'regression' and self.n_classes is not None:
            raise InputError("regression tasks have no class count")
        if self.n_inputs is not None and self.n_inputs < 1:
            raise InputError(f"n_inputs must be >= 1, got {self.n_inputs}")

    @property
    def is_classification(self):
        return self.kind == 'classification'

    @property
    def resolved(self):
        return self.n_inputs is not None and (not self.is_classification or self.n_classes is not None)

    @property
    def out_dim(self):
        return self.n_classes if self.is_classification else 1


@dataclass(frozen=True)
class SizeProfile:
    hidden_dim: int = 32
    n_layers: int = 1

    @classmethod
    def from_settings(cls, settings):
        return cls(int(settings['model']['hidden_dim']), int(settings['model']['n_layers']))


@dataclass(frozen=True)
class LoraConfig:
    r: int = 4
    alpha: float = 8.0
    dropout: float = 0.1
    target_modules: str = r'mlp\.\d.*'
    bias: str = 'none'

    def __post_init__(self):
        if self.r < 1:
            raise ConfigError(f"lora r must be positive, got {self.r}")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"lora dropout must lie in [0, 1), got {self.dropout}")
        if self.bias not in ('none', 'all'):
            raise ConfigError(f"lora bias must be 'none' or 'all', got {self.bias!r}")

    def targets(self, name):
        return re.fullmatch(self.target_modules, name) is not None

    @classmethod
    def from_settings(cls, settings):
        lora = settings['lora']
        return cls(r=int(lora['r']), alpha=float(lora['alpha']), dropout=float(lora['dropout']),
                   target_modules=lora['target_modules'], bias=lora['bias'])


@dataclass(frozen=True)
class ArchitectureSpec:
    in_dim: int
    out_dim: int
    hidden_dim: int = 32
    n_layers: int = 1
    family: str = 'mlp'
    adapter_mode: str = 'full_weights'
    lora_config: Optional[LoraConfig] = None
    task: Optional[TaskType] = field(default=None, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.adapter_mode not in ADAPTER_MODES:
            raise InputError(f"adapter_mode must be one of {ADAPTER_MODES}, got {self.adapter_mode!r}")
        if self.family == 'mlp' and self.adapter_mode != 'full_weights':
            raise InputError("mlp targets are generated as full weights")
        if self.adapter_mode == 'lora' and self.lora_config is None:
            raise InputError("lora mode needs a lora_config")
        if min(self.in_dim, self.out_dim, self.hidden_dim) < 1 or self.n_layers < 0:
            raise InputError(f"invalid layer sizes in {self}")

    def to_dict(self):
        out = asdict(self)
        out['task'] = asdict(self.task) if self.task is not None else None
        return out

    def to_text(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(',', ':'))

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        if data.get('lora_config') is not None:
            data['lora_config'] = LoraConfig(**data['lora_config'])
        if data.get('task') is not None:
            data['task'] = TaskType(**data['task'])
        return cls(**data)

    @classmethod
    def dense_lora(cls, in_dim, out_dim, lora_config, hidden_dim=32, n_layers=0, task=None):
        return cls(in_dim=in_dim, out_dim=out_dim, hidden_dim=hidden_dim, n_layers=n_layers,
                   family='dense', adapter_mode='lora', lora_config=lora_config, task=task)


def _hint(requirement, key):
    hint = getattr(requirement, 'task_hint', None) or {}
    return hint.get(key)


def infer_task_type(requirement, meta=None, rules=DEFAULT_RULES):
    """Read the task kind and sizes off a requirement sentence.

    Counts the sentence does not state are taken from ``meta`` (a TaskMeta)
    when given, and otherwise left unset.
    """
    sentence = requirement.sentence if hasattr(requirement, 'sentence') else str(requirement)
    text = sentence.lower()
    if not text.strip():
        raise InputError("empty requirement sentence")
    tokens = set(tokenize(text))

    kind = None
    n_classes = None
    template = _TEMPLATE.search(text)
    if template:
        if template.group(1) is not None:
            kind, n_classes = 'classification', int(template.group(1))
        else:
            kind = 'regression'
    elif tokens & set(rules.regression):
        kind = 'regression'
    elif tokens & set(rules.classification):
        kind = 'classification'
    if kind is None:
        raise UnrecognizedRequirementError(f"no task type found in {sentence!r}")

    if kind == 'classification' and n_classes is None:
        match = _INTO_K.search(text) or _K_CLASS.search(text)
        if match:
            n_classes = int(match.group(1))
        elif tokens & set(rules.binary):
            n_classes = 2
        elif meta is not None and meta.n_classes is not None:
            n_classes = meta.n_classes
        else:
            n_classes = _hint(requirement, 'n_classes')

    match = _N_DIM.search(text)
    if match:
        n_inputs = int(match.group(1))
    elif meta is not None:
        n_inputs = meta.n_features
    else:
        n_inputs = _hint(requirement, 'n_features')

    return TaskType(kind, n_classes if kind == 'classification' else None, n_inputs)


def build_arch_spec(task, profile=SizeProfile()):
    if task.n_inputs is None:
        raise InputError("cannot size the target: the input dimension is unknown")
    if task.is_classification and task.n_classes is None:
        raise InputError("cannot size the target: the class count is unknown")
    return ArchitectureSpec(in_dim=task.n_inputs, out_dim=task.out_dim,
                            hidden_dim=profile.hidden_dim, n_layers=profile.n_layers,
                            family='mlp', adapter_mode='full_weights', task=task)
