# Default settings for desk-scale tabular runs.
#
#   section       consumed by
#   -----------   ------------------------------------------------
#   train         training.trainer (meta-training loop)
#   encoder       hypernet.encoder / hypernet.network
#   model         hypernet.architecture (size profile, rule table file)
#   lora          harness.baselines (LoRA baseline), hypernet.registry
#   finetune      harness.baselines, harness.init_study
#   data          cli.start (task kind of CSV inputs)
#   requirement   requirement.prompt
#   llm           requirement.client
#   protocol      harness.experiment (synthetic suite, zero-shot split)
#
# A TOML file passed with --config overrides any subset of these keys.

import copy
import logging
import os
import sys
from dataclasses import dataclass, fields

from .errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)

LLM_KEY_ENV = 'MODELGPT_LLM_KEY'

DEFAULTS = {
    'train': {
        'epochs': 80,
        'batch_size': 64,
        'latent_dim': 25,
        'hyper_lr': 1e-3,
        'hyper_weight_decay': 1e-4,
        'target_lr': 2e-2,
        'target_weight_decay': 1e-4,
        'beta1': 0.9,
        'beta2': 0.999,
        'eps': 1e-8,
        'inner_optimizer': 'adam',
        'base_batches': 0,
        'eval_workers': 1,
        'seed': 2024,
    },
    'encoder': {
        'vocab_size': 4096,
        'dim': 64,
    },
    'model': {
        'hidden_dim': 32,
        'n_layers': 1,
        'rules': '',
    },
    'lora': {
        'r': 4,
        'alpha': 8.0,
        'dropout': 0.1,
        'target_modules': r'mlp\.\d.*',
        'hidden_dim': 32,
        'n_layers': 0,
        'bias': 'none',
    },
    'finetune': {
        'epochs': 20,
        'lr': 2e-2,
        'weight_decay': 1e-4,
        'batch_size': 64,
        'init_study_epochs': 40,
        'seeds': 5,
    },
    'data': {
        'kind': 'classification',
    },
    'requirement': {
        'max_rows': 8,
    },
    'llm': {
        'endpoint': 'https://api.openai.com/v1/chat/completions',
        'model': 'gpt-4',
        'timeout': 60.0,
        'retries': 1,
    },
    'protocol': {
        'k_tasks': 6,
        'siblings': 1,
        'methods': 'finetune,lora,modelgpt,modelgpt_f',
    },
}


def default_settings():
    return copy.deepcopy(DEFAULTS)


def merge_settings(settings, overrides):
    """Overlay ``overrides`` onto ``settings`` section by section."""
    merged = copy.deepcopy(settings)
    for section, values in overrides.items():
        if section not in merged:
            raise ConfigError(f"Unknown config section [{section}]")
        if not isinstance(values, dict):
            raise ConfigError(f"Config section [{section}] must be a table")
        unknown = set(values) - set(merged[section])
        if unknown:
            raise ConfigError(f"Unknown keys in [{section}]: {', '.join(sorted(unknown))}")
        merged[section].update(values)
    return merged


def load_config(path=None):
    """Read a TOML settings file on top of the defaults."""
    settings = default_settings()
    if path is None:
        return settings
    try:
        with open(path, 'rb') as handle:
            overrides = tomllib.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"Config file not found: {path}") from None
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Config file {path} is not valid TOML: {e}") from None
    logger.info("Loaded config overrides from %s", path)
    return merge_settings(settings, overrides)


def llm_key():
    key = os.environ.get(LLM_KEY_ENV)
    if not key:
        raise ConfigError(f"Environment variable {LLM_KEY_ENV} is not set")
    return key


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 80
    batch_size: int = 64
    latent_dim: int = 25
    hyper_lr: float = 1e-3
    hyper_weight_decay: float = 1e-4
    target_lr: float = 2e-2
    target_weight_decay: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    inner_optimizer: str = 'adam'
    base_batches: int = 0
    eval_workers: int = 1
    seed: int = 2024
    encoder_vocab: int = 4096
    encoder_dim: int = 64
    hidden_dim: int = 32
    n_layers: int = 1
    progress: bool = False

    def __post_init__(self):
        for name in ('epochs', 'batch_size', 'latent_dim', 'eval_workers',
                     'encoder_vocab', 'encoder_dim', 'hidden_dim'):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ('hyper_lr', 'hyper_weight_decay', 'target_lr',
                     'target_weight_decay', 'base_batches', 'n_layers', 'seed'):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative, got {getattr(self, name)}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ConfigError("Adam betas must lie in [0, 1)")
        if self.inner_optimizer not in ('adam', 'sgd'):
            raise ConfigError(f"inner_optimizer must be 'adam' or 'sgd', got {self.inner_optimizer!r}")

    @classmethod
    def from_settings(cls, settings, **overrides):
        values = dict(settings['train'])
        values['encoder_vocab'] = settings['encoder']['vocab_size']
        values['encoder_dim'] = settings['encoder']['dim']
        values['hidden_dim'] = settings['model']['hidden_dim']
        values['n_layers'] = settings['model']['n_layers']
        values.update(overrides)
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in values.items() if k in known})
