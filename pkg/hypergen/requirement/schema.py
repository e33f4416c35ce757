from dataclasses import dataclass, field
from typing import Optional

from ..errors import InputError

MODALITIES = ('tabular', 'text')
SOURCES = ('llm', 'template')
TASK_KINDS = ('classification', 'regression')


@dataclass(frozen=True)
class UserInput:
    """What the user hands over: a description, a few labelled rows, or both.

    ``data_sample`` rows are ``(features rendered as text, label rendered as text)``.
    """
    description: Optional[str] = None
    data_sample: tuple = ()
    modality: str = 'tabular'

    def __post_init__(self):
        if self.modality not in MODALITIES:
            raise InputError(f"modality must be one of {MODALITIES}, got {self.modality!r}")
        object.__setattr__(self, 'data_sample', tuple(tuple(row) for row in self.data_sample))
        if not (self.description and self.description.strip()) and not self.data_sample:
            raise InputError("user input needs a description or a data sample")


@dataclass(frozen=True)
class TaskMeta:
    task_type: str
    n_features: int
    n_classes: Optional[int] = None
    domain_tag: Optional[str] = None

    def __post_init__(self):
        if self.task_type not in TASK_KINDS:
            raise InputError(f"task_type must be one of {TASK_KINDS}, got {self.task_type!r}")
        if self.n_features < 1:
            raise InputError(f"n_features must be >= 1, got {self.n_features}")


@dataclass(frozen=True)
class Requirement:
    sentence: str
    source: str = 'template'
    task_hint: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.sentence or not self.sentence.strip():
            raise InputError("a requirement sentence cannot be empty")
        if self.source not in SOURCES:
            raise InputError(f"source must be one of {SOURCES}, got {self.source!r}")
