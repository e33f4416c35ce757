from dataclasses import dataclass

from ..errors import InputError
from ..hypernet.architecture import DEFAULT_RULES, build_arch_spec, infer_task_type
from ..requirement.schema import Requirement


@dataclass
class TaskRequirementPair:
    """A dataset and the sentence that describes it.

    ``held_out`` pairs are zero-shot tasks: the trainer refuses them and
    only their requirement is ever shown to the hypernetwork.
    """
    dataset: object
    requirement: Requirement
    portion: float = 1.0
    held_out: bool = False

    def __post_init__(self):
        if not self.portion > 0:
            raise InputError(f"{self.name}: portion must be positive, got {self.portion}")
        if self.dataset.n_rows == 0:
            raise InputError(f"{self.name}: dataset is empty")

    @property
    def name(self):
        return self.dataset.name

    def validate(self, rules=DEFAULT_RULES):
        """Check the sentence against the data and return the dataset's TaskType."""
        inferred = infer_task_type(self.requirement, rules=rules)
        task = self.dataset.task
        if inferred.kind != task.kind:
            raise InputError(f"{self.name}: requirement says {inferred.kind}, data is {task.kind}")
        if inferred.n_classes is not None and inferred.n_classes != task.n_classes:
            raise InputError(f"{self.name}: requirement says {inferred.n_classes} classes, "
                             f"data has {task.n_classes}")
        if inferred.n_inputs is not None and inferred.n_inputs != self.dataset.n_features:
            raise InputError(f"{self.name}: requirement says {inferred.n_inputs} features, "
                             f"data has {self.dataset.n_features}")
        return task

    def arch_spec(self, profile, rules=DEFAULT_RULES):
        return build_arch_spec(self.validate(rules), profile)
