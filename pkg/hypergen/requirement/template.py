import logging

from ..errors import ClientError, DegenerateResponseError, InputError, UnrecognizedRequirementError
from .client import summarize
from .prompt import build_prompt
from .schema import Requirement

logger = logging.getLogger(__name__)


def fallback_template(meta):
    """Offline requirement sentence built from the task's own metadata."""
    if meta.task_type == 'classification':
        if meta.n_classes is None or meta.n_classes < 2:
            raise InputError(f"classification needs at least 2 classes, got {meta.n_classes}")
        kind = f'classification into {meta.n_classes} classes'
    else:
        kind = 'regression'
    sentence = f'This is a tabular {kind} task on {meta.n_features}-dimensional rows'
    if meta.domain_tag:
        sentence += f' from {meta.domain_tag.strip().rstrip(".")}'
    return Requirement(sentence + '.', source='template',
                       task_hint={'n_features': meta.n_features, 'n_classes': meta.n_classes})


class RequirementGenerator:
    """LLM summary when a client is available, template sentence otherwise."""

    def __init__(self, client=None, max_rows=8, rules=None):
        self.client = client
        self.max_rows = max_rows
        self.rules = rules

    def resolve(self, meta, user_input=None):
        if self.client is not None and user_input is not None:
            prompt = build_prompt(user_input, self.max_rows)
            try:
                return summarize(prompt, self.client, self.rules)
            except (ClientError, DegenerateResponseError, UnrecognizedRequirementError) as e:
                logger.warning("LLM requirement unavailable (%s), using template", e)
        return fallback_template(meta)
