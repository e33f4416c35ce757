"""Prompt construction for the requirement summarizer.

A template is plain text: the rules, one worked example, and two final
lines with ``{USER_DATA}`` / ``{USER_DESCRIPTION}`` slots. A slot line is
dropped when the user gave nothing for it.
"""

from pathlib import Path

from ..errors import InputError
from .schema import UserInput

TEMPLATE_DIR = Path(__file__).parent / 'templates'

DATA_SLOT = '{USER_DATA}'
DESCRIPTION_SLOT = '{USER_DESCRIPTION}'

# both rules are quoted verbatim by every template
RULE_TASK_TYPE = 'The type of the task must be pointed out in the final sentence'
RULE_DATA_FOCUS = 'must only focus on the data itself rather than the labels given'


def load_template(modality):
    path = TEMPLATE_DIR / f'{modality}.txt'
    if not path.is_file():
        raise InputError(f"no prompt template for modality {modality!r}")
    return path.read_text(encoding='utf-8')


def render_rows(rows, max_rows=8):
    return '\n'.join(f'{features} -> {label}' for features, label in rows[:max_rows])


def build_prompt(user_input, max_rows=8):
    if user_input is None:
        raise InputError("nothing to build a prompt from")
    if not isinstance(user_input, UserInput):
        raise InputError(f"expected UserInput, got {type(user_input).__name__}")
    template = load_template(user_input.modality)

    data = render_rows(user_input.data_sample, max_rows) if user_input.data_sample else None
    description = user_input.description.strip() if user_input.description else None

    lines = []
    for line in template.splitlines():
        if DATA_SLOT in line:
            if data is None:
                continue
            line = line.replace(DATA_SLOT, '\n' + data)
        if DESCRIPTION_SLOT in line:
            if description is None:
                continue
            line = line.replace(DESCRIPTION_SLOT, description)
        lines.append(line)
    return '\n'.join(lines) + '\n'


def user_input_from_frame(frame, label_column, description=None, max_rows=8,
                          modality='tabular'):
    """First ``max_rows`` rows of a DataFrame as a UserInput sample."""
    features = [c for c in frame.columns if c != label_column]
    rows = []
    for _, record in frame.head(max_rows).iterrows():
        rendered = ', '.join(f'{c}={record[c]}' for c in features)
        rows.append((rendered, str(record[label_column])))
    return UserInput(description=description, data_sample=rows, modality=modality)
