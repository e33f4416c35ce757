"""UCI-style CSV ingestion.

Numeric columns are used as-is, categorical feature columns are one-hot
encoded (categories in order of first appearance), classification labels
become ``0..C-1`` by sorted distinct value. Features are standardized on
the train split of a seeded 70/15/15 split.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from ..errors import IngestionError, InputError
from ..hypernet.architecture import TaskType
from ..requirement.schema import TaskMeta
from .dataset import build_dataset

logger = logging.getLogger(__name__)

# a column counts as numeric when at least this share of its cells parse
NUMERIC_SHARE = 0.5


@dataclass(frozen=True)
class CsvSchema:
    label_column: Optional[str] = None
    kind: str = 'classification'
    name: Optional[str] = None
    domain_tag: Optional[str] = None


def read_frame(path):
    path = Path(path)
    if not path.is_file():
        raise IngestionError(f"no such file: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise IngestionError(f"cannot parse {path}: {e}") from e
    if frame.empty or frame.shape[1] < 2:
        raise IngestionError(f"{path} needs a header row, a label column and at least one feature")
    return frame.apply(lambda col: col.str.strip())


def _line(index):
    # header is line 1
    return int(index) + 2


def _encode_feature(frame, column):
    values = frame[column]
    empty = values == ''
    if empty.any():
        raise IngestionError("empty cell", row=_line(values.index[empty.argmax()]), column=column)
    parsed = pd.to_numeric(values, errors='coerce')
    good = parsed.notna()
    if good.all():
        return parsed.to_numpy(dtype=np.float64)[:, None]
    if good.mean() >= NUMERIC_SHARE:
        bad = values.index[(~good).argmax()]
        raise IngestionError(f"unparseable value {values[bad]!r}", row=_line(bad), column=column)
    categories = pd.unique(values)
    return (values.to_numpy()[:, None] == categories[None, :]).astype(np.float64)


def _encode_labels(values, kind, column):
    if kind == 'regression':
        parsed = pd.to_numeric(values, errors='coerce')
        if parsed.isna().any():
            bad = values.index[parsed.isna().argmax()]
            raise IngestionError(f"unparseable target {values[bad]!r}", row=_line(bad), column=column)
        return parsed.to_numpy(dtype=np.float64), None
    distinct = pd.unique(values)
    numeric = pd.to_numeric(pd.Series(distinct), errors='coerce')
    if numeric.notna().all():
        ordered = [distinct[i] for i in np.argsort(numeric.to_numpy(), kind='stable')]
    else:
        ordered = sorted(distinct)
    if len(ordered) < 2:
        raise InputError(f"label column {column!r} holds a single class")
    mapping = {value: i for i, value in enumerate(ordered)}
    return values.map(mapping).to_numpy(dtype=np.int64), len(ordered)


def load_csv_task(path, schema=CsvSchema(), seed=2024, access_log=None):
    frame = read_frame(path)
    label_column = schema.label_column or frame.columns[-1]
    if label_column not in frame.columns:
        raise IngestionError(f"label column {label_column!r} not in header", column=label_column)
    if schema.kind not in ('classification', 'regression'):
        raise InputError(f"unknown task kind {schema.kind!r}")

    blocks = [_encode_feature(frame, c) for c in frame.columns if c != label_column]
    features = np.hstack(blocks)
    labels, n_classes = _encode_labels(frame[label_column], schema.kind, label_column)

    name = schema.name or Path(path).stem
    domain_tag = schema.domain_tag or name.replace('_', ' ').replace('-', ' ')
    task = TaskType(schema.kind, n_classes, features.shape[1])
    meta = TaskMeta(schema.kind, features.shape[1], n_classes, domain_tag)
    dataset = build_dataset(name, features, labels, task, np.random.default_rng(seed), meta,
                            access_log)
    logger.info("Loaded %s: %d rows, %d features, %s", name, dataset.n_rows,
                dataset.n_features, f'{n_classes} classes' if n_classes else 'regression')
    return dataset
