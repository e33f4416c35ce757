import threading
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..core.tensor import DTYPE, check_finite
from ..errors import InputError

SPLITS = ('train', 'eval', 'test')
SPLIT_FRACTIONS = (0.70, 0.15, 0.15)


class AccessLog:
    """Counts dataset reads per (dataset, reader, split)."""

    def __init__(self):
        self._lock = threading.Lock()
        self.counts = Counter()

    def record(self, dataset, reader, split):
        with self._lock:
            self.counts[(dataset, reader, split)] += 1

    def reads(self, dataset, reader=None):
        with self._lock:
            return sum(n for (name, who, _), n in self.counts.items()
                       if name == dataset and (reader is None or who == reader))


@dataclass
class Dataset:
    name: str
    features: np.ndarray
    labels: np.ndarray
    splits: dict
    task: object
    meta: object = None
    access_log: Optional[AccessLog] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        n = self.features.shape[0]
        if n == 0:
            raise InputError(f"dataset {self.name} is empty")
        if self.labels.shape[0] != n:
            raise InputError(f"dataset {self.name}: {n} rows but {self.labels.shape[0]} labels")
        seen = set()
        for split in SPLITS:
            idx = self.splits.get(split, np.array([], dtype=np.int64))
            if len(idx) and (idx.min() < 0 or idx.max() >= n):
                raise InputError(f"dataset {self.name}: {split} split indexes outside the data")
            overlap = seen.intersection(idx.tolist())
            if overlap:
                raise InputError(f"dataset {self.name}: splits overlap on {len(overlap)} rows")
            seen.update(idx.tolist())

    @property
    def n_rows(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    def read(self, split, reader='harness'):
        if split not in SPLITS:
            raise InputError(f"unknown split {split!r}")
        if self.access_log is not None:
            self.access_log.record(self.name, reader, split)
        idx = self.splits[split]
        return self.features[idx], self.labels[idx]

    def majority_accuracy(self, split='test'):
        """Accuracy (percent) of always predicting the most frequent training class."""
        train = self.labels[self.splits['train']]
        target = self.labels[self.splits[split]]
        majority = np.bincount(train).argmax()
        return 100.0 * float(np.mean(target == majority))


def split_indices(n, rng, fractions=SPLIT_FRACTIONS):
    order = rng.permutation(n)
    n_train = int(round(fractions[0] * n))
    n_eval = int(round(fractions[1] * n))
    return {
        'train': np.sort(order[:n_train]),
        'eval': np.sort(order[n_train:n_train + n_eval]),
        'test': np.sort(order[n_train + n_eval:]),
    }


def standardize(features, train_idx):
    """Zero mean, unit variance per column, statistics from the train rows."""
    train = features[train_idx].astype(np.float64)
    mean = train.mean(axis=0)
    std = train.std(axis=0)
    std[std == 0] = 1.0
    return ((features - mean) / std).astype(DTYPE)


def build_dataset(name, features, labels, task, rng, meta=None, access_log=None):
    features = check_finite(np.asarray(features, dtype=np.float64), f'dataset {name} features')
    splits = split_indices(features.shape[0], rng)
    if task.is_classification:
        labels = np.asarray(labels, dtype=np.int64)
    else:
        labels = np.asarray(labels, dtype=DTYPE).reshape(-1, 1)
        check_finite(labels, f'dataset {name} labels')
    return Dataset(name, standardize(features, splits['train']), labels, splits, task, meta,
                   access_log)
