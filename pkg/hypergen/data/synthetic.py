"""Gaussian-blob classification tasks for desk-scale experiments.

Class centres sit on a regular polygon (adjacent centres ``separation``
noise deviations apart) in the first two axes, then the whole cloud is
turned by a random rotation of the feature space. A domain-shift sibling
reuses its source's centres and rotation, moves every mean by a common
offset and tilts the cloud slightly: same labels, shifted sensor.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from ..hypernet.architecture import TaskType
from ..requirement.schema import TaskMeta
from ..requirement.template import fallback_template
from ..training.pairs import TaskRequirementPair
from .dataset import AccessLog, build_dataset

logger = logging.getLogger(__name__)

FEATURE_RANGE = (2, 8)
CLASS_RANGE = (2, 5)
SEPARATION_RANGE = (3.0, 6.0)
SHIFT_SIZE = 3.0
TILT_RADIANS = 0.2


@dataclass(frozen=True)
class BlobSpec:
    n_features: int
    n_classes: int
    separation: float
    seed: int
    rows_per_class: int = 60

    def __post_init__(self):
        if self.n_features < 2:
            raise InputError(f"blobs need at least 2 features, got {self.n_features}")
        if self.n_classes < 2:
            raise InputError(f"blobs need at least 2 classes, got {self.n_classes}")


def _geometry(spec):
    rng = np.random.default_rng([spec.seed, 0])
    radius = spec.separation / (2.0 * np.sin(np.pi / spec.n_classes))
    angles = 2.0 * np.pi * np.arange(spec.n_classes) / spec.n_classes
    centres = np.zeros((spec.n_classes, spec.n_features))
    centres[:, 0] = radius * np.cos(angles)
    centres[:, 1] = radius * np.sin(angles)
    q, r = np.linalg.qr(rng.normal(size=(spec.n_features, spec.n_features)))
    rotation = q * np.sign(np.diag(r))
    return centres @ rotation.T


def sample_blobs(spec, shifted=False):
    centres = _geometry(spec)
    rng = np.random.default_rng([spec.seed, 1, int(shifted)])
    labels = np.repeat(np.arange(spec.n_classes), spec.rows_per_class)
    features = centres[labels] + rng.normal(size=(labels.size, spec.n_features))
    if shifted:
        offset = rng.normal(size=spec.n_features)
        offset *= SHIFT_SIZE / np.linalg.norm(offset)
        tilt = np.eye(spec.n_features)
        c, s = np.cos(TILT_RADIANS), np.sin(TILT_RADIANS)
        tilt[:2, :2] = [[c, -s], [s, c]]
        features = features @ tilt.T + offset
    return features, labels


def make_blob_task(name, spec, domain_tag, shifted=False, access_log=None):
    features, labels = sample_blobs(spec, shifted)
    task = TaskType('classification', spec.n_classes, spec.n_features)
    meta = TaskMeta('classification', spec.n_features, spec.n_classes, domain_tag)
    rng = np.random.default_rng([spec.seed, 2, int(shifted)])
    return build_dataset(name, features, labels, task, rng, meta, access_log)


def make_pair(name, spec, domain_tag, shifted=False, held_out=False, access_log=None):
    dataset = make_blob_task(name, spec, domain_tag, shifted, access_log)
    return TaskRequirementPair(dataset, fallback_template(dataset.meta), held_out=held_out)


def make_synthetic_suite(seed, k_tasks, siblings=0, rows_per_class=60, access_log=None):
    """``k_tasks`` blob pairs followed by ``siblings`` held-out shifted copies of the first tasks."""
    if k_tasks < 2:
        raise InputError(f"a synthetic suite needs at least 2 tasks, got {k_tasks}")
    if not 0 <= siblings <= k_tasks:
        raise InputError(f"siblings must lie in [0, {k_tasks}], got {siblings}")
    access_log = access_log if access_log is not None else AccessLog()
    rng = np.random.default_rng(seed)
    specs = []
    for _ in range(k_tasks):
        specs.append(BlobSpec(n_features=int(rng.integers(FEATURE_RANGE[0], FEATURE_RANGE[1] + 1)),
                              n_classes=int(rng.integers(CLASS_RANGE[0], CLASS_RANGE[1] + 1)),
                              separation=float(rng.uniform(*SEPARATION_RANGE)),
                              seed=int(rng.integers(2 ** 31)),
                              rows_per_class=rows_per_class))

    pairs = [make_pair(f'blobs{i}', spec, f'gaussian blobs family {i}', access_log=access_log)
             for i, spec in enumerate(specs)]
    for i in range(siblings):
        pairs.append(make_pair(f'blobs{i}_shifted', specs[i],
                               f'gaussian blobs family {i} under shifted sensors',
                               shifted=True, held_out=True, access_log=access_log))
    logger.info("Synthetic suite: %d tasks, %d zero-shot siblings (seed %d)",
                k_tasks, siblings, seed)
    return pairs
