import numpy as np
import pandas as pd
import pytest

from hypergen.config import TrainConfig, default_settings
from hypergen.data.synthetic import BlobSpec, make_pair, make_synthetic_suite


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def small_cfg():
    return TrainConfig(epochs=3, batch_size=32, latent_dim=6, encoder_vocab=64, encoder_dim=8,
                       hidden_dim=8, n_layers=0, seed=11)


@pytest.fixture
def settings():
    s = default_settings()
    s['train'].update(epochs=3, latent_dim=6, seed=11)
    s['encoder'].update(vocab_size=64, dim=8)
    s['model'].update(hidden_dim=8, n_layers=0)
    s['finetune'].update(epochs=3, init_study_epochs=4, seeds=2)
    s['lora'].update(hidden_dim=8)
    s['protocol'].update(k_tasks=2, siblings=1)
    return s


@pytest.fixture
def two_pairs():
    return make_synthetic_suite(5, 2, rows_per_class=20)


@pytest.fixture
def suite_with_sibling():
    return make_synthetic_suite(5, 2, siblings=1, rows_per_class=20)


@pytest.fixture
def separable_pair():
    spec = BlobSpec(n_features=3, n_classes=2, separation=10.0, seed=3, rows_per_class=80)
    return make_pair('wide_blobs', spec, 'well separated blobs')


@pytest.fixture
def write_csv(tmp_path):
    def write(name, frame):
        path = tmp_path / name
        frame.to_csv(path, index=False)
        return path
    return write


def _class_blobs(rng, n_per_class, n_features, n_classes, spread=4.0):
    centres = rng.normal(scale=spread, size=(n_classes, n_features))
    labels = np.repeat(np.arange(n_classes), n_per_class)
    return centres[labels] + rng.normal(size=(labels.size, n_features)), labels


@pytest.fixture
def iris_csv(write_csv):
    """150 rows, 4 numeric features, 3 named species."""
    x, y = _class_blobs(np.random.default_rng(1), 50, 4, 3)
    frame = pd.DataFrame(np.round(x, 2), columns=['sepal_length', 'sepal_width',
                                                  'petal_length', 'petal_width'])
    frame['species'] = np.array(['setosa', 'versicolor', 'virginica'])[y]
    return write_csv('iris.csv', frame)


@pytest.fixture
def wine_csv(write_csv):
    """178 rows, 13 numeric features, cultivar labels 1..3."""
    rng = np.random.default_rng(2)
    x, y = _class_blobs(rng, 60, 13, 3)
    keep = rng.permutation(len(y))[:178]
    frame = pd.DataFrame(np.round(x[keep], 3), columns=[f'f{i}' for i in range(13)])
    frame['cultivar'] = y[keep] + 1
    return write_csv('wine.csv', frame)
