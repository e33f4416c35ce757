import numpy as np
import pytest

from hypergen import HyperGen
from hypergen.config import default_settings
from hypergen.harness.artifact import load_checkpoint
from hypergen.harness.experiment import build_suite, mean_score, run_protocol


def test_protocol_writes_every_artifact(settings, tmp_path):
    result = run_protocol(settings, tmp_path)
    for name in ('hypernet.mgpt', 'results.csv', 'results.md', 'init_study.md',
                 'curves_generated.csv', 'curves_fresh.csv'):
        assert (tmp_path / name).exists(), name
    assert load_checkpoint(tmp_path / 'hypernet.mgpt').checkpoint_id == result.checkpoint.checkpoint_id


def test_protocol_grid_properties(settings, tmp_path):
    result = run_protocol(settings, tmp_path, study=False)
    report = result.report
    assert report.tasks == ['blobs0', 'blobs1', 'blobs0_shifted']
    assert len(report.cells) == 4 * 3
    for task in report.tasks:
        assert report.cell('modelgpt', task).epochs == 0
        assert report.cell('modelgpt_f', task).epochs == 1
        assert report.cell('finetune', task).epochs == settings['finetune']['epochs']
    assert report.checkpoint_id == result.checkpoint.checkpoint_id
    assert result.checkpoint.trained_on == ('blobs0', 'blobs1')
    assert report.zero_shot == {'blobs0_shifted': 0}
    assert [z.task for z in result.zero_shot] == ['blobs0_shifted']
    efficiency = report.averages()['relative_efficiency']
    assert efficiency.min() == pytest.approx(1.0)
    assert result.study is None
    assert not (tmp_path / 'init_study.md').exists()


def test_pipeline_facade(settings, tmp_path):
    config = tmp_path / 'hypergen.toml'
    config.write_text('[train]\nepochs = 2\nlatent_dim = 6\n\n[encoder]\nvocab_size = 64\ndim = 8\n\n'
                      '[model]\nhidden_dim = 8\nn_layers = 0\n\n[finetune]\nepochs = 2\n')
    app = HyperGen(config)
    pairs = build_suite(settings)
    app.train(pairs)
    app.save(tmp_path / 'hypernet.mgpt')
    reloaded = HyperGen(config, checkpoint=tmp_path / 'hypernet.mgpt')
    assert reloaded.network.checkpoint_id() == app.checkpoint.checkpoint_id

    model = reloaded.generate(pairs[0].requirement.sentence, out=tmp_path / 'blobs0.mgpt')
    assert model.spec.in_dim == pairs[0].dataset.n_features
    assert (tmp_path / 'blobs0.mgpt').exists()
    assert reloaded.requirement(pairs[0].dataset.meta) == pairs[0].requirement

    report = reloaded.bench(pairs, tmp_path / 'report', methods=['modelgpt', 'finetune'])
    assert report.checkpoint_id == app.checkpoint.checkpoint_id
    assert (tmp_path / 'report' / 'results.md').exists()


@pytest.mark.slow
def test_generated_models_beat_majority_and_finetune_time(settings, tmp_path):
    settings['protocol'].update(k_tasks=6, siblings=1)
    settings['train'].update(epochs=30, hyper_lr=5e-3)
    settings['finetune'].update(epochs=20, init_study_epochs=20, seeds=3)
    result = run_protocol(settings, tmp_path)
    report = result.report

    seen = [pair for pair in build_suite(settings) if not pair.held_out]
    majority = np.mean([pair.dataset.majority_accuracy('test') for pair in seen])
    assert mean_score(report, 'modelgpt', zero_shot=False) > majority

    averages = report.averages()
    assert averages.loc['modelgpt', 'runtime_s'] < averages.loc['finetune', 'runtime_s']
    assert averages.loc['modelgpt', 'relative_efficiency'] > 1.0
    assert len(result.study.epochs_to_best_ours) == 3


@pytest.mark.slow
def test_default_protocol_meets_acceptance_thresholds(tmp_path):
    result = run_protocol(default_settings(), tmp_path)
    report = result.report
    grid = report.frame()
    runtime = grid.groupby('method')['runtime_s'].mean()

    finetune = mean_score(report, 'finetune', zero_shot=False)
    generated = mean_score(report, 'modelgpt', zero_shot=False)
    assert abs(generated - finetune) <= 5.0
    assert runtime['modelgpt'] <= runtime['finetune'] / 10

    assert mean_score(report, 'modelgpt_f', zero_shot=False) - generated >= -0.5
    assert runtime['modelgpt_f'] <= runtime['finetune'] / 3

    assert result.zero_shot
    for held_out in result.zero_shot:
        assert held_out.generated >= held_out.majority + 15.0
        assert held_out.generated >= held_out.finetune - 10.0

    assert result.study.median_ours <= result.study.median_baseline / 2
