import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from hypergen.core import (Adam, AdamState, MlpParams, adam_step, adam_update, finite_diff_grad,
                           init_mlp, layer_dims, mlp_backward, mlp_forward, mlp_forward_cached,
                           mse_loss, relative_error, sgd_update, softmax_cross_entropy)
from hypergen.errors import InputError, ShapeError, TrainingError


def test_layer_dims_follow_profile():
    assert layer_dims(4, 8, 1, 3) == [(4, 8), (8, 8), (8, 3)]
    assert layer_dims(4, 8, 0, 3) == [(4, 8), (8, 3)]


def test_init_mlp_bounds_and_shapes(rng):
    params = init_mlp(5, 16, 1, 3, rng)
    assert [w.shape for w, _ in params.layers] == [(16, 5), (16, 16), (3, 16)]
    for weight, bias in params.layers:
        bound = 1.0 / math.sqrt(weight.shape[1])
        assert np.abs(weight).max() <= bound
        assert np.abs(bias).max() <= bound
        assert weight.dtype == np.float32


def test_forward_relu_between_layers_only():
    w0 = np.array([[1.0], [-1.0]], dtype=np.float32)
    w1 = np.array([[1.0, 1.0]], dtype=np.float32)
    params = MlpParams([(w0, np.zeros(2, np.float32)), (w1, np.array([-5.0], np.float32))])
    out = mlp_forward(params, np.array([[2.0]], dtype=np.float32))
    # hidden = relu([2, -2]) = [2, 0], output has no activation
    assert_array_equal(out, [[-3.0]])


def test_forward_rejects_wrong_width(rng):
    params = init_mlp(4, 8, 0, 2, rng)
    with pytest.raises(ShapeError, match='mlp.0 expects 4 inputs, got 3'):
        mlp_forward(params, np.zeros((2, 3), np.float32))
    with pytest.raises(ShapeError):
        mlp_forward(params, np.zeros(4, np.float32))


def test_forward_is_bitwise_deterministic(rng):
    params = init_mlp(5, 16, 2, 3, rng)
    x = rng.normal(size=(32, 5)).astype(np.float32)
    first = mlp_forward(params, x)
    assert mlp_forward(params, x).tobytes() == first.tobytes()
    assert mlp_forward(params.copy(), x.copy()).tobytes() == first.tobytes()


def test_forward_rejects_non_finite_input(rng):
    params = init_mlp(2, 4, 0, 1, rng)
    with pytest.raises(InputError, match='NaN or Inf'):
        mlp_forward(params, np.array([[0.0, np.inf]], np.float32))


def test_params_chain_is_validated():
    with pytest.raises(ShapeError):
        MlpParams([(np.zeros((3, 2)), np.zeros(3)), (np.zeros((1, 4)), np.zeros(1))])


def test_named_round_trip_keeps_layer_order(rng):
    params = init_mlp(3, 4, 1, 2, rng)
    names = list(params.named())
    assert names == ['mlp.0.weight', 'mlp.0.bias', 'mlp.1.weight', 'mlp.1.bias',
                     'mlp.2.weight', 'mlp.2.bias']
    again = MlpParams.from_named(params.named())
    for (w, b), (w2, b2) in zip(params.layers, again.layers):
        assert_array_equal(w, w2)
        assert_array_equal(b, b2)


def test_backward_matches_finite_differences(rng):
    params = init_mlp(3, 5, 1, 4, rng, dtype=np.float64)
    x = rng.normal(size=(6, 3))
    labels = rng.integers(0, 4, size=6)
    out, cache = mlp_forward_cached(params, x)
    _, grad_out = softmax_cross_entropy(out, labels)
    grads = mlp_backward(params, cache, grad_out)
    analytic = np.concatenate([np.concatenate([gw.ravel(), gb]) for gw, gb in grads])

    shapes = [(w.shape, b.shape) for w, b in params.layers]

    def loss(vector):
        layers, offset = [], 0
        for ws, bs in shapes:
            w = vector[offset:offset + np.prod(ws)].reshape(ws)
            offset += w.size
            b = vector[offset:offset + bs[0]]
            offset += b.size
            layers.append((w, b))
        return softmax_cross_entropy(mlp_forward(MlpParams(layers), x), labels)[0]

    flat = np.concatenate([np.concatenate([w.ravel(), b]) for w, b in params.layers])
    assert relative_error(analytic, finite_diff_grad(loss, flat)) < 1e-6


def test_input_gradient(rng):
    params = init_mlp(3, 4, 0, 2, rng, dtype=np.float64)
    x = rng.normal(size=(2, 3))
    out, cache = mlp_forward_cached(params, x)
    _, grad_x = mlp_backward(params, cache, np.ones_like(out), need_input_grad=True)
    numeric = finite_diff_grad(lambda v: mlp_forward(params, v.reshape(2, 3)).sum(), x)
    assert_allclose(grad_x.ravel(), numeric, rtol=1e-6, atol=1e-8)


def test_cross_entropy_uniform_logits_is_log_c():
    for n_classes in (2, 3, 7):
        loss, grad = softmax_cross_entropy(np.zeros((4, n_classes), np.float32), np.zeros(4, int))
        assert loss == pytest.approx(math.log(n_classes), rel=1e-6)
        assert grad.shape == (4, n_classes)


def test_cross_entropy_saturated_logits():
    labels = np.array([0, 2, 1])
    logits = np.full((3, 3), -20.0, dtype=np.float32)
    logits[np.arange(3), labels] = 20.0
    loss, _ = softmax_cross_entropy(logits, labels)
    assert loss < 1e-3


def test_cross_entropy_large_logits_stay_finite():
    loss, grad = softmax_cross_entropy(np.array([[1000.0, 0.0]], np.float32), np.array([1]))
    assert np.isfinite(loss) and np.all(np.isfinite(grad))


def test_cross_entropy_label_errors():
    with pytest.raises(InputError):
        softmax_cross_entropy(np.zeros((2, 3)), np.array([0, 3]))
    with pytest.raises(InputError):
        softmax_cross_entropy(np.zeros((2, 3)), np.array([0]))


def test_mse_loss_and_gradient():
    loss, grad = mse_loss(np.array([[0.0], [2.0]]), np.array([[2.0], [2.0]]))
    assert loss == pytest.approx(2.0)
    assert_allclose(grad, [[-2.0], [0.0]])
    with pytest.raises(InputError):
        mse_loss(np.zeros((2, 1)), np.zeros(2))


def test_mse_gradient_matches_finite_differences(rng):
    pred = rng.normal(size=(4, 2))
    target = rng.normal(size=(4, 2))
    _, grad = mse_loss(pred, target)
    numeric = finite_diff_grad(lambda v: mse_loss(v.reshape(4, 2), target)[0], pred)
    assert relative_error(grad, numeric) <= 1e-6


def test_adam_first_step_is_lr_times_sign():
    params = np.array([1.0, -1.0, 0.5])
    grads = np.array([3.0, -0.2, 10.0])
    increment, state = adam_update(AdamState(), params, grads, lr=0.01)
    # bias correction makes the first step lr * g / (|g| + eps)
    assert_allclose(increment, -0.01 * np.sign(grads), rtol=1e-6)
    assert state.step == 1


def test_adam_step_leaves_inputs_untouched():
    params = np.ones(3, np.float32)
    grads = np.full(3, 0.5, np.float32)
    new, state = adam_step(AdamState(), params, grads)
    assert_array_equal(params, np.ones(3))
    assert new.dtype == np.float32
    new2, _ = adam_step(state, new, grads)
    assert np.all(new2 < new)


def test_adam_zero_learning_rate_keeps_params_bitwise(rng):
    params = rng.normal(size=6).astype(np.float32)
    state = AdamState()
    new = params
    for _ in range(3):
        new, state = adam_step(state, new, rng.normal(size=6).astype(np.float32), lr=0.0)
    assert new.tobytes() == params.tobytes()


def test_adam_weight_decay_enters_gradient():
    params = np.array([2.0])
    increment, state = adam_update(AdamState(), params, np.array([0.0]), lr=0.1, weight_decay=0.5)
    assert_allclose(state.m, [0.1 * 1.0])
    assert increment[0] < 0


def test_adam_rejects_bad_input():
    with pytest.raises(TrainingError):
        adam_update(AdamState(), np.zeros(2), np.array([np.nan, 0.0]))
    with pytest.raises(InputError):
        adam_update(AdamState(), np.zeros(2), np.zeros(3))
    with pytest.raises(InputError):
        adam_update(AdamState(step=-1), np.zeros(2), np.zeros(2))


def test_sgd_update_is_exact():
    grads = np.array([-4.0, 1.5], np.float32)
    assert_array_equal(sgd_update(np.zeros(2, np.float32), grads, 0.1), -0.1 * grads)


def test_named_adam_skips_names_without_gradient():
    params = {'a': np.ones(2), 'b': np.ones(2)}
    opt = Adam(lr=0.1)
    opt.step(params, {'a': np.ones(2)})
    assert_array_equal(params['b'], np.ones(2))
    assert 'b' not in opt.state
    assert opt.state['a'].step == 1


def test_finite_diff_rejects_nonpositive_step():
    with pytest.raises(InputError):
        finite_diff_grad(lambda v: v.sum(), np.zeros(2), h=0.0)
