from __future__ import annotations

import numpy as np
import pytest
from gradcheck_util import check_params, numeric_grad, relative_error
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from molinterp.numkit import (
    AdamState,
    DenseNet,
    MissingCache,
    ShapeMismatch,
    SingleClass,
    adam_step,
    auroc,
    average_precision,
    balanced_indices,
    bce_with_logits,
    class_weights,
    correlation_matrix,
    derive_seed,
    fit_scaler,
    load_arrays,
    make_rng,
    minibatches,
    mse_loss,
    pearson_r,
    r2_score,
    save_arrays,
    split_indices,
)
from molinterp.numkit.checkpoint import net_from_arrays, net_to_arrays


def tiny_net() -> DenseNet:
    w = [np.array([[1.0, -1.0], [0.5, 2.0]]), np.array([[1.0], [1.0]])]
    b = [np.array([0.0, 0.5]), np.array([0.25])]
    return DenseNet((2, 2, 1), w, b)


def test_forward_hand_example():
    out = tiny_net().forward(np.array([[1.0, 1.0]]))
    # hidden = relu([1.5, 1.5]) -> 3.0 + 0.25
    assert out.shape == (1, 1) and out[0, 0] == pytest.approx(3.25)
    out = tiny_net().forward(np.array([[1.0, -1.0]]))
    # hidden = relu([0.5, -2.5]) = [0.5, 0]
    assert out[0, 0] == pytest.approx(0.75)


def test_backward_hand_example():
    net = tiny_net()
    _, cache = net.forward(np.array([[1.0, -1.0]]), train=True)
    grads, gin = net.backward(cache, np.ones((1, 1)))
    np.testing.assert_allclose(grads[2], [[0.5], [0.0]])
    np.testing.assert_allclose(grads[3], [1.0])
    np.testing.assert_allclose(grads[0], [[1.0, 0.0], [-1.0, 0.0]])
    np.testing.assert_allclose(gin, [[1.0, 0.5]])


def test_shape_and_cache_errors():
    net = tiny_net()
    with pytest.raises(ShapeMismatch):
        net.forward(np.ones((3, 5)))
    with pytest.raises(MissingCache):
        net.backward(None, np.ones((1, 1)))
    with pytest.raises(ShapeMismatch):
        DenseNet((2, 3), [np.ones((3, 2))], [np.zeros(3)])


@pytest.mark.parametrize("activation", ["relu", "softplus", "tanh", "identity"])
@pytest.mark.parametrize("loss", ["mse", "bce"])
def test_network_gradients(activation, loss):
    rng = np.random.default_rng(5)
    net = DenseNet.create((6, 8, 5, 2), rng, activation=activation)
    x = rng.normal(size=(7, 6))
    y = rng.normal(size=(7, 2)) if loss == "mse" else (rng.random((7, 2)) < 0.5).astype(float)
    lossfn = mse_loss if loss == "mse" else bce_with_logits

    def f():
        return lossfn(net.forward(x), y)[0]

    out, cache = net.forward(x, train=True)
    grads, gin = net.backward(cache, lossfn(out, y)[1])
    assert check_params(f, net.params, grads) <= 1e-4
    idx, num = numeric_grad(f, x)
    assert relative_error(gin.ravel()[idx], num) <= 1e-4


def test_weighted_bce_gradient():
    rng = np.random.default_rng(1)
    z = rng.normal(size=(9, 1))
    y = (rng.random((9, 1)) < 0.3).astype(float)
    w = class_weights(y)
    _, g = bce_with_logits(z, y, w)
    idx, num = numeric_grad(lambda: bce_with_logits(z, y, w)[0], z)
    assert relative_error(g.ravel()[idx], num) <= 1e-6


def test_dropout_needs_rng_and_is_identity_in_eval():
    rng = np.random.default_rng(0)
    net = DenseNet.create((3, 4, 1), rng, dropout=0.5)
    x = rng.normal(size=(2, 3))
    with pytest.raises(ValueError):
        net.forward(x, train=True)
    np.testing.assert_array_equal(net.forward(x), net.eval_with_cache(x)[0])


def test_adam_first_step_moves_by_lr():
    p = np.array([1.0, -2.0, 3.0])
    state = AdamState(lr=0.1)
    adam_step(state, [p], [np.array([0.5, -4.0, 0.0])])
    # bias-corrected first step is lr * sign(g) for nonzero g
    np.testing.assert_allclose(p, [0.9, -1.9, 3.0], atol=1e-6)
    assert state.step == 1


def test_adam_minimizes_quadratic():
    p = np.array([5.0, -3.0])
    state = AdamState(lr=0.1)
    for _ in range(500):
        adam_step(state, [p], [2.0 * p])
    assert np.abs(p).max() < 1e-2
    with pytest.raises(ShapeMismatch):
        adam_step(state, [p, p], [p])


def test_auroc_examples():
    assert auroc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == pytest.approx(0.75)
    assert auroc([1, 2, 3, 4], [0, 0, 1, 1]) == 1.0
    assert auroc([4, 3, 2, 1], [0, 0, 1, 1]) == 0.0
    assert auroc([1, 1, 1, 1], [0, 1, 0, 1]) == 0.5
    with pytest.raises(SingleClass):
        auroc([1, 2, 3], [1, 1, 1])


def test_average_precision_examples():
    assert average_precision([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == pytest.approx((1.0 + 2 / 3) / 2)
    assert average_precision([3, 2, 1], [1, 0, 0]) == 1.0
    with pytest.raises(SingleClass):
        average_precision([1, 2], [0, 0])


def test_regression_metrics():
    t = np.array([1.0, 2.0, 3.0, 4.0])
    assert r2_score(t, t) == 1.0
    assert r2_score(np.full(4, t.mean()), t) == pytest.approx(0.0)
    assert r2_score(np.ones(3), np.ones(3)) == 1.0
    assert pearson_r(t, 2 * t + 1) == pytest.approx(1.0)
    assert pearson_r(t, -t) == pytest.approx(-1.0)
    assert pearson_r(t, np.ones(4)) == 0.0
    r, ca, cb = correlation_matrix(np.c_[t, np.ones(4)], np.c_[t, -t])
    np.testing.assert_allclose(r, [[1.0, -1.0], [0.0, 0.0]])
    assert list(ca) == [False, True] and not cb.any()


@settings(max_examples=100, deadline=None)
@given(
    arrays(np.float64, 12, elements=st.integers(-50, 50).map(float)),
    st.lists(st.integers(0, 1), min_size=12, max_size=12).filter(lambda v: 0 < sum(v) < 12),
)
def test_auroc_invariant_under_monotone_maps(scores, labels):
    base = auroc(scores, labels)
    assert auroc(scores**3 * 0.5 + 7.0, labels) == pytest.approx(base)
    assert auroc(-scores, labels) == pytest.approx(1.0 - base)
    assert 0.0 <= base <= 1.0


def test_scaler():
    x = np.array([[1.0, 5.0], [3.0, 5.0]])
    s = fit_scaler(x)
    np.testing.assert_allclose(s.transform(x), [[-1.0, 0.0], [1.0, 0.0]])
    np.testing.assert_allclose(s.inverse(s.transform(x)), x)
    assert s.digest() == fit_scaler(x.copy()).digest()
    with pytest.raises(ShapeMismatch):
        s.transform(np.ones((2, 3)))


def test_checkpoint_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    net = DenseNet.create((4, 3, 2), rng, activation="tanh", dropout=0.25)
    meta, arrays_ = net_to_arrays(net)
    path = tmp_path / "net.ckpt"
    save_arrays(path, {"note": "x", **meta}, arrays_)
    first = path.read_bytes()
    save_arrays(path, {"note": "x", **meta}, arrays_)
    assert path.read_bytes() == first
    meta2, arrays2 = load_arrays(path)
    again = net_from_arrays(meta2, arrays2)
    x = rng.normal(size=(5, 4))
    np.testing.assert_array_equal(net.forward(x), again.forward(x))
    assert again.dropout == net.dropout and again.activation == "tanh"
    path.write_bytes(first[:-8])
    with pytest.raises(ValueError):
        load_arrays(path)
    path.write_bytes(b"NOTACKPT" + first[8:])
    with pytest.raises(ValueError):
        load_arrays(path)


def test_named_streams_are_independent_and_reproducible():
    a = make_rng(7, "probe").random(4)
    np.testing.assert_array_equal(a, make_rng(7, "probe").random(4))
    assert not np.allclose(a, make_rng(7, "sae").random(4))
    assert not np.allclose(a, make_rng(8, "probe").random(4))
    assert derive_seed(7, "x") == derive_seed(7, "x") != derive_seed(7, "y")


def test_split_indices():
    train, test = split_indices(100, 0.1, 0)
    assert len(test) == 10 and len(train) == 90
    assert set(train).isdisjoint(test) and set(train) | set(test) == set(range(100))
    t2, s2 = split_indices(100, 0.1, 0)
    np.testing.assert_array_equal(test, s2)
    with pytest.raises(ValueError):
        split_indices(10, 0.0, 0)


def test_batches_and_balancing():
    rng = np.random.default_rng(0)
    batches = list(minibatches(np.arange(10), 4, rng))
    assert [len(b) for b in batches] == [4, 4, 2]
    assert sorted(np.concatenate(batches)) == list(range(10))
    labels = np.array([1, 0, 0, 0, 0, 0])
    idx = balanced_indices(labels, rng)
    assert (labels[idx] == 1).sum() == (labels[idx] == 0).sum() == 5
    w = class_weights(labels)
    assert w[labels == 1].sum() == pytest.approx(w[labels == 0].sum())
