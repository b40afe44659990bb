import json

import numpy as np
import pytest

from evacest.mlp import (DEFAULT_NORM_BOUNDS, MLP, score_below_threshold,
                         train)
from oracles import finite_difference_gradient


def test_bad_dims_rejected():
    with pytest.raises(ValueError):
        MLP([6])
    with pytest.raises(ValueError):
        MLP([6, 0, 1])


def test_predict_shape():
    m = MLP([6, 8, 1], seed=0)
    out = m.predict(np.zeros((5, 6)))
    assert out.shape == (5,)


def test_linear_model_analytic_gradient():
    # single linear layer: d/dw of (w.x - y)^2 is 2(w.x - y) x
    m = MLP([3, 1], seed=1)
    x = np.array([0.5, -1.0, 2.0])
    y = 0.7
    gw, _ = m.gradients(x, y)
    pred = float(m.predict(x)[0])
    expected = 2.0 * (pred - y) * x
    assert np.allclose(gw[0][:, 0], expected, atol=1e-12)


def _check_fd(dims, seed, n_samples):
    rng = np.random.default_rng(seed)
    m = MLP(dims, seed=seed)
    worst = 0.0
    for _ in range(n_samples):
        x = rng.uniform(-1, 1, size=dims[0])
        y = rng.uniform(-1, 1)
        gw, _ = m.gradients(x, y)
        fd = finite_difference_gradient(
            lambda: (float(m.predict(x)[0]) - y) ** 2, m.weights)
        for li in range(len(m.weights)):
            denom = max(np.abs(gw[li]).max(), np.abs(fd[li]).max(), 1e-8)
            rel = np.abs(gw[li] - fd[li]).max() / denom
            worst = max(worst, rel)
    return worst


def test_gradients_match_finite_differences():
    assert _check_fd([4, 7, 1], seed=2, n_samples=10) < 1e-4
    assert _check_fd([3, 5, 4, 1], seed=3, n_samples=5) < 1e-4


def test_gradient_check_many_random_pairs():
    # >=100 (network, sample) pairs across shapes
    worst = 0.0
    for seed in range(10):
        worst = max(worst, _check_fd([4, 6, 1], seed=seed, n_samples=11))
    assert worst < 1e-4


def test_zero_lr_leaves_weights_unchanged():
    m = MLP([6, 10, 1], seed=4)
    before = [w.copy() for w in m.weights]
    train(m, np.random.default_rng(0).uniform(0, 1, (20, 6)),
          np.arange(20.0), lr=0.0, epochs=3)
    for a, b in zip(before, m.weights):
        assert np.array_equal(a, b)


def test_overfits_tiny_dataset():
    rng = np.random.default_rng(5)
    X = rng.uniform(0, 1, size=(8, 3))
    y = rng.uniform(0, 1, size=8)
    m = MLP([3, 32, 1], seed=5, use_bias=True)
    train(m, X, y, lr=0.1, epochs=3000, val_fraction=0.0, seed=5,
          patience=10**9)
    assert m.loss(X, y) < 1e-3


def test_plateau_halves_lr_then_stops():
    # lr=0 never improves, so the schedule halves every `patience` epochs
    # and stops after max_halvings halvings
    m = MLP([2, 4, 1], seed=6)
    X = np.array([[0.0, 1.0], [1.0, 0.0]])
    y = np.array([1.0, 2.0])
    hist = train(m, X, y, lr=0.0, epochs=1000, val_fraction=0.5, seed=6,
                 patience=3, max_halvings=2)
    # epoch 0 always improves on the infinite initial best, then each of the
    # 3 lr levels (initial + 2 halvings) stalls for `patience` epochs
    assert len(hist) == 1 + 3 * 3
    lrs = [h[1] for h in hist]
    assert lrs == sorted(lrs, reverse=True)  # lr never increases
    assert lrs[-1] == 0.0


def test_lr_monotone_nonincreasing():
    rng = np.random.default_rng(7)
    m = MLP([3, 8, 1], seed=7)
    hist = train(m, rng.uniform(0, 1, (30, 3)), rng.uniform(0, 1, 30),
                 lr=0.01, epochs=120, seed=7, patience=5)
    lrs = [h[1] for h in hist]
    assert all(a >= b for a, b in zip(lrs, lrs[1:]))


def test_normalization_maps_bounds_to_unit_box():
    m = MLP([6, 4, 1], norm_bounds=DEFAULT_NORM_BOUNDS)
    lo = np.array([b[0] for b in DEFAULT_NORM_BOUNDS])
    hi = np.array([b[1] for b in DEFAULT_NORM_BOUNDS])
    assert np.allclose(m.normalize(lo), 0.0)
    assert np.allclose(m.normalize(hi), 1.0)


def test_save_load_round_trip(tmp_path):
    m = MLP([6, 16, 1], seed=8, norm_bounds=DEFAULT_NORM_BOUNDS)
    path = tmp_path / "model.json"
    m.save(path)
    m2 = MLP.load(path)
    assert m2.dims == m.dims
    X = np.random.default_rng(8).uniform(2, 10, size=(7, 6))
    assert np.array_equal(m.predict(X), m2.predict(X))  # bit exact


def test_load_rejects_wrong_version(tmp_path):
    m = MLP([2, 2, 1])
    d = m.to_dict()
    d["version"] = "something-else"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(d))
    with pytest.raises(ValueError):
        MLP.load(path)


def test_score_below_threshold():
    class Fixed:
        def predict(self, X):
            return np.array([1.05, 1.09, 1.20])
    frac = score_below_threshold(Fixed(), None, np.array([1.0, 1.0, 1.0]))
    assert frac == pytest.approx(2 / 3)
