import math

import numpy as np
import pytest

from urbanlens.boosting import GBTModel, GBTParams, train_gbt
from urbanlens.prediction import (
    g_mean,
    prediction_grid,
    split_indices,
    undersample,
)
from urbanlens.streets import build_graph

from conftest import CITY_ORIGIN, grid_streets


# --- undersampling -----------------------------------------------------------


def test_undersample_balances_exactly():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(910, 3))
    y = np.array([1] * 10 + [0] * 900)
    Xb, yb = undersample(X, y, seed=4)
    assert len(yb) == 20
    assert (yb == 1).sum() == 10 and (yb == 0).sum() == 10


def test_undersample_balanced_input_unchanged_sizes():
    X = np.arange(20, dtype=float).reshape(10, 2)
    y = np.array([0, 1] * 5)
    Xb, yb = undersample(X, y, seed=1)
    assert len(yb) == 10
    assert (yb == 1).sum() == 5


def test_undersample_deterministic():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(500, 2))
    y = (rng.random(500) < 0.1).astype(int)
    a = undersample(X, y, seed=9)
    b = undersample(X, y, seed=9)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_undersample_single_class_errors():
    X = np.zeros((5, 2))
    with pytest.raises(ValueError, match="both classes"):
        undersample(X, np.zeros(5, dtype=int), seed=0)


# --- g-mean -------------------------------------------------------------------


def test_g_mean_perfect_is_one():
    y = np.array([0, 1, 0, 1])
    assert g_mean(y, y) == 1.0


def test_g_mean_hand_arithmetic():
    # TP=8 FN=2 TN=7 FP=3 -> sqrt(0.8 * 0.7)
    labels = np.array([1] * 10 + [0] * 10)
    preds = np.array([1] * 8 + [0] * 2 + [0] * 7 + [1] * 3)
    assert g_mean(preds, labels) == pytest.approx(math.sqrt(0.8 * 0.7), abs=1e-12)


def test_g_mean_all_positive_predictor_is_zero():
    labels = np.array([0, 0, 1, 1])
    preds = np.ones(4, dtype=int)
    assert g_mean(preds, labels) == 0.0


def test_g_mean_invariant_under_class_swap():
    rng = np.random.default_rng(5)
    labels = rng.integers(0, 2, 200)
    preds = rng.integers(0, 2, 200)
    assert g_mean(preds, labels) == pytest.approx(g_mean(1 - preds, 1 - labels), abs=1e-15)


# --- boosted trees --------------------------------------------------------------


def test_all_negative_labels_predict_below_half():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(50, 4))
    y = np.zeros(50)
    model = train_gbt(X, y, GBTParams(rounds=10, depth=2))
    assert (model.predict_proba(X) < 0.5).all()


def test_one_dimensional_threshold_concept():
    rng = np.random.default_rng(11)
    X = rng.random((500, 1))
    y = (X[:, 0] > 0.5).astype(float)
    model = train_gbt(X, y, GBTParams(rounds=20, depth=2, learning_rate=0.5))
    acc = (model.predict(X) == y).mean()
    assert acc >= 0.98


def test_training_is_deterministic():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(120, 6))
    y = (X[:, 0] + X[:, 2] > 0).astype(float)
    params = GBTParams(rounds=15, depth=3, learning_rate=0.3, seed=2)
    a = train_gbt(X, y, params)
    b = train_gbt(X, y, params)
    assert a.to_dict() == b.to_dict()


def test_model_serialization_round_trip_bit_identical():
    rng = np.random.default_rng(8)
    X = rng.normal(size=(200, 5))
    y = (X[:, 1] > 0.2).astype(float)
    model = train_gbt(X, y, GBTParams(rounds=25, depth=3))
    restored = GBTModel.from_dict(
        __import__("json").loads(__import__("json").dumps(model.to_dict()))
    )
    assert np.array_equal(model.predict_margin(X), restored.predict_margin(X))


def test_model_save_load(tmp_path):
    rng = np.random.default_rng(8)
    X = rng.normal(size=(60, 3))
    y = (X[:, 0] > 0).astype(float)
    model = train_gbt(X, y, GBTParams(rounds=5, depth=2))
    path = tmp_path / "model.json"
    model.save(path)
    loaded = GBTModel.load(path)
    assert np.array_equal(model.predict_margin(X), loaded.predict_margin(X))


def test_model_version_check(tmp_path):
    rng = np.random.default_rng(8)
    X = rng.normal(size=(30, 2))
    y = (X[:, 0] > 0).astype(float)
    model = train_gbt(X, y, GBTParams(rounds=2, depth=1))
    d = model.to_dict()
    d["version"] = 99
    with pytest.raises(ValueError, match="version"):
        GBTModel.from_dict(d)


def test_empty_dataset_errors():
    with pytest.raises(ValueError, match="empty"):
        train_gbt(np.zeros((0, 3)), np.zeros(0))


def test_split_indices_deterministic_and_disjoint():
    train_idx, test_idx = split_indices(100, 0.2, seed=3)
    train2, test2 = split_indices(100, 0.2, seed=3)
    assert np.array_equal(train_idx, train2) and np.array_equal(test_idx, test2)
    assert len(test_idx) == 20
    assert set(train_idx) | set(test_idx) == set(range(100))
    assert not set(train_idx) & set(test_idx)


# --- prediction grid -------------------------------------------------------------


@pytest.fixture(scope="module")
def small_city_model():
    g = build_graph(grid_streets(8, 8, 300.0), origin=CITY_ORIGIN)
    rng = np.random.default_rng(6)
    n = 100
    origin_nodes = rng.integers(0, g.node_count, n)
    dest_nodes = rng.integers(0, g.node_count, n)
    X = rng.normal(size=(n, 4))
    labels = (X[:, 0] > 0).astype(np.int8)
    model = train_gbt(X, labels.astype(float), GBTParams(rounds=10, depth=2, learning_rate=0.5))
    return g, model, X, labels, origin_nodes, dest_nodes


def test_grid_empty_is_all_zero(small_city_model):
    g, model, X, labels, o, d = small_city_model
    grid = prediction_grid(model, X[:0], labels[:0], o[:0], d[:0], g, cell_m=500.0)
    assert grid.total == 0
    assert grid.success.sum() == 0 and grid.failure.sum() == 0


def test_grid_single_correct_trip_same_cell(small_city_model):
    g, model, X, labels, _, _ = small_city_model
    preds = model.predict(X)
    correct = np.flatnonzero(preds == labels)
    i = int(correct[0])
    # both endpoints at node 0 -> same cell gets success 2
    grid = prediction_grid(
        model, X[i : i + 1], labels[i : i + 1], np.array([0]), np.array([0]), g, cell_m=500.0
    )
    assert grid.success.sum() == 2 and grid.failure.sum() == 0
    ix, iy = grid.cell_of(g.node_x[0], g.node_y[0])
    assert grid.success[ix, iy] == 2


def test_grid_matches_brute_force_tally(small_city_model):
    g, model, X, labels, origin_nodes, dest_nodes = small_city_model
    cell = 500.0
    grid = prediction_grid(model, X, labels, origin_nodes, dest_nodes, g, cell_m=cell)

    preds = model.predict(X)
    succ = np.zeros((grid.nx, grid.ny), dtype=int)
    fail = np.zeros((grid.nx, grid.ny), dtype=int)
    for i in range(len(labels)):
        ok = preds[i] == labels[i]
        for node in (origin_nodes[i], dest_nodes[i]):
            ix = min(int((g.node_x[node] - grid.min_x) // cell), grid.nx - 1)
            iy = min(int((g.node_y[node] - grid.min_y) // cell), grid.ny - 1)
            if ok:
                succ[ix, iy] += 1
            else:
                fail[ix, iy] += 1
    assert np.array_equal(grid.success, succ)
    assert np.array_equal(grid.failure, fail)


def test_grid_mass_conservation(small_city_model):
    g, model, X, labels, origin_nodes, dest_nodes = small_city_model
    grid = prediction_grid(model, X, labels, origin_nodes, dest_nodes, g)
    assert grid.total == 2 * len(labels)
