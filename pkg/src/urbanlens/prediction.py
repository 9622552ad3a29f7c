"""Trip-level crime prediction: vectors, rebalancing, evaluation, and the
success/failure grid.

A trip's feature vector is the 26-feature origin row concatenated with the
destination row (52 values). Training rebalances by random undersampling, so
the 0.5 decision threshold is calibrated by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boosting import GBTModel, GBTParams, train_gbt
from .features import FeatureTable
from .streets import StreetGraph
from .trips import TripTable


def build_trip_matrix(features: FeatureTable, trips: TripTable) -> tuple[np.ndarray, np.ndarray]:
    """(n_trips, 52) matrix of origin++destination rows plus the 0/1 labels."""
    X = np.hstack(
        [features.values[trips.origin_nodes], features.values[trips.dest_nodes]]
    )
    return X, trips.labels.astype(np.int8)


def undersample(X: np.ndarray, y: np.ndarray, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Balance classes exactly: majority sampled without replacement down to the
    minority size, then a deterministic shuffle of the combined set."""
    y = np.asarray(y)
    classes, counts = np.unique(y, return_counts=True)
    if classes.size < 2:
        raise ValueError("undersampling requires both classes present")
    order = np.argsort(counts, kind="stable")  # stable: balanced input stays two classes
    minority = classes[order[0]]
    majority = classes[order[-1]]
    min_idx = np.flatnonzero(y == minority)
    maj_idx = np.flatnonzero(y == majority)
    rng = np.random.default_rng(seed)
    kept_maj = rng.choice(maj_idx, size=min_idx.size, replace=False)
    combined = np.concatenate([min_idx, kept_maj])
    combined = combined[rng.permutation(combined.size)]
    return X[combined], y[combined]


def g_mean(preds: np.ndarray, labels: np.ndarray) -> float:
    """sqrt(sensitivity x specificity); an absent class contributes rate 0."""
    preds = np.asarray(preds)
    labels = np.asarray(labels)
    if preds.shape != labels.shape:
        raise ValueError("predictions and labels must align")
    tp = int(((preds == 1) & (labels == 1)).sum())
    fn = int(((preds == 0) & (labels == 1)).sum())
    tn = int(((preds == 0) & (labels == 0)).sum())
    fp = int(((preds == 1) & (labels == 0)).sum())
    sensitivity = tp / (tp + fn) if (tp + fn) > 0 else 0.0
    specificity = tn / (tn + fp) if (tn + fp) > 0 else 0.0
    return float(np.sqrt(sensitivity * specificity))


def train(X: np.ndarray, y: np.ndarray, params: GBTParams | None = None) -> GBTModel:
    """Fit the boosted-trees classifier (see :mod:`urbanlens.boosting`)."""
    return train_gbt(X, y, params)


def split_indices(n: int, test_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic train/held-out index split."""
    if not (0.0 < test_fraction < 1.0):
        raise ValueError("test fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    n_test = max(1, int(round(n * test_fraction)))
    return order[n_test:], order[:n_test]


@dataclass
class PredictionGrid:
    """Regular grid over the node bounding box accumulating per-cell tallies of
    correct (success) and incorrect (failure) trip predictions. Each trip counts
    at both its origin and destination cell."""

    cell_m: float
    min_x: float
    min_y: float
    nx: int
    ny: int
    success: np.ndarray  # (nx, ny) int64
    failure: np.ndarray

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        ix = min(int((x - self.min_x) // self.cell_m), self.nx - 1)
        iy = min(int((y - self.min_y) // self.cell_m), self.ny - 1)
        return max(ix, 0), max(iy, 0)

    @property
    def total(self) -> int:
        return int(self.success.sum() + self.failure.sum())


def prediction_grid(
    model: GBTModel,
    X: np.ndarray,
    labels: np.ndarray,
    origin_nodes: np.ndarray,
    dest_nodes: np.ndarray,
    g: StreetGraph,
    cell_m: float = 500.0,
    threshold: float = 0.5,
) -> PredictionGrid:
    """Score trips and rasterize correctness onto the grid."""
    if g.node_count == 0:
        raise ValueError("empty graph")
    node_x = np.asarray(g.node_x)
    node_y = np.asarray(g.node_y)
    min_x, max_x = float(node_x.min()), float(node_x.max())
    min_y, max_y = float(node_y.min()), float(node_y.max())
    nx = max(1, int(np.ceil((max_x - min_x) / cell_m)) or 1)
    ny = max(1, int(np.ceil((max_y - min_y) / cell_m)) or 1)
    grid = PredictionGrid(
        cell_m=cell_m,
        min_x=min_x,
        min_y=min_y,
        nx=nx,
        ny=ny,
        success=np.zeros((nx, ny), dtype=np.int64),
        failure=np.zeros((nx, ny), dtype=np.int64),
    )
    if len(labels) == 0:
        return grid
    preds = model.predict(X, threshold=threshold)
    correct = preds == np.asarray(labels)
    for nodes in (origin_nodes, dest_nodes):
        xs = node_x[nodes]
        ys = node_y[nodes]
        ix = np.clip(((xs - min_x) // cell_m).astype(np.int64), 0, nx - 1)
        iy = np.clip(((ys - min_y) // cell_m).astype(np.int64), 0, ny - 1)
        np.add.at(grid.success, (ix[correct], iy[correct]), 1)
        np.add.at(grid.failure, (ix[~correct], iy[~correct]), 1)
    return grid
