"""Gradient-boosted regression trees with logistic loss, trained on exact splits.

Self-contained and fully deterministic: split search scans features in index
order and thresholds in ascending order, taking strictly better gains only, so
the same data and parameters always yield identical tree structures. Models
serialize to versioned JSON; floats survive the round trip bit-exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MODEL_FORMAT = "urbanlens-gbt"
MODEL_VERSION = 1

_MIN_GAIN = 1e-12


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-z))


@dataclass
class Tree:
    """Flat array encoding; feature == -1 marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        nid = np.zeros(X.shape[0], dtype=np.int32)
        while True:
            feat = self.feature[nid]
            active = feat >= 0
            if not active.any():
                break
            safe_feat = np.where(active, feat, 0)
            go_left = X[np.arange(X.shape[0]), safe_feat] <= self.threshold[nid]
            nid = np.where(active, np.where(go_left, self.left[nid], self.right[nid]), nid)
        return self.value[nid]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(
            feature=np.asarray(d["feature"], dtype=np.int32),
            threshold=np.asarray(d["threshold"], dtype=np.float64),
            left=np.asarray(d["left"], dtype=np.int32),
            right=np.asarray(d["right"], dtype=np.int32),
            value=np.asarray(d["value"], dtype=np.float64),
        )


@dataclass
class GBTParams:
    rounds: int = 200
    depth: int = 4
    learning_rate: float = 0.2
    reg_lambda: float = 1.0
    min_samples_leaf: int = 1
    seed: int = 0  # reserved; the exact-split trainer is deterministic

    def to_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "depth": self.depth,
            "learning_rate": self.learning_rate,
            "reg_lambda": self.reg_lambda,
            "min_samples_leaf": self.min_samples_leaf,
            "seed": self.seed,
        }


@dataclass
class GBTModel:
    n_features: int
    base_margin: float
    params: GBTParams
    trees: list[Tree] = field(default_factory=list)

    def predict_margin(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(f"expected (n, {self.n_features}) input")
        margin = np.full(X.shape[0], self.base_margin, dtype=np.float64)
        for tree in self.trees:
            margin += self.params.learning_rate * tree.predict(X)
        return margin

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(self.predict_margin(X))

    def predict(self, X: np.ndarray, threshold: float = 0.5) -> np.ndarray:
        return (self.predict_proba(X) >= threshold).astype(np.int8)

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "n_features": self.n_features,
            "base_margin": self.base_margin,
            "params": self.params.to_dict(),
            "trees": [t.to_dict() for t in self.trees],
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def from_dict(cls, d: dict) -> "GBTModel":
        if d.get("format") != MODEL_FORMAT:
            raise ValueError("not a boosted-trees model file")
        if d.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version: {d.get('version')}")
        return cls(
            n_features=d["n_features"],
            base_margin=d["base_margin"],
            params=GBTParams(**d["params"]),
            trees=[Tree.from_dict(t) for t in d["trees"]],
        )

    @classmethod
    def load(cls, path: str | Path) -> "GBTModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


class _TreeBuilder:
    def __init__(self, X, grad, hess, max_depth, reg_lambda, min_samples_leaf):
        self.X = X
        self.grad = grad
        self.hess = hess
        self.max_depth = max_depth
        self.lam = reg_lambda
        self.min_leaf = min_samples_leaf
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def _new_node(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        return len(self.feature) - 1

    def build(self, idx: np.ndarray) -> int:
        node = self._new_node()
        self._split(node, idx, 0)
        return node

    def _split(self, node: int, idx: np.ndarray, depth: int) -> None:
        g_sum = float(self.grad[idx].sum())
        h_sum = float(self.hess[idx].sum())
        self.value[node] = -g_sum / (h_sum + self.lam)
        if depth >= self.max_depth or idx.size < 2 * self.min_leaf:
            return
        parent_score = g_sum * g_sum / (h_sum + self.lam)
        best_gain = _MIN_GAIN
        best: tuple[int, float, np.ndarray, np.ndarray] | None = None
        for f in range(self.X.shape[1]):
            xs = self.X[idx, f]
            order = np.argsort(xs, kind="stable")
            xs_sorted = xs[order]
            gs = np.cumsum(self.grad[idx][order])
            hs = np.cumsum(self.hess[idx][order])
            # candidate split after position i (left gets i+1 samples)
            boundary = xs_sorted[:-1] < xs_sorted[1:]
            if not boundary.any():
                continue
            gl = gs[:-1]
            hl = hs[:-1]
            gr = g_sum - gl
            hr = h_sum - hl
            gains = gl * gl / (hl + self.lam) + gr * gr / (hr + self.lam) - parent_score
            sizes_ok = np.arange(1, idx.size) >= self.min_leaf
            sizes_ok &= (idx.size - np.arange(1, idx.size)) >= self.min_leaf
            gains = np.where(boundary & sizes_ok, gains, -np.inf)
            i = int(np.argmax(gains))  # first max: lowest threshold wins ties
            if gains[i] > best_gain:
                best_gain = float(gains[i])
                thr = (xs_sorted[i] + xs_sorted[i + 1]) / 2.0
                best = (f, float(thr), order, None)  # type: ignore[assignment]
        if best is None:
            return
        f, thr, _, _ = best
        mask = self.X[idx, f] <= thr
        left_idx = idx[mask]
        right_idx = idx[~mask]
        if left_idx.size == 0 or right_idx.size == 0:
            return
        self.feature[node] = f
        self.threshold[node] = thr
        left = self._new_node()
        right = self._new_node()
        self.left[node] = left
        self.right[node] = right
        self._split(left, left_idx, depth + 1)
        self._split(right, right_idx, depth + 1)

    def to_tree(self) -> Tree:
        return Tree(
            feature=np.asarray(self.feature, dtype=np.int32),
            threshold=np.asarray(self.threshold, dtype=np.float64),
            left=np.asarray(self.left, dtype=np.int32),
            right=np.asarray(self.right, dtype=np.int32),
            value=np.asarray(self.value, dtype=np.float64),
        )


def train_gbt(X: np.ndarray, y: np.ndarray, params: GBTParams | None = None) -> GBTModel:
    """Fit boosted trees minimizing logistic loss on binary labels."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("empty dataset")
    if X.shape[0] != y.shape[0]:
        raise ValueError("feature/label length mismatch")
    if not np.isin(y, (0.0, 1.0)).all():
        raise ValueError("labels must be binary 0/1")
    params = params or GBTParams()

    prior = float(np.clip(y.mean(), 1e-6, 1.0 - 1e-6))
    base_margin = float(np.log(prior / (1.0 - prior)))
    model = GBTModel(n_features=X.shape[1], base_margin=base_margin, params=params)

    margin = np.full(X.shape[0], base_margin, dtype=np.float64)
    all_idx = np.arange(X.shape[0])
    for _ in range(params.rounds):
        p = _sigmoid(margin)
        grad = p - y
        hess = p * (1.0 - p)
        builder = _TreeBuilder(X, grad, hess, params.depth, params.reg_lambda, params.min_samples_leaf)
        builder.build(all_idx)
        tree = builder.to_tree()
        model.trees.append(tree)
        margin += params.learning_rate * tree.predict(X)
    return model
