"""Legend analytics: feature correlation reduced to layer blocks, and Shapley
feature attributions reported as absolute values.

Shapley masking substitutes background means for absent features. Exact mode
enumerates all subsets and is reserved for small (<= 12 feature) models; the
Monte Carlo estimator averages marginal contributions over seeded random
permutations and stays deterministic for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .features import FEATURE_LAYER, FEATURE_NAMES, THEMATIC_LAYERS

EXACT_FEATURE_LIMIT = 12

# callable scoring a batch of (possibly masked) rows
ScoreFn = Callable[[np.ndarray], np.ndarray]


def trip_layer_assignment() -> list[str]:
    """Thematic layer of each of the 52 trip-vector features (origin then destination)."""
    per_node = [FEATURE_LAYER[name] for name in FEATURE_NAMES]
    return per_node + per_node


def trip_feature_names() -> list[str]:
    return [f"origin_{n}" for n in FEATURE_NAMES] + [f"dest_{n}" for n in FEATURE_NAMES]


def pearson_matrix(features: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Pearson correlation of the columns; zero-variance columns correlate 0
    with everything (1 with themselves) and are returned as flagged indices."""
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need at least 2 rows to correlate")
    centered = X - X.mean(axis=0)
    std = centered.std(axis=0)
    flagged = [int(i) for i in np.flatnonzero(std == 0.0)]
    safe_std = np.where(std == 0.0, 1.0, std)
    Z = centered / safe_std
    corr = (Z.T @ Z) / X.shape[0]
    for i in flagged:
        corr[i, :] = 0.0
        corr[:, i] = 0.0
    np.fill_diagonal(corr, 1.0)
    return np.clip(corr, -1.0, 1.0), flagged


def reduce_by_layer(
    full: np.ndarray, assignment: list[str], layers: tuple[str, ...] = THEMATIC_LAYERS
) -> tuple[np.ndarray, list[str]]:
    """Collapse the feature matrix to layer blocks by block means.

    Off-diagonal entries average all cross-layer pairs; diagonal entries
    average distinct within-layer pairs (the unit self-correlations are
    excluded). A singleton layer keeps 1 on the diagonal and is flagged.
    """
    full = np.asarray(full, dtype=np.float64)
    if len(assignment) != full.shape[0]:
        raise ValueError("assignment must cover every feature")
    unknown = set(assignment) - set(layers)
    if unknown:
        raise ValueError(f"assignment references unknown layers: {sorted(unknown)}")
    members = {layer: [i for i, a in enumerate(assignment) if a == layer] for layer in layers}
    k = len(layers)
    reduced = np.zeros((k, k), dtype=np.float64)
    flagged: list[str] = []
    for i, li in enumerate(layers):
        for j, lj in enumerate(layers):
            a = members[li]
            b = members[lj]
            if i == j:
                if len(a) < 2:
                    reduced[i, j] = 1.0
                    if len(a) == 1:
                        flagged.append(li)
                    continue
                vals = [full[p, q] for pi, p in enumerate(a) for q in a[pi + 1 :]]
                reduced[i, j] = float(np.mean(vals))
            else:
                block = full[np.ix_(a, b)]
                reduced[i, j] = float(block.mean()) if block.size else 0.0
    return reduced, flagged


@dataclass
class CorrelationReport:
    full: np.ndarray  # 52 x 52
    reduced: np.ndarray  # 8 x 8
    layers: tuple[str, ...]
    feature_names: list[str]
    assignment: list[str]
    zero_variance: list[int] = field(default_factory=list)
    singleton_layers: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "layers": list(self.layers),
            "feature_names": self.feature_names,
            "assignment": self.assignment,
            "full": self.full.tolist(),
            "reduced": self.reduced.tolist(),
            "zero_variance": self.zero_variance,
            "singleton_layers": self.singleton_layers,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CorrelationReport":
        return cls(
            full=np.asarray(d["full"], dtype=np.float64),
            reduced=np.asarray(d["reduced"], dtype=np.float64),
            layers=tuple(d["layers"]),
            feature_names=list(d["feature_names"]),
            assignment=list(d["assignment"]),
            zero_variance=list(d["zero_variance"]),
            singleton_layers=list(d["singleton_layers"]),
        )


def correlation_report(trip_matrix: np.ndarray) -> CorrelationReport:
    full, flagged = pearson_matrix(trip_matrix)
    assignment = trip_layer_assignment()
    reduced, singletons = reduce_by_layer(full, assignment)
    return CorrelationReport(
        full=full,
        reduced=reduced,
        layers=THEMATIC_LAYERS,
        feature_names=trip_feature_names(),
        assignment=assignment,
        zero_variance=flagged,
        singleton_layers=singletons,
    )


def _masked_rows(x: np.ndarray, background: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """Rows equal to ``x`` where mask is True, background mean elsewhere."""
    return np.where(masks, x[None, :], background[None, :])


def shapley_exact(f: ScoreFn, x: np.ndarray, background: np.ndarray) -> np.ndarray:
    """Exact Shapley values by subset enumeration (<= 12 features)."""
    d = x.shape[0]
    if d > EXACT_FEATURE_LIMIT:
        raise ValueError(
            f"exact mode supports at most {EXACT_FEATURE_LIMIT} features; use monte_carlo"
        )
    n_masks = 1 << d
    masks = np.zeros((n_masks, d), dtype=bool)
    for m in range(n_masks):
        for i in range(d):
            masks[m, i] = bool(m >> i & 1)
    values = np.asarray(f(_masked_rows(x, background, masks)), dtype=np.float64)
    fact = [math.factorial(i) for i in range(d + 1)]
    phi = np.zeros(d, dtype=np.float64)
    for m in range(n_masks):
        size = int(bin(m).count("1"))
        for i in range(d):
            if m >> i & 1:
                continue
            weight = fact[size] * fact[d - size - 1] / fact[d]
            phi[i] += weight * (values[m | (1 << i)] - values[m])
    return phi


def shapley_monte_carlo(
    f: ScoreFn,
    x: np.ndarray,
    background: np.ndarray,
    permutations: int,
    seed: int = 0,
) -> np.ndarray:
    """Permutation-sampling Shapley estimate; deterministic under the seed."""
    d = x.shape[0]
    if permutations < 1:
        raise ValueError("need at least one permutation")
    rng = np.random.default_rng(seed)
    orders = [rng.permutation(d) for _ in range(permutations)]
    # one batched scoring call: permutations x (d+1) prefix masks
    masks = np.zeros((permutations * (d + 1), d), dtype=bool)
    for p, order in enumerate(orders):
        base = p * (d + 1)
        for pos, feat in enumerate(order):
            masks[base + pos + 1] = masks[base + pos]
            masks[base + pos + 1, feat] = True
    values = np.asarray(f(_masked_rows(x, background, masks)), dtype=np.float64)
    phi = np.zeros(d, dtype=np.float64)
    for p, order in enumerate(orders):
        block = values[p * (d + 1) : (p + 1) * (d + 1)]
        phi[order] += np.diff(block)
    return phi / permutations


def shapley(
    f: ScoreFn,
    x: np.ndarray,
    background: np.ndarray,
    method: str = "monte_carlo",
    permutations: int = 2000,
    seed: int = 0,
) -> np.ndarray:
    if method == "exact":
        return shapley_exact(f, x, background)
    if method == "monte_carlo":
        return shapley_monte_carlo(f, x, background, permutations, seed)
    raise ValueError(f"unknown shapley method: {method!r}")


@dataclass
class ShapleyReport:
    """Mean absolute attributions over an evaluation sample, plus layer sums."""

    feature_names: list[str]
    assignment: list[str]
    mean_abs: np.ndarray
    layer_totals: dict[str, float]
    percentages: np.ndarray
    sample_size: int
    method: str

    def to_dict(self) -> dict:
        return {
            "feature_names": self.feature_names,
            "assignment": self.assignment,
            "mean_abs": self.mean_abs.tolist(),
            "layer_totals": self.layer_totals,
            "percentages": self.percentages.tolist(),
            "sample_size": self.sample_size,
            "method": self.method,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ShapleyReport":
        return cls(
            feature_names=list(d["feature_names"]),
            assignment=list(d["assignment"]),
            mean_abs=np.asarray(d["mean_abs"], dtype=np.float64),
            layer_totals=dict(d["layer_totals"]),
            percentages=np.asarray(d["percentages"], dtype=np.float64),
            sample_size=int(d["sample_size"]),
            method=str(d["method"]),
        )


def shapley_report(
    f: ScoreFn,
    sample: np.ndarray,
    background: np.ndarray,
    feature_names: list[str],
    assignment: list[str],
    method: str = "monte_carlo",
    permutations: int = 10,
    seed: int = 0,
) -> ShapleyReport:
    """Mean |phi| per feature over the sample, summed per layer, with shares of
    the grand total (0 when the model is constant)."""
    sample = np.asarray(sample, dtype=np.float64)
    if sample.ndim != 2 or sample.shape[0] == 0:
        raise ValueError("evaluation sample must be a non-empty matrix")
    d = sample.shape[1]
    abs_sum = np.zeros(d, dtype=np.float64)
    for row_i, row in enumerate(sample):
        phi = shapley(f, row, background, method=method, permutations=permutations,
                      seed=seed + row_i)
        abs_sum += np.abs(phi)
    mean_abs = abs_sum / sample.shape[0]
    layer_totals = {layer: 0.0 for layer in THEMATIC_LAYERS}
    for value, layer in zip(mean_abs, assignment):
        layer_totals[layer] += float(value)
    grand = float(mean_abs.sum())
    percentages = (mean_abs / grand * 100.0) if grand > 0 else np.zeros(d)
    method_label = method if method == "exact" else f"monte_carlo({permutations})"
    return ShapleyReport(
        feature_names=list(feature_names),
        assignment=list(assignment),
        mean_abs=mean_abs,
        layer_totals=layer_totals,
        percentages=percentages,
        sample_size=sample.shape[0],
        method=method_label,
    )
