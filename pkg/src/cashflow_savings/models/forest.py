"""Random forest of CART regression trees grown on bootstrap samples."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from .base import Family, ForecastModel, TrainingSummary, check_width

LEAF = -1


@dataclass(frozen=True)
class Tree:
    """Flat binary tree; ``feature[i] == LEAF`` marks a leaf holding ``value[i]``.

    Rows with ``x[feature] <= threshold`` go to ``left``.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray

    @property
    def n_leaves(self):
        return int(np.sum(self.feature == LEAF))

    def predict(self, X):
        node = np.zeros(len(X), dtype=int)
        active = self.feature[node] != LEAF
        while active.any():
            idx = np.flatnonzero(active)
            nd = node[idx]
            go_left = X[idx, self.feature[nd]] <= self.threshold[nd]
            node[idx] = np.where(go_left, self.left[nd], self.right[nd])
            active[idx] = self.feature[node[idx]] != LEAF
        return self.value[node]


@dataclass(frozen=True)
class ForestParams:
    tree_count: int
    mtry: int
    node_size: int
    trees: tuple
    seed: int

    @property
    def n_parameters(self):
        return sum(t.n_leaves for t in self.trees)


def best_split(X, y, columns):
    """Lowest total child SSE over midpoints of consecutive distinct values.

    Returns ``(sse, column, threshold)``, or ``None`` when no column can be split.
    Ties keep the earlier column in ``columns`` and then the lower threshold.
    """
    best = None
    n = len(y)
    for j in columns:
        order = np.argsort(X[:, j], kind="stable")
        xs, ys = X[order, j], y[order]
        cuts = np.flatnonzero(xs[:-1] < xs[1:])
        if cuts.size == 0:
            continue
        s1, s2 = np.cumsum(ys), np.cumsum(ys * ys)
        nl = cuts + 1.0
        nr = n - nl
        left = s2[cuts] - s1[cuts] ** 2 / nl
        right = (s2[-1] - s2[cuts]) - (s1[-1] - s1[cuts]) ** 2 / nr
        total = left + right
        k = int(np.argmin(total))
        if best is None or total[k] < best[0]:
            best = (float(total[k]), int(j), 0.5 * (xs[cuts[k]] + xs[cuts[k] + 1]))
    return best


def grow_tree(X, y, mtry, node_size, rng):
    feature, threshold, left, right, value, count = [], [], [], [], [], []

    def new_node(idx):
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(y[idx].mean()))
        count.append(len(idx))
        return len(feature) - 1

    stack = [(new_node(np.arange(len(y))), np.arange(len(y)))]
    n_cols = X.shape[1]
    while stack:
        node, idx = stack.pop()
        if len(idx) <= node_size:
            continue
        yy = y[idx]
        parent_sse = float(np.sum((yy - yy.mean()) ** 2))
        if parent_sse <= 0:
            continue
        cols = np.sort(rng.choice(n_cols, size=mtry, replace=False))
        split = best_split(X[idx], yy, cols)
        if split is None or parent_sse - split[0] <= 1e-12 * parent_sse:
            continue
        _, j, thr = split
        mask = X[idx, j] <= thr
        li, ri = idx[mask], idx[~mask]
        feature[node], threshold[node] = j, thr
        left[node] = new_node(li)
        right[node] = new_node(ri)
        stack.append((right[node], ri))
        stack.append((left[node], li))
    return Tree(np.array(feature), np.array(threshold), np.array(left), np.array(right),
                np.array(value), np.array(count))


def fit_random_forest(X, a, b, c, seed=0):
    """Grow ``a`` trees; ``b`` candidate columns per split; nodes of ``<= c`` rows are leaves.

    Tree ``i`` draws its bootstrap sample and split candidates from a generator
    seeded with ``seed + i``.
    """
    n, m = X.values.shape
    if a < 1 or c < 1 or b < 1:
        raise ValidationError("a, b and c must be positive")
    if b > m:
        raise ValidationError(f"mtry b={b} exceeds the {m} available columns")
    if n < 1:
        raise ValidationError("empty training set")
    trees = []
    for i in range(a):
        rng = np.random.default_rng(seed + i)
        boot = rng.integers(0, n, size=n)
        trees.append(grow_tree(X.values[boot], X.target[boot], b, c, rng))
    params = ForestParams(a, b, c, tuple(trees), int(seed))
    model = ForecastModel(Family.RANDOM_FOREST, params,
                          TrainingSummary(n, float(X.target.mean()), 0.0),
                          columns=tuple(X.columns))
    resid = X.target - predict_forest(model, X.values)
    summary = TrainingSummary(n, float(X.target.mean()), float(resid @ resid / max(n - 1, 1)))
    return ForecastModel(Family.RANDOM_FOREST, params, summary, columns=tuple(X.columns))


def tree_predictions(model, X_new):
    X_new = check_width(model, X_new)
    return np.array([t.predict(X_new) for t in model.params.trees])


def predict_forest(model, X_new):
    return tree_predictions(model, X_new).mean(axis=0)
