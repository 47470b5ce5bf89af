"""k-medoids clustering: Park & Jun style alternating updates refined by a
best-improvement swap search, over several seeded starts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import ValidationError


@dataclass(frozen=True)
class Clustering:
    medoids: np.ndarray      # indices into the input points, one per cluster
    labels: np.ndarray       # cluster slot of every point
    cost: float              # total distance of points to their medoid
    cost_history: tuple      # cost after each assignment/update/swap step


def _assign(D, medoids):
    sub = D[:, medoids]
    labels = np.argmin(sub, axis=1)
    labels[medoids] = np.arange(len(medoids))
    return labels, float(sub[np.arange(len(D)), labels].sum())


def _initial_medoids(D, K, rng):
    total = D.sum(axis=1)
    tiebreak = rng.permutation(len(D))
    order = np.lexsort((tiebreak, total))
    chosen = []
    for j in order:
        if all(D[j, m] > 0 for m in chosen):
            chosen.append(int(j))
            if len(chosen) == K:
                break
    return np.array(chosen)


def _update(D, medoids, labels):
    new = medoids.copy()
    for k in range(len(medoids)):
        members = np.flatnonzero(labels == k)
        others = np.delete(medoids, k)
        if len(others):
            members = members[D[np.ix_(members, others)].min(axis=1) > 0]
        within = D[np.ix_(members, members)].sum(axis=1)
        best = within.min()
        current = within[members == medoids[k]]
        if current.size and current[0] <= best:
            continue
        new[k] = members[np.argmin(within)]
    return new


def _best_swap(D, medoids):
    """Cheapest (slot, candidate) exchange, computed for all pairs at once."""
    n, K = len(D), len(medoids)
    sub = D[:, medoids]
    order = np.argsort(sub, axis=1, kind="stable")
    nearest = order[:, 0]
    d1 = sub[np.arange(n), nearest]
    d2 = sub[np.arange(n), order[:, 1]] if K > 1 else np.full(n, np.inf)
    gain = np.maximum(d1[None, :] - D, 0.0)
    common = -gain.sum(axis=1)
    correction = np.minimum(D, d2[None, :]) - d1[None, :] + gain
    onehot = np.zeros((n, K))
    onehot[np.arange(n), nearest] = 1.0
    delta = common[:, None] + correction @ onehot
    invalid = D[:, medoids].min(axis=1) == 0  # medoids and their duplicates
    delta[invalid] = np.inf
    x, k = np.unravel_index(np.argmin(delta), delta.shape)
    return int(x), int(k), float(delta[x, k])


def _local_search(D, medoids, swap, max_iter, tol):
    labels, cost = _assign(D, medoids)
    history = [cost]
    for _ in range(max_iter):
        while True:
            candidate = _update(D, medoids, labels)
            new_labels, new_cost = _assign(D, candidate)
            if new_cost < cost - tol:
                medoids, labels, cost = candidate, new_labels, new_cost
                history.append(cost)
            else:
                break
        if not swap or len(medoids) == len(D):
            break
        x, k, delta = _best_swap(D, medoids)
        if not delta < -tol:
            break
        medoids = medoids.copy()
        medoids[k] = x
        labels, cost = _assign(D, medoids)
        history.append(cost)
    return Clustering(medoids, labels, cost, tuple(history))


def _random_medoids(D, K, rng):
    chosen = []
    for j in rng.permutation(len(D)):
        if all(D[j, m] > 0 for m in chosen):
            chosen.append(int(j))
            if len(chosen) == K:
                break
    return np.array(chosen)


def fit_kmedoids(points, K, seed=0, swap=True, n_init=20, max_iter=200):
    """Cluster ``points`` (n x d) around ``K`` medoids under Euclidean distance.

    The first start uses the K most central points; the remaining ``n_init - 1``
    starts draw distinct points at random. The lowest-cost result is kept.
    """
    X = np.asarray(points, float)
    if X.ndim == 1:
        X = X[:, None]
    n_distinct = len(np.unique(X, axis=0))
    if K < 1 or K > n_distinct:
        raise ValidationError(f"K={K} must be between 1 and the number of distinct points "
                              f"({n_distinct})")
    D = cdist(X, X)
    rng = np.random.default_rng(seed)
    tol = 1e-12 * max(float(D.max()), 1.0)
    best = _local_search(D, _initial_medoids(D, K, rng), swap, max_iter, tol)
    for _ in range(max(n_init, 1) - 1):
        result = _local_search(D, _random_medoids(D, K, rng), swap, max_iter, tol)
        if result.cost < best.cost - tol:
            best = result
    return best
