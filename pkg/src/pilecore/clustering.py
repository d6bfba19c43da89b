"""Seeded k-means on raw feature vectors (Euclidean, k-means++ init).

Deterministic for a fixed seed: initialization and every tie-break go through
a PCG64 generator seeded by the caller, and empty clusters are repaired by
moving the point farthest from its centroid, so every cluster is non-empty on
return.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ClusterCountError

MAX_ITERATIONS = 100


def default_cluster_count(n_items: int) -> int:
    """Default k when the caller does not pin one: max(2, ceil(sqrt(n / 2)))."""
    return max(2, math.ceil(math.sqrt(n_items / 2.0)))


def _plusplus_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centroids = np.empty((k, x.shape[1]), dtype=np.float64)
    centroids[0] = x[rng.integers(0, n)]
    closest = np.sum((x - centroids[0]) ** 2, axis=1)
    for j in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            # all remaining points coincide with a centroid; pick uniformly
            idx = int(rng.integers(0, n))
        else:
            idx = int(rng.choice(n, p=closest / total))
        centroids[j] = x[idx]
        closest = np.minimum(closest, np.sum((x - centroids[j]) ** 2, axis=1))
    return centroids


def _assign(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    d2 = ((x[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1)


def _repair_empty(x: np.ndarray, assignments: np.ndarray, centroids: np.ndarray) -> None:
    """Give every empty cluster the point currently farthest from its centroid."""
    k = centroids.shape[0]
    for j in range(k):
        if np.any(assignments == j):
            continue
        dist = np.sum((x - centroids[assignments]) ** 2, axis=1)
        donor_sizes = np.bincount(assignments, minlength=k)
        # never steal the last point of another cluster
        eligible = donor_sizes[assignments] > 1
        if not np.any(eligible):
            continue
        dist = np.where(eligible, dist, -1.0)
        farthest = int(np.argmax(dist))
        assignments[farthest] = j
        centroids[j] = x[farthest]


def within_cluster_ss(x: np.ndarray, assignments: np.ndarray, centroids: np.ndarray) -> float:
    return float(np.sum((x - centroids[assignments]) ** 2))


def kmeans(
    vectors,
    k: int,
    seed: int,
    return_objective_trace: bool = False,
):
    """Cluster vectors into k non-empty groups.

    Returns (assignments, centroids); with ``return_objective_trace`` also the
    within-cluster sum of squares measured after each assignment step, which
    is non-increasing. Raises when there are fewer vectors than clusters.
    """
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    if k < 1 or n < k:
        raise ClusterCountError(k, n)

    rng = np.random.default_rng(seed)
    centroids = _plusplus_init(x, k, rng)
    assignments = _assign(x, centroids)
    _repair_empty(x, assignments, centroids)
    trace = [within_cluster_ss(x, assignments, centroids)]

    for _ in range(MAX_ITERATIONS):
        for j in range(k):
            members = x[assignments == j]
            if len(members):
                centroids[j] = members.mean(axis=0)
        new_assignments = _assign(x, centroids)
        _repair_empty(x, new_assignments, centroids)
        trace.append(within_cluster_ss(x, new_assignments, centroids))
        if np.array_equal(new_assignments, assignments):
            assignments = new_assignments
            break
        assignments = new_assignments

    result = ([int(a) for a in assignments], centroids)
    if return_objective_trace:
        return result[0], result[1], trace
    return result
