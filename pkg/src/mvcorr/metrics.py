"""Subspace-affinity measures and downstream evaluation metrics.

The affinity between two sets of vectors (rows = samples) is the normalized
root-mean-square of the principal-angle cosines between their column spaces:
1 when one subspace contains the other, 0 when they are orthogonal. The
reconstruction affinity averages it per view against the ground-truth signal;
the inter-set affinity averages it over all unordered view pairs.

Clustering evaluation runs plain Lloyd k-means with seeded k-means++
initialization and scores label agreement through a maximum-weight matching
of clusters to classes. Gallery matching is 1-NN on unit-normalized vectors.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .linalg import as_matrix, principal_angle_cosines


@dataclass(frozen=True)
class AffinityReport:
    r_a: float | None
    r_s: float
    per_view: list
    per_pair: list


@dataclass(frozen=True)
class ClusterEval:
    assignments: np.ndarray
    accuracy: float
    permutation: dict


def affinity(x, y):
    """Subspace affinity between the column spaces of x and y (samples x k).

    sqrt(mean of squared principal-angle cosines); in [0, 1]. A rank-0
    input yields 0 with a warning.
    """
    x = as_matrix(x, "affinity x")
    y = as_matrix(y, "affinity y")
    if x.shape[0] != y.shape[0]:
        raise ValueError(f"sample counts differ: {x.shape[0]} vs {y.shape[0]}")
    cos = principal_angle_cosines(x, y)
    if cos.size == 0:
        warnings.warn("affinity of a rank-0 input is 0", RuntimeWarning, stacklevel=2)
        return 0.0
    return float(np.sqrt(np.mean(cos**2)))


def reconstruction_affinity(ground_truth, embeddings):
    """Mean per-view affinity between embeddings and the true signal."""
    if len(ground_truth) != len(embeddings):
        raise ValueError(
            f"view counts differ: {len(ground_truth)} ground truth vs "
            f"{len(embeddings)} embeddings"
        )
    if not ground_truth:
        raise ValueError("need at least one view")
    return float(np.mean([affinity(g, e) for g, e in zip(ground_truth, embeddings)]))


def inter_set_affinity(embeddings):
    """Mean affinity over all unordered pairs of view embeddings."""
    m = len(embeddings)
    if m < 2:
        raise ValueError(f"need at least 2 views, got {m}")
    vals = [
        affinity(embeddings[l], embeddings[k]) for l in range(m) for k in range(l + 1, m)
    ]
    return float(np.mean(vals))


def affinity_report(embeddings, ground_truth=None):
    """Both affinities at once, with the per-view / per-pair breakdown."""
    m = len(embeddings)
    if m < 2:
        raise ValueError(f"need at least 2 views, got {m}")
    per_view = []
    r_a = None
    if ground_truth is not None:
        per_view = [affinity(g, e) for g, e in zip(ground_truth, embeddings)]
        r_a = float(np.mean(per_view))
    per_pair = [
        affinity(embeddings[l], embeddings[k]) for l in range(m) for k in range(l + 1, m)
    ]
    return AffinityReport(r_a=r_a, r_s=float(np.mean(per_pair)), per_view=per_view, per_pair=per_pair)


def _squared_distances(points, centers):
    cross = points @ centers.T
    p2 = np.sum(points**2, axis=1)[:, None]
    c2 = np.sum(centers**2, axis=1)[None, :]
    return np.maximum(p2 + c2 - 2.0 * cross, 0.0)


def _kmeanspp_init(points, k, rng):
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    d2 = _squared_distances(points, centers[:1]).ravel()
    for j in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            centers[j] = points[rng.integers(n)]
        else:
            centers[j] = points[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, _squared_distances(points, centers[j : j + 1]).ravel())
    return centers


def kmeans(points, k, seed, restarts=10, max_iter=300):
    """Lloyd k-means, best of `restarts` seeded k-means++ runs by inertia.

    Deterministic given the seed. Returns the assignment vector.
    """
    points = as_matrix(points, "kmeans points")
    k = int(k)
    n = points.shape[0]
    if k < 1:
        raise ValueError(f"need at least one cluster, got {k}")
    if k > n:
        raise ValueError(f"more clusters ({k}) than points ({n})")
    rng = np.random.default_rng(seed)
    best_assign = None
    best_inertia = np.inf
    for _ in range(restarts):
        centers = _kmeanspp_init(points, k, rng)
        prev_inertia = np.inf
        assign = np.zeros(n, dtype=int)
        for _ in range(max_iter):
            d2 = _squared_distances(points, centers)
            assign = np.argmin(d2, axis=1)
            inertia = float(d2[np.arange(n), assign].sum())
            # Lloyd steps never increase the objective
            assert inertia <= prev_inertia * (1 + 1e-9) + 1e-12
            new_centers = centers.copy()
            worst_fit = np.argsort(d2[np.arange(n), assign])[::-1]
            spare = 0
            for j in range(k):
                members = assign == j
                if members.any():
                    new_centers[j] = points[members].mean(axis=0)
                else:
                    # re-seed each empty cluster at a distinct worst-fit point
                    new_centers[j] = points[worst_fit[min(spare, n - 1)]]
                    spare += 1
            if np.array_equal(new_centers, centers):
                break
            centers = new_centers
            prev_inertia = inertia
        d2 = _squared_distances(points, centers)
        assign = np.argmin(d2, axis=1)
        inertia = float(d2[np.arange(n), assign].sum())
        if inertia < best_inertia:
            best_inertia = inertia
            best_assign = assign
    return best_assign


def hungarian_accuracy(pred, true):
    """Clustering accuracy through the optimal cluster-to-class bijection."""
    pred = np.asarray(pred)
    true = np.asarray(true)
    if pred.size == 0 or true.size == 0:
        raise ValueError("labels must be non-empty")
    if pred.shape != true.shape:
        raise ValueError(f"label lengths differ: {pred.shape} vs {true.shape}")
    clusters, pred_idx = np.unique(pred, return_inverse=True)
    classes, true_idx = np.unique(true, return_inverse=True)
    contingency = np.zeros((clusters.size, classes.size), dtype=np.int64)
    np.add.at(contingency, (pred_idx, true_idx), 1)
    rows, cols = linear_sum_assignment(contingency, maximize=True)
    matched = int(contingency[rows, cols].sum())
    permutation = {clusters[r]: classes[c] for r, c in zip(rows, cols)}
    return ClusterEval(
        assignments=pred.copy(),
        accuracy=matched / pred.size,
        permutation=permutation,
    )


def _unit_rows(x):
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    safe = np.where(norms == 0.0, 1.0, norms)
    return x / safe


def nn_match(gallery, gallery_labels, probes, probe_labels):
    """1-NN matching accuracy with normalized Euclidean distance.

    All vectors are scaled to unit L2 norm first; ties break toward the
    lowest gallery index.
    """
    gallery = as_matrix(gallery, "gallery")
    probes = as_matrix(probes, "probes")
    if gallery.shape[1] != probes.shape[1]:
        raise ValueError(
            f"dimension mismatch: gallery {gallery.shape[1]} vs probes {probes.shape[1]}"
        )
    gallery_labels = np.asarray(gallery_labels)
    probe_labels = np.asarray(probe_labels)
    if gallery_labels.size != gallery.shape[0]:
        raise ValueError("gallery label count mismatch")
    if probe_labels.size != probes.shape[0]:
        raise ValueError("probe label count mismatch")
    d2 = _squared_distances(_unit_rows(probes), _unit_rows(gallery))
    nearest = np.argmin(d2, axis=1)
    return float(np.mean(gallery_labels[nearest] == probe_labels))
