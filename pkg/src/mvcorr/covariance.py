"""Batch covariance estimation for multi-view data.

Views are d x N matrices (features by samples). The within-view covariance
averages per-view cross products, the total-view covariance is the cross
product of the view sum, and the between-view covariance is their difference,
which equals the direct sum over all ordered view pairs at O(m) cost instead
of O(m^2). Covariances are intentionally not scaled by (N - 1); the scaling
cancels in the correlation ratio.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix


@dataclass(frozen=True)
class CovarianceSet:
    """The four covariance matrices of one batch plus the counts behind them.

    r_b is always r_t - r_w exactly as computed, and r_w_shrunk is the
    shrinkage-regularized within-view covariance used as the denominator
    of the correlation objective.
    """

    r_w: np.ndarray
    r_w_shrunk: np.ndarray
    r_t: np.ndarray
    r_b: np.ndarray
    m: int
    n: int


def center_columns(x):
    """Subtract each feature's mean across samples (x is d x N, N >= 2)."""
    x = as_matrix(x, "center_columns input")
    if x.shape[1] < 2:
        raise ValueError(f"need at least 2 samples to center, got {x.shape[1]}")
    return x - x.mean(axis=1, keepdims=True)


def _check_views(views):
    if len(views) < 2:
        raise ValueError(f"need at least 2 views, got {len(views)}")
    views = [as_matrix(v, f"view {i}") for i, v in enumerate(views)]
    shape = views[0].shape
    for i, v in enumerate(views):
        if v.shape != shape:
            raise ValueError(f"view {i} has shape {v.shape}, expected {shape}")
    return views


def within_view_cov(views):
    """(1/m) * sum_l X_l X_l^T over centered views; symmetric PSD."""
    views = _check_views(views)
    acc = np.zeros((views[0].shape[0],) * 2)
    for v in views:  # ascending view order, fixed for determinism
        acc += v @ v.T
    acc /= len(views)
    return 0.5 * (acc + acc.T)


def total_view_cov(views):
    """(1/m) * (sum_l X_l)(sum_l X_l)^T; costs O(m) in the view count."""
    views = _check_views(views)
    total = np.zeros_like(views[0])
    for v in views:
        total += v
    cov = (total @ total.T) / len(views)
    return 0.5 * (cov + cov.T)


def between_view_cov(r_t, r_w):
    """Between-view covariance as the total/within difference."""
    r_t = as_matrix(r_t, "r_t")
    r_w = as_matrix(r_w, "r_w")
    return r_t - r_w


def pairwise_between_cov(views):
    """Direct O(m^2) between-view covariance: (1/m) * sum_{l != k} X_l X_k^T.

    The slow reference estimator; used by the covariance self-check to
    validate the total/within shortcut.
    """
    views = _check_views(views)
    acc = np.zeros((views[0].shape[0],) * 2)
    for l, vl in enumerate(views):
        for k, vk in enumerate(views):
            if l != k:
                acc += vl @ vk.T
    return acc / len(views)


def shrink(r_w, nu):
    """Shrinkage regularization (1 - nu) * r_w + nu * tr(r_w) * I / d.

    Preserves the trace and is strictly positive-definite for nu > 0
    whenever r_w is PSD with positive trace.
    """
    r_w = as_matrix(r_w, "shrink input")
    if r_w.shape[0] != r_w.shape[1]:
        raise ValueError(f"shrink input must be square, got {r_w.shape}")
    nu = float(nu)
    if not 0.0 <= nu <= 1.0:
        raise ValueError(f"shrinkage parameter must lie in [0, 1], got {nu}")
    d = r_w.shape[0]
    trace = float(np.trace(r_w))
    return (1.0 - nu) * r_w + (nu * trace / d) * np.eye(d)


def estimate(views, nu=0.2, center=True):
    """Build the full CovarianceSet for one batch of views.

    Centers each view's features by default (batches from a sampler are not
    mean-zero), then computes within/total/between covariances and the
    shrunk within-view covariance.
    """
    views = _check_views(views)
    if center:
        views = [center_columns(v) for v in views]
    r_w = within_view_cov(views)
    r_t = total_view_cov(views)
    return CovarianceSet(
        r_w=r_w,
        r_w_shrunk=shrink(r_w, nu),
        r_t=r_t,
        r_b=between_view_cov(r_t, r_w),
        m=len(views),
        n=views[0].shape[1],
    )
