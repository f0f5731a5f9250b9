"""The multi-view correlation objective, its shared subspace and gradients.

The correlation rho of a batch is the mean generalized eigenvalue of the
between-view covariance against the shrunk within-view covariance, divided
by (m - 1). It is bounded above by 1, so training minimizes the loss
1 - rho. Because the shared subspace is the *full* eigenbasis, rho reduces
to tr(R_w_shrunk^-1 R_b) / (d (m - 1)), which is computed with a Cholesky
solve (no explicit inverse) and has a clean analytic gradient that avoids
differentiating an eigendecomposition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import covariance
from .linalg import EigenPair, NotPositiveDefinite, cholesky, cholesky_solve, gev_solve


@dataclass(frozen=True)
class MvCorrResult:
    rho: float
    loss: float
    m: int
    d: int
    subspace: EigenPair | None = None


def _denominator_factor(cov):
    try:
        return cholesky(cov.r_w_shrunk)
    except NotPositiveDefinite as exc:
        raise ValueError(
            "shrunk within-view covariance is not positive-definite; "
            "increase the shrinkage parameter nu"
        ) from exc


def mv_corr(cov):
    """Multi-view correlation of one batch from its CovarianceSet."""
    if cov.m < 2:
        raise ValueError(f"need at least 2 views, got {cov.m}")
    d = cov.r_w.shape[0]
    low = _denominator_factor(cov)
    ratio = cholesky_solve(low, cov.r_b)
    rho = float(np.trace(ratio)) / (d * (cov.m - 1))
    return MvCorrResult(rho=rho, loss=1.0 - rho, m=cov.m, d=d)


def shared_subspace(cov):
    """Full generalized eigenbasis of (r_b, r_w_shrunk), eigenvalues descending.

    The returned vectors W satisfy W.T @ r_w_shrunk @ W == I.
    """
    return gev_solve(cov.r_b, cov.r_w_shrunk)


def _rho_grads(embeddings, nu):
    """Gradient of rho with respect to each raw (uncentered) embedding matrix.

    Centering, the covariance estimators and the shrinkage trace are all
    treated as functions of the embeddings, so the result matches finite
    differences of the same scalar exactly (up to float error).
    """
    if len(embeddings) < 2:
        raise ValueError(f"need at least 2 views, got {len(embeddings)}")
    xs = [covariance.center_columns(h) for h in embeddings]
    m = len(xs)
    d = xs[0].shape[0]
    cov = covariance.estimate(xs, nu=nu, center=False)
    low = _denominator_factor(cov)
    ratio = cholesky_solve(low, cov.r_b)                 # R_ws^-1 R_b
    gmat = cholesky_solve(low, ratio.T)                  # R_ws^-1 R_b R_ws^-1
    trace_g = float(np.trace(gmat))
    total = np.zeros_like(xs[0])
    for x in xs:
        total += x
    lead = cholesky_solve(low, total)                    # R_ws^-1 * sum_l X_l
    scale = 2.0 / (m * d * (m - 1))
    rho = float(np.trace(ratio)) / (d * (m - 1))
    grads = []
    for x in xs:
        term = lead - cholesky_solve(low, x) - (1.0 - nu) * (gmat @ x) \
            - (nu / d) * trace_g * x
        grad = scale * term
        grad -= grad.mean(axis=1, keepdims=True)         # centering Jacobian
        grads.append(grad)
    return grads, MvCorrResult(rho=rho, loss=1.0 - rho, m=m, d=d)


def grad_loss(embeddings, nu):
    """Gradient of the loss 1 - rho with respect to each embedding matrix.

    Exactly the negated rho gradient.
    """
    grads, _ = _rho_grads(embeddings, nu)
    return [-g for g in grads]


def loss_and_grad(embeddings, nu):
    """One-pass loss value plus loss gradients, for the training loop."""
    grads, result = _rho_grads(embeddings, nu)
    return result, [-g for g in grads]
