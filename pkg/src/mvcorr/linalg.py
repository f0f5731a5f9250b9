"""Dense symmetric linear-algebra kernels: Cholesky, Jacobi eigensolver,
generalized eigenvalue solve, spectral norm and principal angles.

Everything operates on float64 numpy arrays and is pure: inputs are never
mutated, outputs are fresh. Matrix sizes here are at most a few hundred,
so the kernels favor robustness and determinism over speed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SYMMETRY_TOL = 1e-10
RANK_TOL = 1e-10
POWER_TOL = 1e-8
_POWER_SEED = 20151206  # fixed start vector so spectral_norm is deterministic


class NotPositiveDefinite(Exception):
    """Raised when a Cholesky pivot is not strictly positive."""

    def __init__(self, pivot_index, pivot_value):
        self.pivot_index = int(pivot_index)
        self.pivot_value = float(pivot_value)
        super().__init__(
            f"matrix is not positive-definite: pivot {self.pivot_index} "
            f"has value {self.pivot_value:.6e}"
        )


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalues sorted descending with matching eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def as_matrix(a, name="matrix"):
    """Validate and return `a` as a finite 2-d float64 array."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"{name} must be non-empty, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def require_symmetric(a, name="matrix", tol=SYMMETRY_TOL):
    a = as_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a))))
    if float(np.max(np.abs(a - a.T))) > tol * scale:
        raise ValueError(f"{name} is not symmetric within tolerance {tol}")
    return a


def cholesky(a):
    """Lower-triangular L with L @ L.T == a for symmetric positive-definite a.

    Raises NotPositiveDefinite (naming the failing pivot) when a pivot is
    not strictly positive.
    """
    a = require_symmetric(a, "cholesky input")
    n = a.shape[0]
    low = np.zeros((n, n))
    for j in range(n):
        pivot = a[j, j] - low[j, :j] @ low[j, :j]
        if pivot <= 0.0 or not np.isfinite(pivot):
            raise NotPositiveDefinite(j, pivot)
        low[j, j] = np.sqrt(pivot)
        if j + 1 < n:
            low[j + 1:, j] = (a[j + 1:, j] - low[j + 1:, :j] @ low[j, :j]) / low[j, j]
    return low


def solve_lower(low, b):
    """Solve low @ x = b by forward substitution (low lower-triangular)."""
    b = np.asarray(b, dtype=np.float64)
    vec = b.ndim == 1
    x = b.reshape(-1, 1).copy() if vec else b.copy()
    n = low.shape[0]
    for i in range(n):
        x[i] = (x[i] - low[i, :i] @ x[:i]) / low[i, i]
    return x[:, 0] if vec else x


def solve_lower_t(low, b):
    """Solve low.T @ x = b by back substitution."""
    b = np.asarray(b, dtype=np.float64)
    vec = b.ndim == 1
    x = b.reshape(-1, 1).copy() if vec else b.copy()
    n = low.shape[0]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - low[i + 1:, i] @ x[i + 1:]) / low[i, i]
    return x[:, 0] if vec else x


def cholesky_solve(low, b):
    """Solve (low @ low.T) @ x = b given a Cholesky factor."""
    return solve_lower_t(low, solve_lower(low, b))


def sym_eig(a):
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Returns an EigenPair with eigenvalues sorted descending and orthonormal
    eigenvector columns in matching order.
    """
    a = require_symmetric(a, "sym_eig input")
    n = a.shape[0]
    w = a.copy()
    v = np.eye(n)
    if n == 1:
        return EigenPair(values=w[0, :1].copy(), vectors=v)
    stop = 1e-14 * max(float(np.sqrt(np.sum(a * a))), np.finfo(np.float64).tiny)
    for _ in range(60):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = w[p, q]
                if abs(apq) <= stop:
                    continue
                rotated = True
                theta = (w[q, q] - w[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                col_p = w[:, p].copy()
                col_q = w[:, q].copy()
                w[:, p] = c * col_p - s * col_q
                w[:, q] = s * col_p + c * col_q
                row_p = w[p, :].copy()
                row_q = w[q, :].copy()
                w[p, :] = c * row_p - s * row_q
                w[q, :] = s * row_p + c * row_q
                w[p, q] = 0.0
                w[q, p] = 0.0
                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
        if not rotated:
            break
    else:
        raise RuntimeError("Jacobi eigensolver did not converge in 60 sweeps")
    values = np.diag(w).copy()
    order = np.argsort(values)[::-1]
    return EigenPair(values=values[order], vectors=v[:, order].copy())


def gev_solve(b, w):
    """Generalized eigenvalue solve b @ x = lambda * w @ x for symmetric b
    and symmetric positive-definite w.

    Whitens with the Cholesky factor of w, runs the standard symmetric
    eigensolver, and back-substitutes. The returned eigenvector columns are
    w-orthonormal: vectors.T @ w @ vectors == I.
    """
    b = require_symmetric(b, "gev_solve b")
    w = require_symmetric(w, "gev_solve w")
    if b.shape != w.shape:
        raise ValueError(f"dimension mismatch: b is {b.shape}, w is {w.shape}")
    low = cholesky(w)
    # C = L^-1 b L^-T, symmetric with the same generalized eigenvalues.
    c = solve_lower(low, solve_lower(low, b.T).T)
    c = 0.5 * (c + c.T)
    pair = sym_eig(c)
    vectors = solve_lower_t(low, pair.vectors)
    return EigenPair(values=pair.values, vectors=vectors)


def spectral_norm(a):
    """Largest singular value of a, via power iteration on a.T @ a.

    Deterministic: the start vector comes from a fixed-seed generator.
    Relative tolerance 1e-8 on the squared norm, iteration cap 10 * dim.
    """
    a = as_matrix(a, "spectral_norm input")
    gram = a.T @ a
    n = gram.shape[0]
    v = np.random.default_rng(_POWER_SEED).standard_normal(n)
    norm_v = np.linalg.norm(v)
    if norm_v == 0.0:
        v = np.ones(n)
        norm_v = np.sqrt(n)
    v /= norm_v
    lam = 0.0
    for _ in range(10 * max(a.shape)):
        u = gram @ v
        lam_new = float(np.linalg.norm(u))
        if lam_new == 0.0:
            return 0.0
        v = u / lam_new
        if abs(lam_new - lam) <= POWER_TOL * lam_new:
            lam = lam_new
            break
        lam = lam_new
    return float(np.sqrt(lam))


def orthonormal_columns(a, tol=RANK_TOL):
    """Orthonormal basis for the column space of a.

    Modified Gram-Schmidt with one re-orthogonalization pass; columns whose
    residual drops below tol times their original norm are dependent and
    dropped, so the result can have fewer columns than the input.
    """
    a = as_matrix(a, "orthonormal_columns input")
    rows = a.shape[0]
    basis = np.empty((rows, 0))
    for j in range(a.shape[1]):
        col = a[:, j].copy()
        norm0 = np.linalg.norm(col)
        if norm0 == 0.0:
            continue
        for _ in range(2):
            if basis.shape[1]:
                col -= basis @ (basis.T @ col)
        norm1 = np.linalg.norm(col)
        if norm1 <= tol * norm0:
            continue
        basis = np.hstack([basis, (col / norm1)[:, None]])
    return basis


def principal_angle_cosines(x, y):
    """Cosines of the principal angles between the column spaces of x and y.

    Each input is orthonormalized first (dependent columns dropped), then the
    cosines are the singular values of U.T @ V, clamped to [0, 1] and sorted
    descending. The result length is the smaller effective rank.
    """
    x = as_matrix(x, "principal_angle_cosines x")
    y = as_matrix(y, "principal_angle_cosines y")
    if x.shape[0] != y.shape[0]:
        raise ValueError(
            f"inputs must share ambient dimension: {x.shape[0]} vs {y.shape[0]}"
        )
    u = orthonormal_columns(x)
    v = orthonormal_columns(y)
    if u.shape[1] == 0 or v.shape[1] == 0:
        return np.empty(0)
    cross = u.T @ v
    # Singular values of the cross-Gram via the smaller symmetric Gram matrix.
    if cross.shape[0] <= cross.shape[1]:
        gram = cross @ cross.T
    else:
        gram = cross.T @ cross
    gram = 0.5 * (gram + gram.T)
    eigvals = sym_eig(gram).values
    return np.sqrt(np.clip(eigvals, 0.0, 1.0))
