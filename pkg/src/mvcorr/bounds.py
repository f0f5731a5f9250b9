"""Monte-Carlo experiments on the view-subsampling concentration behavior.

A pool is an (n, M, d) tensor: n instances, M available views each, features
of dimension d with unit L2 norm per view vector.

Two subsampling scopes exist. Per-instance scope draws an independent m-view
subset for every instance, exactly like training batches; averaging those
independent draws over n instances washes the covariance deviation down at
the generic Monte-Carlo m^-1/2 rate. Shared scope draws one m-view index set
per trial and reads every instance through it ("pick m of the M cameras"),
which is the single-draw setting the subsampled-covariance bounds describe;
deviations then decay near the m^-1 rate those bounds give. Deviation
experiments therefore default to shared draws without replacement (so m = M
reproduces the pool bit-exactly), while rho-gap experiments default to
per-instance draws with replacement, matching the bootstrapped objective.

Measured per trial: spectral deviations of the subsampled within-view and
total-view covariances from their full-pool counterparts (delta_w, delta_t)
and the subsampled correlation rho_m against the full-pool value. delta_t
never exceeds n * m; both covariances are PSD, so the deviation cannot beat
the larger of their norms, and the subsampled total-view norm is capped by
n * m for unit view vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bootstrap import as_generator
from .covariance import estimate
from .linalg import spectral_norm
from .objective import mv_corr

DEFAULT_M_GRID = (2, 4, 8, 16, 32)
DEFAULT_POOL = dict(n=256, m_views=64, dim=16)

# the tail parameter of the deviation bounds has no computable counterpart;
# it is carried verbatim into reports
T_NOMINAL = 0.0


@dataclass(frozen=True)
class DeviationStats:
    values: np.ndarray
    mean: float
    std: float


@dataclass(frozen=True)
class GridRow:
    m: int
    d: int
    n: int
    trial: int
    delta_w: float
    delta_t: float
    rho_m: float
    rho_full: float


@dataclass(frozen=True)
class GridSummary:
    m_grid: tuple
    mean_delta_w: dict
    mean_delta_t: dict
    slope_delta_w: float
    delta_t_bound_ok: bool
    max_delta_t_ratio: float
    rho_full: float
    rho_gaps: dict
    max_rho: float
    t_nominal: float = T_NOMINAL


def _unit_rows(pool):
    norms = np.linalg.norm(pool, axis=-1, keepdims=True)
    return pool / np.where(norms == 0.0, 1.0, norms)


def make_unit_pool(n, m_views, dim, seed):
    """Pool of independent unit-normalized Gaussian view vectors."""
    rng = as_generator(seed)
    return _unit_rows(rng.standard_normal((int(n), int(m_views), int(dim))))


def make_camera_pool(n, m_views, dim, seed, jitter=0.1):
    """Pool whose view index carries a shared camera direction.

    View l of every instance is the same unit camera vector plus a small
    per-instance jitter. The deviation of a shared m-camera subsample is
    then coherent across instances instead of averaging out, which is the
    regime the covariance concentration rate is about.
    """
    rng = as_generator(seed)
    cameras = _unit_rows(rng.standard_normal((int(m_views), int(dim))))
    noise = jitter * rng.standard_normal((int(n), int(m_views), int(dim)))
    return _unit_rows(cameras[None, :, :] + noise)


def make_shared_signal_pool(n, m_views, dim, seed, signal_fraction=0.3):
    """Synthetic pool whose views share a signal in common coordinates.

    Every view of an instance is sqrt(w) * shared + sqrt(1 - w) * noise,
    z-normalized per feature, so the full-pool correlation is close to the
    signal fraction w. This is the setting where the subsampled correlation
    is a noisy estimate of a meaningfully positive full-pool value.
    """
    rng = as_generator(seed)
    w = float(signal_fraction)
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"signal fraction must lie in [0, 1], got {w}")
    shared = rng.standard_normal((int(n), 1, int(dim)))
    noise = rng.standard_normal((int(n), int(m_views), int(dim)))
    pool = np.sqrt(w) * shared + np.sqrt(1.0 - w) * noise
    pool = pool - pool.mean(axis=0, keepdims=True)
    return pool / pool.std(axis=0, keepdims=True)


def pool_from_measurements(measurements):
    """(n, M, d) pool from a list of per-view (d, n) matrices."""
    return np.stack([v.T for v in measurements], axis=1)


def unit_normalize_rows(pool):
    return _unit_rows(np.asarray(pool, dtype=np.float64))


def subsample_views(pool, m, rng, replace=True, per_instance=True):
    """Draw m views per instance.

    per_instance draws an independent subset for every instance; otherwise
    one index set is drawn and shared by all instances. Without replacement
    the indices are sorted, so m = M returns the pool itself bit-exactly.
    """
    n, total, _ = pool.shape
    m = int(m)
    if m < 1:
        raise ValueError(f"need at least one view, got m={m}")
    if not replace and m > total:
        raise ValueError(f"cannot draw {m} of {total} views without replacement")
    if per_instance:
        if replace:
            idx = rng.integers(0, total, size=(n, m))
        else:
            idx = np.stack([np.sort(rng.permutation(total)[:m]) for _ in range(n)])
        return np.ascontiguousarray(pool[np.arange(n)[:, None], idx, :])
    if replace:
        idx = rng.integers(0, total, size=m)
    else:
        idx = np.sort(rng.permutation(total)[:m])
    # contiguous so reductions see the same memory order as the pool itself
    return np.ascontiguousarray(pool[:, idx, :])


def _within_cov(tensor):
    return np.einsum("nmi,nmj->ij", tensor, tensor) / tensor.shape[1]


def _total_cov(tensor):
    sums = tensor.sum(axis=1)
    return (sums.T @ sums) / tensor.shape[1]


def _check_unit_rows(pool):
    norms = np.linalg.norm(pool, axis=2)
    if np.max(np.abs(norms - 1.0)) > 1e-8:
        raise ValueError("pool rows must be unit-normalized for deviation checks")


def _deviation(pool, m, trials, seed, replace, per_instance, cov_fn):
    pool = np.asarray(pool, dtype=np.float64)
    _check_unit_rows(pool)
    if int(m) > pool.shape[1]:
        raise ValueError(f"m={m} exceeds pool view count {pool.shape[1]}")
    rng = as_generator(seed)
    reference = cov_fn(pool)
    values = np.empty(int(trials))
    for t in range(int(trials)):
        sub = subsample_views(pool, m, rng, replace=replace, per_instance=per_instance)
        values[t] = spectral_norm(cov_fn(sub) - reference)
    return DeviationStats(values=values, mean=float(values.mean()), std=float(values.std()))


def deviation_within(pool, m, trials, seed, replace=False, per_instance=False):
    """Per-trial spectral deviation of the subsampled within-view covariance."""
    return _deviation(pool, m, trials, seed, replace, per_instance, _within_cov)


def deviation_total(pool, m, trials, seed, replace=False, per_instance=False):
    """Per-trial spectral deviation of the subsampled total-view covariance."""
    return _deviation(pool, m, trials, seed, replace, per_instance, _total_cov)


def _rho_of(tensor, nu):
    views = [tensor[:, j, :].T for j in range(tensor.shape[1])]
    return mv_corr(estimate(views, nu=nu, center=True)).rho


def rho_full_pool(pool, nu=0.2):
    return _rho_of(np.asarray(pool, dtype=np.float64), nu)


def rho_gap(pool, m_grid, trials, seed, nu=0.2, replace=True, per_instance=True):
    """Subsampled rho_m per trial for each m, against the full-pool rho.

    Returns (rho_full, {m: per-trial rho_m array}, {m: |mean rho_m - rho_full|}).
    """
    pool = np.asarray(pool, dtype=np.float64)
    rng = as_generator(seed)
    full = rho_full_pool(pool, nu=nu)
    per_m = {}
    gaps = {}
    for m in m_grid:
        m = int(m)
        if m < 2 or m > pool.shape[1]:
            raise ValueError(f"m={m} outside valid range 2..{pool.shape[1]}")
        vals = np.empty(int(trials))
        for t in range(int(trials)):
            sub = subsample_views(pool, m, rng, replace=replace, per_instance=per_instance)
            vals[t] = _rho_of(sub, nu)
        per_m[m] = vals
        gaps[m] = float(abs(vals.mean() - full))
    return full, per_m, gaps


def fit_loglog_slope(ms, means):
    """Least-squares slope of log(mean) against log(m)."""
    x = np.log(np.asarray(ms, dtype=float))
    y = np.log(np.asarray(means, dtype=float))
    x = x - x.mean()
    return float((x @ (y - y.mean())) / (x @ x))


def gap_confidence(rho_a, rho_b, rho_full, n_boot=2000, seed=0):
    """Bootstrap fraction of resamples where |mean rho_a - rho_full| exceeds
    |mean rho_b - rho_full|: the confidence that the a-gap is the larger one."""
    rng = as_generator(seed)
    rho_a = np.asarray(rho_a, dtype=float)
    rho_b = np.asarray(rho_b, dtype=float)
    wins = 0
    for _ in range(int(n_boot)):
        ga = abs(rho_a[rng.integers(0, rho_a.size, rho_a.size)].mean() - rho_full)
        gb = abs(rho_b[rng.integers(0, rho_b.size, rho_b.size)].mean() - rho_full)
        if ga > gb:
            wins += 1
    return wins / int(n_boot)


def run_grid(pool, m_grid=DEFAULT_M_GRID, trials=50, seed=0, nu=0.2,
             replace=False, per_instance=False):
    """One subsample per (m, trial) scored on all measures at once.

    Returns the per-trial rows plus a summary holding the fitted delta_w
    slope, the hard delta_t <= n*m check, and the rho gaps per m.
    """
    pool = np.asarray(pool, dtype=np.float64)
    _check_unit_rows(pool)
    n, total, d = pool.shape
    rng = as_generator(seed)
    sigma_w = _within_cov(pool)
    sigma_t = _total_cov(pool)
    full = rho_full_pool(pool, nu=nu)
    rows = []
    mean_dw = {}
    mean_dt = {}
    gaps = {}
    max_ratio = 0.0
    max_rho = -np.inf
    for m in m_grid:
        m = int(m)
        if m < 2 or m > total:
            raise ValueError(f"m={m} outside valid range 2..{total}")
        dw = np.empty(int(trials))
        dt = np.empty(int(trials))
        rhos = np.empty(int(trials))
        for t in range(int(trials)):
            sub = subsample_views(pool, m, rng, replace=replace, per_instance=per_instance)
            dw[t] = spectral_norm(_within_cov(sub) - sigma_w)
            dt[t] = spectral_norm(_total_cov(sub) - sigma_t)
            rhos[t] = _rho_of(sub, nu)
            rows.append(
                GridRow(
                    m=m, d=d, n=n, trial=t,
                    delta_w=float(dw[t]), delta_t=float(dt[t]),
                    rho_m=float(rhos[t]), rho_full=full,
                )
            )
        mean_dw[m] = float(dw.mean())
        mean_dt[m] = float(dt.mean())
        gaps[m] = float(abs(rhos.mean() - full))
        max_ratio = max(max_ratio, float(dt.max()) / (n * m))
        max_rho = max(max_rho, float(rhos.max()))
    ms = sorted(mean_dw)
    summary = GridSummary(
        m_grid=tuple(int(m) for m in m_grid),
        mean_delta_w=mean_dw,
        mean_delta_t=mean_dt,
        slope_delta_w=fit_loglog_slope(ms, [mean_dw[m] for m in ms]),
        delta_t_bound_ok=max_ratio <= 1.0,
        max_delta_t_ratio=max_ratio,
        rho_full=full,
        rho_gaps=gaps,
        max_rho=max_rho,
    )
    return rows, summary


def default_grid_pool(seed=3):
    """The camera-structured pool the default deviation grid runs on."""
    return make_camera_pool(seed=seed, **DEFAULT_POOL)
