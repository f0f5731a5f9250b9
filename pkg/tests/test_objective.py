import numpy as np
import pytest

from mvcorr.covariance import CovarianceSet, center_columns, estimate, shrink
from mvcorr.objective import (
    _rho_grads,
    grad_loss,
    loss_and_grad,
    mv_corr,
    shared_subspace,
)


def cov_from_parts(r_b, r_w, nu=0.0, m=2, n=10):
    return CovarianceSet(
        r_w=r_w, r_w_shrunk=shrink(r_w, nu), r_t=r_w + r_b, r_b=r_b, m=m, n=n
    )


def scalar_loss(embeddings, nu):
    """The plain scalar the gradient is checked against."""
    return mv_corr(estimate(embeddings, nu=nu, center=True)).loss


def fd_grads(embeddings, nu, step=1e-5):
    """Central finite differences of scalar_loss, entry by entry."""
    grads = []
    for l in range(len(embeddings)):
        g = np.zeros_like(embeddings[l])
        for idx in np.ndindex(*embeddings[l].shape):
            bumped = [h.copy() for h in embeddings]
            bumped[l][idx] += step
            up = scalar_loss(bumped, nu)
            bumped[l][idx] -= 2 * step
            down = scalar_loss(bumped, nu)
            g[idx] = (up - down) / (2 * step)
        grads.append(g)
    return grads


class TestMvCorr:
    def test_identical_views_is_one(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((5, 20))
        res = mv_corr(estimate([x] * 3, nu=0.0))
        assert res.rho == pytest.approx(1.0, abs=1e-10)
        assert res.loss == pytest.approx(0.0, abs=1e-10)

    def test_identical_views_any_m(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((4, 17))
        for m in (2, 4, 7):
            assert mv_corr(estimate([x] * m, nu=0.0)).rho == pytest.approx(1.0, abs=1e-10)

    def test_zero_between_gives_zero(self):
        cov = cov_from_parts(np.zeros((3, 3)), np.eye(3))
        assert mv_corr(cov).rho == 0.0

    def test_independent_views_small_and_matches_gev(self):
        rng = np.random.default_rng(2)
        views = [rng.standard_normal((8, 1000)) for _ in range(4)]
        cov = estimate(views, nu=0.2)
        res = mv_corr(cov)
        assert res.rho < 0.2
        gev_mean = shared_subspace(cov).values.mean() / (cov.m - 1)
        assert res.rho == pytest.approx(gev_mean, abs=1e-8)

    def test_loss_complements_rho(self):
        rng = np.random.default_rng(3)
        views = [rng.standard_normal((4, 30)) for _ in range(3)]
        res = mv_corr(estimate(views, nu=0.2))
        assert res.loss == pytest.approx(1.0 - res.rho, abs=1e-12)

    def test_not_spd_names_remedy(self):
        cov = cov_from_parts(np.eye(2), np.zeros((2, 2)), nu=0.0)
        with pytest.raises(ValueError, match="nu"):
            mv_corr(cov)

    def test_bounded_above_random_batches(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            m = int(rng.integers(2, 9))
            d = int(rng.integers(2, 17))
            views = [rng.standard_normal((d, 4 * d)) for _ in range(m)]
            for nu in (0.0, 0.2):
                try:
                    res = mv_corr(estimate(views, nu=nu))
                except ValueError:
                    continue  # nu=0 with rank-deficient within-view part
                assert res.rho <= 1.0 + 1e-8


class TestSharedSubspace:
    def test_identity_pair(self):
        cov = cov_from_parts(np.eye(3), np.eye(3))
        np.testing.assert_allclose(shared_subspace(cov).values, np.ones(3))

    def test_diagonal_pair(self):
        cov = cov_from_parts(np.diag([3.0, 0.0]), np.eye(2))
        pair = shared_subspace(cov)
        np.testing.assert_allclose(pair.values, [3.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(np.abs(pair.vectors), np.eye(2), atol=1e-12)

    def test_orthonormal_under_shrunk_metric(self):
        rng = np.random.default_rng(5)
        views = [rng.standard_normal((6, 40)) for _ in range(3)]
        cov = estimate(views, nu=0.2)
        w = shared_subspace(cov).vectors
        np.testing.assert_allclose(w.T @ cov.r_w_shrunk @ w, np.eye(6), atol=1e-8)


class TestGradLoss:
    def test_identical_embeddings_stationary(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal((4, 25))
        grads = grad_loss([x.copy() for _ in range(3)], nu=0.0)
        for g in grads:
            assert np.max(np.abs(g)) < 1e-10

    def test_entry_sums_vanish(self):
        # centering projects out the mean direction of every view
        rng = np.random.default_rng(7)
        views = [rng.standard_normal((3, 15)) for _ in range(4)]
        for g in grad_loss(views, nu=0.2):
            assert abs(g.sum()) < 1e-12

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(8)
        views = [rng.standard_normal((4, 30)) for _ in range(3)]
        analytic = grad_loss(views, nu=0.2)
        numeric = fd_grads(views, nu=0.2)
        scale = max(np.max(np.abs(g)) for g in numeric)
        worst = max(np.max(np.abs(a - f)) for a, f in zip(analytic, numeric))
        assert worst < 1e-5 * scale

    def test_matches_finite_differences_no_shrinkage(self):
        rng = np.random.default_rng(9)
        views = [rng.standard_normal((3, 20)) for _ in range(3)]
        analytic = grad_loss(views, nu=0.0)
        numeric = fd_grads(views, nu=0.0)
        scale = max(np.max(np.abs(g)) for g in numeric)
        worst = max(np.max(np.abs(a - f)) for a, f in zip(analytic, numeric))
        assert worst < 1e-5 * scale

    def test_loss_grad_is_negated_rho_grad(self):
        rng = np.random.default_rng(10)
        views = [rng.standard_normal((3, 12)) for _ in range(3)]
        rho_grads, _ = _rho_grads(views, nu=0.2)
        for gl, gr in zip(grad_loss(views, nu=0.2), rho_grads):
            np.testing.assert_array_equal(gl, -gr)

    def test_loss_and_grad_consistent(self):
        rng = np.random.default_rng(11)
        views = [rng.standard_normal((4, 18)) for _ in range(3)]
        res, grads = loss_and_grad(views, nu=0.2)
        assert res.loss == pytest.approx(scalar_loss(views, nu=0.2), abs=1e-12)
        for a, b in zip(grads, grad_loss(views, nu=0.2)):
            np.testing.assert_array_equal(a, b)

    def test_single_sample_rejected(self):
        with pytest.raises(ValueError):
            grad_loss([np.ones((3, 1)), np.ones((3, 1))], nu=0.2)
