import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mvcorr.covariance import (
    between_view_cov,
    center_columns,
    estimate,
    pairwise_between_cov,
    shrink,
    total_view_cov,
    within_view_cov,
)


def naive_within(views):
    """Independent oracle: elementwise double loop over views and entries."""
    d, n = views[0].shape
    acc = np.zeros((d, d))
    for v in views:
        for i in range(d):
            for j in range(d):
                for t in range(n):
                    acc[i, j] += v[i, t] * v[j, t]
    return acc / len(views)


def random_views(m, d, n, rng, center=True):
    views = [rng.standard_normal((d, n)) for _ in range(m)]
    if center:
        views = [v - v.mean(axis=1, keepdims=True) for v in views]
    return views


class TestCenterColumns:
    def test_constant_matrix(self):
        np.testing.assert_array_equal(center_columns(np.full((3, 4), 2.5)), np.zeros((3, 4)))

    def test_idempotent(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((4, 7))
        once = center_columns(x)
        np.testing.assert_allclose(center_columns(once), once, atol=1e-15)

    def test_hand_example(self):
        out = center_columns(np.array([[1.0, 3.0], [2.0, 6.0]]))
        np.testing.assert_array_equal(out, [[-1.0, 1.0], [-2.0, 2.0]])

    def test_feature_means_vanish(self):
        rng = np.random.default_rng(1)
        out = center_columns(rng.standard_normal((5, 9)) * 100)
        assert np.max(np.abs(out.mean(axis=1))) < 1e-12

    def test_single_sample_rejected(self):
        with pytest.raises(ValueError):
            center_columns(np.ones((3, 1)))


class TestWithinViewCov:
    def test_identical_views_scaling_cancels(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((3, 6))
        for m in (2, 3, 5):
            np.testing.assert_allclose(within_view_cov([x] * m), x @ x.T, atol=1e-12)

    def test_zero_views(self):
        np.testing.assert_array_equal(
            within_view_cov([np.zeros((3, 4))] * 2), np.zeros((3, 3))
        )

    def test_matches_naive_loop(self):
        views = random_views(2, 3, 5, np.random.default_rng(3))
        np.testing.assert_allclose(within_view_cov(views), naive_within(views), atol=1e-12)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            within_view_cov([np.ones((2, 3)), np.ones((3, 2))])

    def test_psd(self):
        views = random_views(3, 4, 10, np.random.default_rng(4))
        vals = np.linalg.eigvalsh(within_view_cov(views))
        assert vals.min() > -1e-12


class TestTotalViewCov:
    def test_single_nonzero_view(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal((3, 5))
        views = [x, np.zeros_like(x), np.zeros_like(x)]
        np.testing.assert_allclose(total_view_cov(views), (x @ x.T) / 3, atol=1e-12)

    def test_identical_views_expand(self):
        # algebra: (1/m)(m X)(m X)^T = m X X^T
        rng = np.random.default_rng(6)
        x = rng.standard_normal((4, 6))
        np.testing.assert_allclose(total_view_cov([x] * 3), 3 * (x @ x.T), atol=1e-10)

    def test_equals_within_plus_pairwise(self):
        views = random_views(3, 4, 8, np.random.default_rng(7))
        expected = within_view_cov(views) + pairwise_between_cov(views)
        np.testing.assert_allclose(total_view_cov(views), expected, atol=1e-10)


class TestBetweenViewCov:
    def test_identical_views(self):
        rng = np.random.default_rng(8)
        x = center_columns(rng.standard_normal((3, 6)))
        cov = estimate([x] * 3, nu=0.0)
        np.testing.assert_allclose(cov.r_b, 2 * (x @ x.T), atol=1e-9)

    def test_independent_views_vanish(self):
        # Monte-Carlo: independent zero-mean views leave almost no between part
        rng = np.random.default_rng(9)
        views = random_views(2, 4, 10000, rng)
        r_w = within_view_cov(views)
        r_b = between_view_cov(total_view_cov(views), r_w)
        assert np.linalg.norm(r_b, 2) / np.linalg.norm(r_w, 2) < 0.1

    def test_symmetric(self):
        views = random_views(4, 5, 12, np.random.default_rng(10))
        r_b = between_view_cov(total_view_cov(views), within_view_cov(views))
        np.testing.assert_allclose(r_b, r_b.T, atol=1e-10)


class TestShrink:
    def test_zero_nu_unchanged(self):
        rng = np.random.default_rng(11)
        g = rng.standard_normal((4, 4))
        r = g @ g.T
        np.testing.assert_array_equal(shrink(r, 0.0), r)

    def test_full_nu_is_scaled_identity(self):
        rng = np.random.default_rng(12)
        g = rng.standard_normal((4, 4))
        r = g @ g.T
        np.testing.assert_allclose(shrink(r, 1.0), (np.trace(r) / 4) * np.eye(4), atol=1e-12)

    def test_identity_fixed_point(self):
        np.testing.assert_allclose(shrink(np.eye(5), 0.2), np.eye(5), atol=1e-15)

    @given(st.floats(min_value=0.0, max_value=1.0), st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_trace_preserved(self, nu, seed):
        rng = np.random.default_rng(seed)
        g = rng.standard_normal((5, 5))
        r = g @ g.T
        assert abs(np.trace(shrink(r, nu)) - np.trace(r)) <= 1e-10 * max(1.0, np.trace(r))

    def test_out_of_range_rejected(self):
        for nu in (-0.1, 1.1):
            with pytest.raises(ValueError):
                shrink(np.eye(3), nu)


class TestIdentityAndInvariants:
    @given(
        st.integers(min_value=2, max_value=8),
        st.integers(min_value=2, max_value=16),
        st.integers(min_value=0, max_value=2**32 - 1),
    )
    @settings(max_examples=60, deadline=None)
    def test_total_covariance_identity(self, m, d, seed):
        rng = np.random.default_rng(seed)
        n = min(4 * d, 64)
        views = random_views(m, d, n, rng)
        direct = pairwise_between_cov(views)
        shortcut = total_view_cov(views) - within_view_cov(views)
        err = np.max(np.abs(shortcut - direct))
        assert err <= 1e-10 * max(np.max(np.abs(direct)), 1.0)

    def test_view_permutation_invariance(self):
        rng = np.random.default_rng(13)
        views = random_views(5, 4, 9, rng)
        permuted = [views[i] for i in (3, 0, 4, 2, 1)]
        for fn in (within_view_cov, total_view_cov):
            a, b = fn(views), fn(permuted)
            np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)

    def test_estimate_contract(self):
        rng = np.random.default_rng(14)
        views = [rng.standard_normal((4, 10)) + 5.0 for _ in range(3)]
        cov = estimate(views, nu=0.2)
        assert cov.m == 3 and cov.n == 10
        np.testing.assert_array_equal(cov.r_b, cov.r_t - cov.r_w)
        for mat in (cov.r_w, cov.r_w_shrunk, cov.r_t, cov.r_b):
            assert np.max(np.abs(mat - mat.T)) <= 1e-10 * max(1.0, np.max(np.abs(mat)))
        # shrunk matrix strictly positive-definite
        assert np.linalg.eigvalsh(cov.r_w_shrunk).min() > 0
