import numpy as np
import pytest

from mvcorr.linalg import orthonormal_columns, principal_angle_cosines
from mvcorr.synthdata import (
    SynthParams,
    _mixing_matrix,
    generate,
    to_multiview_dataset,
)


def small_params(**over):
    base = dict(n=200, dim=16, k=4, m_views=3, alpha=0.5, beta=0.7, seed=5)
    base.update(over)
    return SynthParams(**base)


class TestGenerate:
    def test_pure_signal_when_beta_one(self):
        ds = generate(small_params(beta=1.0, alpha=0.0))
        for y, xs in zip(ds.measurements, ds.signal_ground_truth):
            np.testing.assert_allclose(y, xs, atol=1e-12)

    def test_same_seed_bit_identical(self):
        a = generate(small_params())
        b = generate(small_params())
        for x, y in zip(a.measurements, b.measurements):
            np.testing.assert_array_equal(x, y)
        np.testing.assert_array_equal(a.source_signal, b.source_signal)

    def test_different_seed_differs(self):
        a = generate(small_params(seed=1))
        b = generate(small_params(seed=2))
        assert np.max(np.abs(a.measurements[0] - b.measurements[0])) > 0

    def test_round_robin_labels(self):
        ds = generate(small_params(n=9, classes=3))
        np.testing.assert_array_equal(ds.class_labels, [0, 1, 2, 0, 1, 2, 0, 1, 2])

    def test_measurements_z_normalized(self):
        ds = generate(small_params(n=500))
        for y in ds.measurements:
            assert np.max(np.abs(y.mean(axis=1))) < 1e-10
            np.testing.assert_allclose(y.var(axis=1), 1.0, atol=1e-6)

    def test_shared_signal_across_views(self):
        # with no view noise the mapped signals of any two views span the
        # same sample-space subspace: the one shared signal
        ds = generate(small_params(noise_sigma=0.0, n=300))
        for other in ds.signal_ground_truth[1:]:
            cos = principal_angle_cosines(ds.signal_ground_truth[0].T, other.T)
            np.testing.assert_allclose(cos, np.ones(len(cos)), atol=1e-8)

    def test_signal_matches_source_subspace(self):
        ds = generate(small_params(noise_sigma=0.0, n=300))
        centered_source = ds.source_signal - ds.source_signal.mean(axis=1, keepdims=True)
        cos = principal_angle_cosines(ds.signal_ground_truth[0].T, centered_source.T)
        np.testing.assert_allclose(cos, np.ones(len(cos)), atol=1e-8)

    def test_shapes(self):
        ds = generate(small_params())
        assert len(ds.measurements) == 3
        for y in ds.measurements:
            assert y.shape == (16, 200)
        assert ds.source_signal.shape == (4, 200)

    def test_invalid_params_rejected(self):
        with pytest.raises(ValueError):
            generate(small_params(k=16))  # k must stay below dim
        with pytest.raises(ValueError):
            generate(small_params(m_views=1))
        with pytest.raises(ValueError):
            generate(small_params(beta=1.5))


class TestMixingMatrix:
    def test_orthonormal_columns(self):
        rng = np.random.default_rng(0)
        a = _mixing_matrix(rng, 12, 5)
        basis = a / np.linalg.norm(a, axis=0, keepdims=True)
        np.testing.assert_allclose(basis.T @ basis, np.eye(5), atol=1e-10)

    def test_generate_uses_orthonormal_mixers(self):
        # indirect: regenerate the first signal mixer from the same stream
        params = small_params()
        rng = np.random.default_rng(params.seed)
        rng.standard_normal((params.k, params.n))  # skip source draw
        q = orthonormal_columns(rng.standard_normal((params.dim, params.k)))
        np.testing.assert_allclose(q.T @ q, np.eye(params.k), atol=1e-10)


class TestToMultiViewDataset:
    def test_view_count(self):
        data = to_multiview_dataset(generate(small_params(m_views=4)))
        for inst in data.views:
            assert inst.shape == (4, 16)

    def test_round_trip_bit_exact(self):
        ds = generate(small_params())
        data = to_multiview_dataset(ds)
        for l, view_mat in enumerate(ds.measurements):
            for i in range(ds.params.n):
                np.testing.assert_array_equal(data.views[i][l], view_mat[:, i])

    def test_labels_preserved(self):
        ds = generate(small_params(n=9, classes=3))
        data = to_multiview_dataset(ds)
        assert data.instance_ids == [0, 1, 2, 0, 1, 2, 0, 1, 2]
