import math

import numpy as np
import pytest

from mvcorr.bootstrap import (
    MultiViewDataset,
    batch_size_for,
    max_subnetworks,
    sample_batch,
)


def dataset_with_views(view_lists):
    return MultiViewDataset(
        instance_ids=list(range(len(view_lists))),
        views=[np.asarray(v, dtype=float) for v in view_lists],
    )


class TestBatchSizeFor:
    # frozen from ceil(d * ln d): 64*4.15888=266.17, 16*2.77259=44.36, 2*0.69315=1.39
    @pytest.mark.parametrize("d,expected", [(64, 267), (16, 45), (2, 2)])
    def test_values(self, d, expected):
        assert batch_size_for(d) == expected

    def test_matches_rule(self):
        for d in range(2, 300):
            assert batch_size_for(d) == math.ceil(d * math.log(d))

    def test_too_small_rejected(self):
        with pytest.raises(ValueError):
            batch_size_for(1)


class TestMaxSubnetworks:
    def test_theoretical_64(self):
        assert max_subnetworks(64, "theoretical") == 8

    def test_theoretical_40(self):
        assert max_subnetworks(40, "theoretical") == 6

    def test_practical_64(self):
        # 64**0.4 = 5.278 -> 5
        assert max_subnetworks(64, "practical") == 5

    def test_practical_never_exceeds_theoretical(self):
        for d in (4, 5):
            assert max_subnetworks(d, "practical") <= max_subnetworks(d, "theoretical")
        for d in range(6, 257):
            assert max_subnetworks(d, "practical") <= max_subnetworks(d, "theoretical")

    def test_bad_mode_rejected(self):
        with pytest.raises(ValueError):
            max_subnetworks(16, "exact")


class TestSampleBatch:
    def test_single_view_repeated(self):
        data = dataset_with_views([[[1.0, 2.0, 3.0]]])
        batch = sample_batch(data, m=4, n=2, rng=0)
        assert batch.tensor.shape == (2, 4, 3)
        for row in batch.tensor:
            np.testing.assert_array_equal(row, np.tile([1.0, 2.0, 3.0], (4, 1)))

    def test_same_seed_same_batch(self):
        rng = np.random.default_rng(7)
        views = [rng.standard_normal((5, 3)) for _ in range(4)]
        data = dataset_with_views(views)
        a = sample_batch(data, m=3, n=8, rng=42)
        b = sample_batch(data, m=3, n=8, rng=42)
        np.testing.assert_array_equal(a.tensor, b.tensor)
        assert a.instance_ids == b.instance_ids

    def test_uniform_view_frequencies(self):
        # multinomial concentration: each of 10 views drawn w.p. 0.1
        data = dataset_with_views([[[float(i)] for i in range(10)]])
        batch = sample_batch(data, m=5, n=20_000, rng=123)
        draws = batch.tensor.reshape(-1).astype(int)
        n_draws = draws.size
        freqs = np.bincount(draws, minlength=10) / n_draws
        sigma = math.sqrt(0.1 * 0.9 / n_draws)
        assert np.all(np.abs(freqs - 0.1) < 3 * sigma)

    def test_view_agnostic_relabeling(self):
        # permuting views inside an instance relabels draws pointwise
        views = [[float(i)] for i in range(6)]
        perm = [4, 2, 0, 5, 1, 3]
        data = dataset_with_views([views])
        data_perm = dataset_with_views([[views[p] for p in perm]])
        a = sample_batch(data, m=4, n=50, rng=9)
        b = sample_batch(data_perm, m=4, n=50, rng=9)
        drawn_orig = a.tensor[..., 0].astype(int)
        drawn_perm = b.tensor[..., 0].astype(int)
        np.testing.assert_array_equal(drawn_perm, np.asarray(perm)[drawn_orig])

    def test_m_below_two_rejected(self):
        data = dataset_with_views([[[1.0]]])
        with pytest.raises(ValueError):
            sample_batch(data, m=1, n=4, rng=0)

    def test_instance_ids_carried(self):
        data = MultiViewDataset(instance_ids=["a", "b"], views=[np.ones((2, 3)), np.zeros((1, 3))])
        batch = sample_batch(data, m=2, n=5, rng=1)
        assert set(batch.instance_ids) <= {"a", "b"}


class TestMultiViewDataset:
    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            MultiViewDataset(instance_ids=[], views=[])

    def test_dim_mismatch_rejected(self):
        with pytest.raises(ValueError):
            MultiViewDataset(instance_ids=[0, 1], views=[np.ones((1, 3)), np.ones((1, 4))])

    def test_len_and_dim(self):
        data = dataset_with_views([[[1.0, 2.0]], [[3.0, 4.0], [5.0, 6.0]]])
        assert len(data) == 2
        assert data.dim == 2
