"""View-agnostic bootstrap sampling of views, and the sub-network budget rules.

A batch draws n instances with replacement and, for each instance, m of its
views with replacement. Slot order is the draw order: the batch tensor
carries no view identity, which is what makes training view-agnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class MultiViewDataset:
    """Instances with a variable number of views each.

    views[i] is an (n_views_i, dim) array; all feature vectors share dim.
    instance_ids carry the class/instance label of each instance.
    """

    instance_ids: list
    views: list

    def __post_init__(self):
        if len(self.instance_ids) != len(self.views):
            raise ValueError("instance_ids and views must have equal length")
        if not self.views:
            raise ValueError("dataset is empty")
        self.views = [np.atleast_2d(np.asarray(v, dtype=np.float64)) for v in self.views]
        dim = self.views[0].shape[1]
        for i, v in enumerate(self.views):
            if v.shape[0] < 1:
                raise ValueError(f"instance {i} has no views")
            if v.shape[1] != dim:
                raise ValueError(
                    f"instance {i} has feature dimension {v.shape[1]}, expected {dim}"
                )

    def __len__(self):
        return len(self.views)

    @property
    def dim(self):
        return self.views[0].shape[1]


@dataclass(frozen=True)
class ViewBatch:
    """One training batch: tensor of shape (n, m, dim) plus instance ids."""

    tensor: np.ndarray
    instance_ids: list


def as_generator(rng):
    """Accept an int seed or a Generator; always return a Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def batch_size_for(d):
    """Batch size ceil(d * ln d) for a d-dimensional embedding."""
    d = int(d)
    if d < 2:
        raise ValueError(f"embedding dimension must be >= 2, got {d}")
    return math.ceil(d * math.log(d))


def max_subnetworks(d, mode="theoretical"):
    """Upper bound on the number of views to subsample for embedding size d.

    theoretical: floor(sqrt(d)); practical: max(2, round(d ** 0.4)), which
    works better in practice and never exceeds the theoretical bound.
    """
    d = int(d)
    if d < 4:
        raise ValueError(f"embedding dimension must be >= 4, got {d}")
    if mode == "theoretical":
        return int(math.floor(math.sqrt(d)))
    if mode == "practical":
        return max(2, round(d ** 0.4))
    raise ValueError(f"mode must be 'theoretical' or 'practical', got {mode!r}")


def sample_batch(data, m, n, rng):
    """Draw a view-agnostic batch: n instances, m views each, with replacement.

    Slot assignment is the draw order; no sorting by view identity happens,
    so the tensor contains no trace of which original view filled a slot.
    Deterministic given the generator state.
    """
    m = int(m)
    n = int(n)
    if m < 2:
        raise ValueError(f"views per instance must be >= 2, got {m}")
    if n < 1:
        raise ValueError(f"batch size must be >= 1, got {n}")
    if len(data) == 0:
        raise ValueError("dataset is empty")
    gen = as_generator(rng)
    chosen = gen.integers(0, len(data), size=n)
    tensor = np.empty((n, m, data.dim))
    ids = []
    for row, idx in enumerate(chosen):
        inst_views = data.views[idx]
        draws = gen.integers(0, inst_views.shape[0], size=m)
        tensor[row] = inst_views[draws]
        ids.append(data.instance_ids[idx])
    return ViewBatch(tensor=tensor, instance_ids=ids)
