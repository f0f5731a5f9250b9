"""Synthetic multi-view data with a known number of shared signal components.

Each sample carries one K-dimensional signal vector shared by all views.
Per view, the signal and an independent noise vector are mapped into the
D-dimensional measurement space through orthonormal-column mixing matrices
with log-normal spectra, z-normalized per feature, then combined: the noise
part is first spatially mixed with a cyclic partner view (which correlates
noise between views) and the final measurement is the beta-weighted sum of
signal and noise parts, z-normalized again.

A class-conditional extension draws, per class, an independent signal mixing
set and a signal-space prototype the class's signals vary around, assigning
samples to classes round-robin; classes=1 reproduces the plain protocol.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bootstrap import MultiViewDataset
from .linalg import orthonormal_columns


@dataclass(frozen=True)
class SynthParams:
    n: int
    dim: int
    k: int
    m_views: int
    alpha: float = 0.5
    beta: float = 0.7
    classes: int = 1
    class_sep: float = 1.0  # scale of each class's signal-space prototype
    noise_sigma: float = 0.1  # view-specific additive noise scale, free constant
    seed: int = 0

    def validate(self):
        if self.n < 2:
            raise ValueError(f"need at least 2 samples, got {self.n}")
        if self.k >= self.dim:
            raise ValueError(
                f"signal components must be fewer than the measurement "
                f"dimension: k={self.k}, dim={self.dim}"
            )
        if self.k < 1:
            raise ValueError(f"need at least 1 signal component, got {self.k}")
        if self.m_views < 2:
            raise ValueError(f"need at least 2 views, got {self.m_views}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        if self.classes < 1:
            raise ValueError(f"need at least 1 class, got {self.classes}")
        if self.classes > self.n:
            raise ValueError("more classes than samples")
        if self.class_sep < 0.0:
            raise ValueError(f"class separation must be >= 0, got {self.class_sep}")


@dataclass
class SyntheticDataset:
    """Generated measurements plus the ground truth behind them.

    measurements and signal_ground_truth are per-view (dim, n) matrices;
    signal_ground_truth holds the z-normalized mapped signal before any
    noise mixing. source_signal is the raw shared (k, n) signal.
    """

    measurements: list
    signal_ground_truth: list
    source_signal: np.ndarray
    class_labels: np.ndarray
    params: SynthParams = field(repr=False)


def _znorm(x):
    """Zero mean, unit variance per feature (row); constant rows stay zero."""
    centered = x - x.mean(axis=1, keepdims=True)
    std = centered.std(axis=1, keepdims=True)
    std[std == 0.0] = 1.0
    return centered / std


def _mixing_matrix(rng, rows, cols):
    """Orthonormal columns scaled by a log-normal spectrum."""
    basis = orthonormal_columns(rng.standard_normal((rows, cols)))
    if basis.shape[1] != cols:
        raise RuntimeError("random basis unexpectedly rank-deficient")
    spectrum = np.exp(rng.standard_normal(cols))
    return basis * spectrum


def generate(params):
    """Generate a SyntheticDataset; bit-identical for identical params."""
    params.validate()
    rng = np.random.default_rng(params.seed)
    n, dim, k, m = params.n, params.dim, params.k, params.m_views

    source = rng.standard_normal((k, n))  # one signal per sample, all views
    labels = np.arange(n) % params.classes
    if params.classes > 1:
        # each class's signal varies around its own prototype; without the
        # offset the class clouds all center at the origin and no centroid
        # method can tell them apart
        prototypes = params.class_sep * rng.standard_normal((params.classes, k))
        source = source + prototypes[labels].T
    signal_mix = [
        [_mixing_matrix(rng, dim, k) for _ in range(m)] for _ in range(params.classes)
    ]
    noise_mix = [_mixing_matrix(rng, dim, dim) for _ in range(m)]

    noise_parts = []
    for l in range(m):
        noise_parts.append(_znorm(noise_mix[l] @ rng.standard_normal((dim, n))))

    signal_parts = []
    for l in range(m):
        eta = params.noise_sigma * rng.standard_normal((dim, n))
        mapped = np.empty((dim, n))
        for c in range(params.classes):
            cols = labels == c
            mapped[:, cols] = signal_mix[c][l] @ source[:, cols]
        signal_parts.append(_znorm(mapped + eta))

    measurements = []
    for l in range(m):
        partner = (l + 1) % m  # fixed cyclic partner correlates noise across views
        mixed_noise = params.alpha * noise_parts[l] + (1.0 - params.alpha) * noise_parts[partner]
        y = params.beta * signal_parts[l] + (1.0 - params.beta) * mixed_noise
        measurements.append(_znorm(y))

    return SyntheticDataset(
        measurements=measurements,
        signal_ground_truth=signal_parts,
        source_signal=source,
        class_labels=labels,
        params=params,
    )


def to_multiview_dataset(dataset):
    """Repack a SyntheticDataset as instances with m_views views each."""
    m = dataset.params.m_views
    n = dataset.params.n
    stacked = np.stack([v.T for v in dataset.measurements], axis=1)  # (n, m, dim)
    return MultiViewDataset(
        instance_ids=[int(c) for c in dataset.class_labels],
        views=[stacked[i] for i in range(n)],
    )
