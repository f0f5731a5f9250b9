"""Multi-view correlation shared-subspace learning with view bootstrapping.

Batch covariance estimation for many parallel views, the bounded trace-ratio
correlation objective with analytic gradients, small sigmoid sub-networks
trained by SGD, synthetic multi-view data with a known number of shared
components, subspace-affinity and clustering/matching metrics, and
Monte-Carlo checks of the subsampling concentration behavior.
"""

from .bootstrap import (
    MultiViewDataset,
    ViewBatch,
    batch_size_for,
    max_subnetworks,
    sample_batch,
)
from .covariance import (
    CovarianceSet,
    between_view_cov,
    center_columns,
    estimate,
    shrink,
    total_view_cov,
    within_view_cov,
)
from .linalg import (
    EigenPair,
    NotPositiveDefinite,
    cholesky,
    gev_solve,
    principal_angle_cosines,
    spectral_norm,
    sym_eig,
)
from .metrics import (
    AffinityReport,
    ClusterEval,
    affinity,
    hungarian_accuracy,
    inter_set_affinity,
    kmeans,
    nn_match,
    reconstruction_affinity,
)
from .network import (
    MultiViewModel,
    SubNetwork,
    TrainConfig,
    embed,
    forward,
    init_model,
    load_model,
    save_model,
    train,
)
from .objective import MvCorrResult, grad_loss, mv_corr, shared_subspace
from .synthdata import SynthParams, SyntheticDataset, generate, to_multiview_dataset

__version__ = "0.1.0"

__all__ = [
    "AffinityReport",
    "ClusterEval",
    "CovarianceSet",
    "EigenPair",
    "MultiViewDataset",
    "MultiViewModel",
    "MvCorrResult",
    "NotPositiveDefinite",
    "SubNetwork",
    "SynthParams",
    "SyntheticDataset",
    "TrainConfig",
    "ViewBatch",
    "affinity",
    "batch_size_for",
    "between_view_cov",
    "center_columns",
    "cholesky",
    "embed",
    "estimate",
    "forward",
    "generate",
    "gev_solve",
    "grad_loss",
    "hungarian_accuracy",
    "init_model",
    "inter_set_affinity",
    "kmeans",
    "load_model",
    "max_subnetworks",
    "mv_corr",
    "nn_match",
    "principal_angle_cosines",
    "reconstruction_affinity",
    "sample_batch",
    "save_model",
    "shared_subspace",
    "shrink",
    "spectral_norm",
    "sym_eig",
    "to_multiview_dataset",
    "total_view_cov",
    "train",
    "within_view_cov",
]
