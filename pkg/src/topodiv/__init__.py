"""Topology-aware comparison of point cloud representations."""

from .datasets import DatasetSpec, generate, load_csv, save_csv
from .errors import SingularityError, TopodivError, ValidationError
from .geometry import INF, DistanceMatrix, PointCloud, combine_max, combine_min, pairwise_distances
from .grad import GradientField, rtd_subgradient, smooth_gradients
from .metrics import (
    EvalReport,
    bottleneck_distance,
    bottleneck_norm,
    evaluate,
    linear_correlation,
    topoae_loss,
    triplet_accuracy,
    wasserstein_distance,
    wasserstein_h0,
    wasserstein_h1,
)
from .model import (
    EpochStats,
    MlpParams,
    TrainConfig,
    forward,
    init_params,
    load_checkpoint,
    save_checkpoint,
    train,
)
from .optimize import OptimizerConfig, format_trace_csv, minimize_rtd
from .persistence import Bar, FilteredSimplex, build_filtration, compute_barcode, total_persistence
from .plot import barcode_svg, scatter_svg
from .rcross import assemble_cross_matrix, rcross_barcode, rcross_barcode_matrices, rtd, rtd_k

__version__ = "0.1.0"

__all__ = [
    "INF",
    "Bar",
    "DatasetSpec",
    "DistanceMatrix",
    "EpochStats",
    "EvalReport",
    "FilteredSimplex",
    "GradientField",
    "MlpParams",
    "OptimizerConfig",
    "PointCloud",
    "SingularityError",
    "TopodivError",
    "TrainConfig",
    "ValidationError",
    "assemble_cross_matrix",
    "barcode_svg",
    "bottleneck_distance",
    "bottleneck_norm",
    "build_filtration",
    "combine_max",
    "combine_min",
    "compute_barcode",
    "evaluate",
    "format_trace_csv",
    "forward",
    "generate",
    "init_params",
    "linear_correlation",
    "load_checkpoint",
    "load_csv",
    "minimize_rtd",
    "pairwise_distances",
    "rcross_barcode",
    "rcross_barcode_matrices",
    "rtd",
    "rtd_k",
    "rtd_subgradient",
    "save_checkpoint",
    "scatter_svg",
    "save_csv",
    "smooth_gradients",
    "topoae_loss",
    "total_persistence",
    "train",
    "triplet_accuracy",
    "wasserstein_distance",
    "wasserstein_h0",
    "wasserstein_h1",
    "__version__",
]
