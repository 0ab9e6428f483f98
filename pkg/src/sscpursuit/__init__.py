"""Sparse subspace clustering via greedy pursuits.

Points drawn from a union of low-dimensional linear subspaces are clustered
by sparsely representing each point in terms of all the others (with OMP or
MP), building the symmetrized affinity graph of coefficient magnitudes, and
applying normalized spectral clustering. The package also ships the
matching synthetic data model, performance metrics, closed-form guarantee
evaluators, and a CLI harness for the benchmark sweeps.
"""

__version__ = "0.1.0"

from .datamodel import (
    DataSet,
    SubspaceArrangement,
    SyntheticConfig,
    affinity,
    generate_points,
    normalize_columns,
    principal_angles,
    sample_arrangement_common_core,
    sample_arrangement_random,
    sample_arrangement_shared_intersection,
)
from .estimators import SparseSubspaceClusteringMP, SparseSubspaceClusteringOMP
from .graph import (
    build_adjacency,
    check_nfc,
    coefficient_matrix,
    connected_components,
    estimate_num_clusters_eigengap,
)
from .metrics import MetricsReport, clustering_error, evaluate_run, l1_norms, tp_fp_counts
from .numerics import RngStream
from .pursuit import (
    Method,
    PursuitConfig,
    PursuitResult,
    StopReason,
    mp_represent,
    omp_represent,
    represent_all,
)
from .spectral import SpectralConfig, normalized_spectral_clustering

__all__ = [
    "DataSet",
    "Method",
    "MetricsReport",
    "PursuitConfig",
    "PursuitResult",
    "RngStream",
    "SparseSubspaceClusteringMP",
    "SparseSubspaceClusteringOMP",
    "SpectralConfig",
    "StopReason",
    "SubspaceArrangement",
    "SyntheticConfig",
    "affinity",
    "build_adjacency",
    "check_nfc",
    "clustering_error",
    "coefficient_matrix",
    "connected_components",
    "estimate_num_clusters_eigengap",
    "evaluate_run",
    "generate_points",
    "l1_norms",
    "mp_represent",
    "normalize_columns",
    "normalized_spectral_clustering",
    "omp_represent",
    "principal_angles",
    "represent_all",
    "sample_arrangement_common_core",
    "sample_arrangement_random",
    "sample_arrangement_shared_intersection",
    "tp_fp_counts",
]
