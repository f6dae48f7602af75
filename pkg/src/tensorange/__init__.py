"""Certified bounds on real quadratic forms optimized over unit product vectors."""

__version__ = "0.1.0"

from .applications import (
    CertificateReport,
    StudyResult,
    certify_entanglement_witness,
    certify_positive_map,
    certify_rank_one_avoiding,
    random_subspace_study,
)
from .eigen import ConvergenceWarning, EigenPair, SolverConfig, eigenvalue_interval, extreme_eigenpair
from .numrange import (
    BoundReport,
    DiagonalBound,
    SearchConfig,
    SupportEvaluation,
    bound,
    boundary,
    support_point,
    trivial_bounds,
    w_diag_angle,
    w_diag_scaled,
    w_diag_ternary,
    w_joint_diag,
)
from .oracle import ProductVector, alternating_ascent, grid_mu_2x2, sample_mu
from .tensor import (
    MapBlocks,
    choi_from_blocks,
    full_symmetrize,
    generalized_choi_map,
    kraus_map,
    partial_symmetrize,
    partial_transpose,
    projector_onto_subspace,
    symmetrize,
    unvec,
    vec,
)
from .validation import DimensionMismatchError, NotSymmetricError, SubsystemSet, TensorShape

__all__ = [
    "BoundReport", "CertificateReport", "ConvergenceWarning", "DiagonalBound",
    "DimensionMismatchError", "EigenPair", "MapBlocks", "NotSymmetricError", "ProductVector",
    "SearchConfig", "SolverConfig", "StudyResult", "SubsystemSet", "SupportEvaluation",
    "TensorShape", "alternating_ascent", "bound", "boundary", "certify_entanglement_witness",
    "certify_positive_map", "certify_rank_one_avoiding", "choi_from_blocks", "eigenvalue_interval",
    "extreme_eigenpair", "full_symmetrize", "generalized_choi_map", "grid_mu_2x2", "kraus_map",
    "partial_symmetrize", "partial_transpose", "projector_onto_subspace", "random_subspace_study",
    "sample_mu", "support_point", "symmetrize", "trivial_bounds", "unvec", "vec", "w_diag_angle",
    "w_diag_scaled", "w_diag_ternary", "w_joint_diag",
]
