"""Functional principal component analysis for metric-space-valued curves.

The pipeline: estimate the metric auto-covariance surface of a sample of
object-valued trajectories with a pairwise-distance U-statistic,
eigendecompose it under quadrature weights, and summarize each
trajectory by Frechet scores (projections of its distance-to-mean
curve) and by object principal components (Frechet integrals against
the normalized eigenfunctions, which live in the object space itself).
"""

from .eigen import EigenSystem, eigendecompose, explained_fraction, reconstruct
from .errors import (
    BadRank,
    BadWeights,
    DegenerateSpectrum,
    DegenerateVariance,
    EmptyInput,
    InvalidObject,
    InvalidSurface,
    NonIntegrableEigenfunction,
    OfpcaError,
    SchemaError,
    SpaceMismatch,
    TooFewTrajectories,
)
from .fpca import (
    FpcaFit,
    distance_curves,
    fit_fpca,
    frechet_mean_trajectory,
    frechet_scores,
    normalize_eigenfunction,
    object_fpc,
    riemann_sum_minimizer,
)
from .kernel import (
    KernelSurface,
    ObjectSample,
    ObjectTrajectory,
    distance_cov_surface,
    estimate_cov_surface,
    metric_correlation,
    metric_covariance,
    metric_variance,
    pair_kernel,
    total_variance,
    trapezoid_weights,
)
from .sim import (
    DistributionSimConfig,
    NetworkSimConfig,
    SimulationTruth,
    distribution_sim_basis,
    jacobi_polynomial,
    mise_report,
    network_population_eigenvalue,
    network_sim_basis,
    simulate,
    simulate_distributions,
    simulate_networks,
)
from .spaces import (
    ObjectPoint,
    SpaceKind,
    adjacency_space,
    distance,
    isotonic_projection,
    project,
    quantile_space,
    scalar_space,
    squared_distance,
    sympsd_space,
    weighted_barycenter,
)

__version__ = "0.1.0"

__all__ = [
    "BadRank",
    "BadWeights",
    "DegenerateSpectrum",
    "DegenerateVariance",
    "DistributionSimConfig",
    "EigenSystem",
    "EmptyInput",
    "FpcaFit",
    "InvalidObject",
    "InvalidSurface",
    "KernelSurface",
    "NetworkSimConfig",
    "NonIntegrableEigenfunction",
    "ObjectPoint",
    "ObjectSample",
    "ObjectTrajectory",
    "OfpcaError",
    "SchemaError",
    "SimulationTruth",
    "SpaceKind",
    "SpaceMismatch",
    "TooFewTrajectories",
    "adjacency_space",
    "distance",
    "distance_cov_surface",
    "distance_curves",
    "distribution_sim_basis",
    "eigendecompose",
    "estimate_cov_surface",
    "explained_fraction",
    "fit_fpca",
    "frechet_mean_trajectory",
    "frechet_scores",
    "isotonic_projection",
    "jacobi_polynomial",
    "metric_correlation",
    "metric_covariance",
    "metric_variance",
    "mise_report",
    "network_population_eigenvalue",
    "network_sim_basis",
    "normalize_eigenfunction",
    "object_fpc",
    "pair_kernel",
    "project",
    "quantile_space",
    "reconstruct",
    "riemann_sum_minimizer",
    "scalar_space",
    "simulate",
    "simulate_distributions",
    "simulate_networks",
    "squared_distance",
    "sympsd_space",
    "total_variance",
    "trapezoid_weights",
    "weighted_barycenter",
]
