"""Frechet mean curves, object principal components, and Frechet scores.

The object principal component of a trajectory along a direction phi is
the Frechet integral: the object minimizing the phi-weighted integral
of squared distances to the trajectory.  In the convex spaces provided
here that minimizer is computed exactly as the signed-weight barycenter
of the trajectory's objects; :func:`riemann_sum_minimizer` is the
metric-agnostic fallback that searches an explicit candidate set and
doubles as the independent check of the closed-form path.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .eigen import EigenSystem, eigendecompose
from .errors import BadWeights, EmptyInput, NonIntegrableEigenfunction
from .kernel import (
    KernelSurface,
    ObjectSample,
    ObjectTrajectory,
    estimate_cov_surface,
    trapezoid_weights,
)
from .spaces import ObjectPoint, cross_squared_distances, project_coordinates

#: Minimum absolute eigenfunction integral for object components; below
#: this the normalized direction is numerically undefined.
MIN_EIGENFUNCTION_INTEGRAL = 1e-6


def frechet_mean_trajectory(sample: ObjectSample) -> ObjectTrajectory:
    """Pointwise Frechet mean curve of a sample.

    At each grid time this is the uniform-weight barycenter of the
    sample slice: the coordinatewise average followed by metric
    projection (a no-op for convex combinations up to rounding).
    """
    avg = sample.stacked_values.mean(axis=0)
    projected = np.stack(
        [project_coordinates(sample.space, avg[k]) for k in range(avg.shape[0])]
    )
    return ObjectTrajectory(sample.space, sample.time_grid, projected)


def normalize_eigenfunction(es: EigenSystem, j: int) -> np.ndarray:
    """Eigenfunction j (1-based) rescaled to quadrature integral one.

    Raises NonIntegrableEigenfunction when the integral is numerically
    zero; the object component along that direction is undefined, but
    scores do not need the normalization and remain available.
    """
    integral = es.integral(j)
    if abs(integral) < MIN_EIGENFUNCTION_INTEGRAL:
        raise NonIntegrableEigenfunction(
            f"eigenfunction {j} integrates to {integral:.3g}"
        )
    return es.eigenfunctions[j - 1] / integral


def object_fpc(
    traj: ObjectTrajectory,
    phi_star: np.ndarray,
    quad_weights: np.ndarray | None = None,
) -> ObjectPoint:
    """Frechet integral of a trajectory against a unit-integral weight
    function, i.e. the object principal component along that direction.

    ``phi_star`` is sampled on the trajectory grid and must integrate to
    one under the quadrature weights; the induced barycenter weights
    w_k * phi_star(t_k) may be signed.  Exact in the convex spaces
    provided here (average, then project).
    """
    if quad_weights is None:
        quad_weights = trapezoid_weights(traj.time_grid)
    phi_star = np.asarray(phi_star, dtype=float)
    weights = quad_weights * phi_star
    total = weights.sum()
    if abs(total - 1.0) > 1e-8:
        raise BadWeights(f"phi_star integrates to {total!r}, expected 1")
    average = weights @ traj.values
    return ObjectPoint(traj.space, project_coordinates(traj.space, average))


def riemann_sum_minimizer(
    traj: ObjectTrajectory,
    phi_star: np.ndarray,
    candidates: list[ObjectPoint] | None = None,
    quad_weights: np.ndarray | None = None,
) -> ObjectPoint:
    """Minimizer of the discretized Frechet-integral objective over an
    explicit candidate set.

    Evaluates sum_k d^2(omega, X(t_k)) phi_star(t_k) w_k for every
    candidate omega and returns the first minimizer.  Works in any space because it only
    needs distances; with a dense candidate lattice it converges to the
    exact Frechet integral as the grid refines, which makes it the
    oracle for :func:`object_fpc`.  When ``candidates`` is omitted the
    trajectory's own observed objects are searched, a cheap heuristic
    for spaces without a closed-form minimizer.
    """
    if candidates is None:
        candidates = list(traj.points)
    if len(candidates) == 0:
        raise EmptyInput("riemann_sum_minimizer needs at least one candidate")
    if quad_weights is None:
        quad_weights = trapezoid_weights(traj.time_grid)
    phi_star = np.asarray(phi_star, dtype=float)
    rows = np.stack([c.data for c in candidates])
    d2 = cross_squared_distances(traj.space, rows, traj.values)
    objective = d2 @ (phi_star * quad_weights)
    return candidates[int(np.argmin(objective))]


def distance_curves(sample: ObjectSample, mean: ObjectTrajectory) -> np.ndarray:
    """(n, T) matrix of distances from each trajectory to the mean curve."""
    scale = sample.space.coord_scale
    diff = (sample.stacked_values - mean.values[None, :, :]) * scale
    return np.sqrt(np.einsum("itp,itp->it", diff, diff))


def frechet_scores(
    sample: ObjectSample, mean: ObjectTrajectory, es: EigenSystem
) -> np.ndarray:
    """Frechet scores: quadrature projections of each trajectory's
    distance-to-mean curve onto the retained eigenfunctions.

    Returns an (n, K) matrix; row i, column j holds
    sum_k w_k d(X_i(t_k), mean(t_k)) phi_j(t_k).  Distances enter
    unsquared.
    """
    curves = distance_curves(sample, mean)
    return curves @ (es.eigenfunctions * es.quad_weights).T


@dataclass(frozen=True)
class FpcaFit:
    """Bundle of everything the pipeline estimates from one sample."""

    surface: KernelSurface
    eigen: EigenSystem
    mean: ObjectTrajectory
    scores: np.ndarray
    distance_curves: np.ndarray
    object_fpcs: tuple[tuple[ObjectPoint | None, ...], ...] | None
    skipped_components: tuple[int, ...] = ()


def fit_fpca(
    sample: ObjectSample,
    n_components: int = 4,
    clip_negative: bool = False,
    fpc_objects: bool = True,
    threads: int = 1,
) -> FpcaFit:
    """Run the full pipeline: covariance surface, eigensystem, mean curve,
    scores, and (optionally) per-trajectory object components.

    Components whose eigenfunction integrates to numerically zero are
    skipped for object components (with a warning) but keep their score
    column.
    """
    surface = estimate_cov_surface(sample, threads=threads)
    es = eigendecompose(surface, k=n_components, clip=clip_negative)
    mean = frechet_mean_trajectory(sample)
    curves = distance_curves(sample, mean)
    scores = curves @ (es.eigenfunctions * es.quad_weights).T

    object_fpcs = None
    skipped: list[int] = []
    if fpc_objects:
        weights = surface.quad_weights
        per_component: list[list[ObjectPoint] | None] = []
        for j in range(1, es.num_retained + 1):
            try:
                phi_star = normalize_eigenfunction(es, j)
            except NonIntegrableEigenfunction:
                warnings.warn(
                    f"component {j}: eigenfunction integral ~ 0, "
                    "object component skipped",
                    stacklevel=2,
                )
                skipped.append(j)
                per_component.append(None)
                continue
            col_weights = weights * phi_star
            comps = []
            for tr in sample.trajectories:
                average = col_weights @ tr.values
                comps.append(
                    ObjectPoint(sample.space, project_coordinates(sample.space, average))
                )
            per_component.append(comps)
        object_fpcs = tuple(
            tuple(
                per_component[j][i] if per_component[j] is not None else None
                for j in range(es.num_retained)
            )
            for i in range(sample.n)
        )

    return FpcaFit(
        surface=surface,
        eigen=es,
        mean=mean,
        scores=scores,
        distance_curves=curves,
        object_fpcs=object_fpcs,
        skipped_components=tuple(skipped),
    )
