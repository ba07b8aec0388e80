"""Metric spaces for object-valued data.

Four concrete spaces are provided, each a convex subset of a Euclidean
coordinate space so that squared distances are (weighted) squared
Euclidean norms and weighted barycenters reduce to "average, then
project onto the constraint set":

- ``scalar``: the real line with the absolute-value metric.
- ``quantile``: univariate distributions represented by their quantile
  function sampled on the interior midpoint grid u_k = (k - 0.5)/m.
  The metric is the discrete 2-Wasserstein distance, i.e. the
  (1/m)-weighted L2 distance of quantile vectors.
- ``adjacency``: undirected weighted graphs on a fixed node set,
  represented by symmetric, zero-diagonal adjacency matrices with
  entries in [0, 1], under the Frobenius metric.
- ``sympsd``: symmetric positive semidefinite matrices under the
  Frobenius metric.

The quantile metric approximates the continuum Wasserstein integral
with a midpoint rule, so its quadrature error is O(1/m).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadWeights, EmptyInput, InvalidObject, SpaceMismatch

SPACE_TAGS = ("scalar", "quantile", "adjacency", "sympsd")

#: Admission tolerance for constraint violations on ingestion: inputs
#: violating an invariant by more than this are rejected, violations
#: within it are repaired by metric projection.  Matches the PSD
#: eigenvalue tolerance.
ADMISSION_TOL = 1e-10


@dataclass(frozen=True)
class SpaceKind:
    """A metric-space descriptor.

    Parameters
    ----------
    tag : str
        One of ``"scalar"``, ``"quantile"``, ``"adjacency"``, ``"sympsd"``.
    dim : int
        Quantile grid size m, or matrix side r; must be 1 for scalars.
    """

    tag: str
    dim: int = 1

    def __post_init__(self):
        if self.tag not in SPACE_TAGS:
            raise InvalidObject(f"unknown space tag {self.tag!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise InvalidObject(f"dim must be a positive integer, got {self.dim!r}")
        if self.tag == "scalar" and self.dim != 1:
            raise InvalidObject("scalar space has dim 1")
        object.__setattr__(self, "dim", int(self.dim))

    @property
    def data_len(self) -> int:
        """Length of the coordinate vector of one object."""
        if self.tag == "scalar":
            return 1
        if self.tag == "quantile":
            return self.dim
        return self.dim * self.dim

    @property
    def is_matrix(self) -> bool:
        return self.tag in ("adjacency", "sympsd")

    @property
    def coord_scale(self) -> float:
        """Scale c such that d^2(x, y) = ||c (x - y)||^2 in coordinates."""
        if self.tag == "quantile":
            return 1.0 / np.sqrt(self.dim)
        return 1.0

    def quantile_grid(self) -> np.ndarray:
        """Interior midpoint probability grid u_k = (k - 0.5)/m."""
        if self.tag != "quantile":
            raise InvalidObject("quantile_grid is defined for quantile spaces only")
        m = self.dim
        return (np.arange(1, m + 1) - 0.5) / m


def scalar_space() -> SpaceKind:
    return SpaceKind("scalar", 1)


def quantile_space(m: int) -> SpaceKind:
    return SpaceKind("quantile", m)


def adjacency_space(r: int) -> SpaceKind:
    return SpaceKind("adjacency", r)


def sympsd_space(r: int) -> SpaceKind:
    return SpaceKind("sympsd", r)


def _as_matrices(space: SpaceKind, block: np.ndarray) -> np.ndarray:
    r = space.dim
    return block.reshape(block.shape[:-1] + (r, r))


def validate_block(space: SpaceKind, block: np.ndarray) -> np.ndarray:
    """Validate (and, within tolerance, repair) a batch of raw objects.

    ``block`` has shape (..., data_len).  Violations beyond
    ``ADMISSION_TOL`` raise InvalidObject; violations within it are
    repaired in place (clamped onto the constraint set).  Returns the
    admitted data.
    """
    block = np.asarray(block, dtype=float)
    if block.shape[-1] != space.data_len:
        raise InvalidObject(
            f"expected data of length {space.data_len} for {space.tag}, "
            f"got {block.shape[-1]}"
        )
    if not np.all(np.isfinite(block)):
        raise InvalidObject("data contains non-finite values")

    if space.tag == "scalar":
        return block

    if space.tag == "quantile":
        diffs = np.diff(block, axis=-1)
        if block.shape[-1] > 1 and diffs.min(initial=0.0) < -ADMISSION_TOL:
            raise InvalidObject("quantile vector is not non-decreasing")
        if block.shape[-1] > 1 and diffs.min(initial=0.0) < 0.0:
            block = np.maximum.accumulate(block, axis=-1)
        return block

    mats = _as_matrices(space, block)
    asym = np.abs(mats - np.swapaxes(mats, -1, -2)).max()
    if asym > ADMISSION_TOL:
        raise InvalidObject(f"matrix not symmetric (max asymmetry {asym:.3g})")
    repaired = 0.5 * (mats + np.swapaxes(mats, -1, -2))

    if space.tag == "adjacency":
        diag = np.abs(np.diagonal(repaired, axis1=-2, axis2=-1)).max()
        if diag > ADMISSION_TOL:
            raise InvalidObject(f"adjacency diagonal not zero (max {diag:.3g})")
        lo, hi = repaired.min(), repaired.max()
        if lo < -ADMISSION_TOL or hi > 1.0 + ADMISSION_TOL:
            raise InvalidObject("adjacency entries outside [0, 1]")
        idx = np.arange(space.dim)
        repaired[..., idx, idx] = 0.0
        repaired = np.clip(repaired, 0.0, 1.0)
        return repaired.reshape(block.shape)

    # sympsd: eigenvalues at least -ADMISSION_TOL; small dips re-projected
    eigvals = np.linalg.eigvalsh(repaired)
    min_eig = eigvals[..., 0].min()
    if min_eig < -ADMISSION_TOL:
        raise InvalidObject(
            f"matrix not positive semidefinite (min eigenvalue {min_eig:.3g})"
        )
    if min_eig < 0.0:
        vals, vecs = np.linalg.eigh(repaired)
        vals = np.clip(vals, 0.0, None)
        repaired = np.einsum("...ij,...j,...kj->...ik", vecs, vals, vecs)
        repaired = 0.5 * (repaired + np.swapaxes(repaired, -1, -2))
    return repaired.reshape(block.shape)


@dataclass(frozen=True)
class ObjectPoint:
    """One element of a metric space, stored as a flat coordinate vector.

    Matrices are stored row-major.  The constructor enforces the space
    invariants (see :func:`validate_block`) and freezes the data.
    """

    space: SpaceKind
    data: np.ndarray

    def __post_init__(self):
        data = validate_block(self.space, np.asarray(self.data, dtype=float))
        data = data.copy()
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    def matrix(self) -> np.ndarray:
        """The object as an (r, r) matrix (matrix spaces only)."""
        if not self.space.is_matrix:
            raise InvalidObject(f"{self.space.tag} objects are not matrices")
        return self.data.reshape(self.space.dim, self.space.dim)

    def __eq__(self, other):
        return (
            isinstance(other, ObjectPoint)
            and self.space == other.space
            and np.array_equal(self.data, other.data)
        )


def distance(a: ObjectPoint, b: ObjectPoint) -> float:
    """Metric distance between two objects of the same space.

    Quantile objects use the discrete 2-Wasserstein distance
    sqrt((1/m) sum_k (Q_a(u_k) - Q_b(u_k))^2), matrices the Frobenius
    norm of the difference, scalars the absolute difference.
    """
    if a.space != b.space:
        raise SpaceMismatch(f"{a.space.tag}(dim={a.space.dim}) vs {b.space.tag}(dim={b.space.dim})")
    diff = (a.data - b.data) * a.space.coord_scale
    return float(np.sqrt(np.dot(diff, diff)))


def squared_distance(a: ObjectPoint, b: ObjectPoint) -> float:
    if a.space != b.space:
        raise SpaceMismatch(f"{a.space.tag} vs {b.space.tag}")
    diff = (a.data - b.data) * a.space.coord_scale
    return float(np.dot(diff, diff))


def cross_squared_distances(space: SpaceKind, rows_a: np.ndarray, rows_b: np.ndarray) -> np.ndarray:
    """All pairwise squared distances between two stacks of coordinate rows.

    ``rows_a`` is (na, L), ``rows_b`` is (nb, L); returns (na, nb).
    """
    scale = space.coord_scale
    a = rows_a * scale
    b = rows_b * scale
    sq_a = np.einsum("ip,ip->i", a, a)
    sq_b = np.einsum("ip,ip->i", b, b)
    gram = a @ b.T
    out = sq_a[:, None] + sq_b[None, :] - 2.0 * gram
    np.maximum(out, 0.0, out=out)
    return out


def isotonic_projection(y: np.ndarray, weights: np.ndarray | None = None) -> np.ndarray:
    """Weighted L2 projection onto non-decreasing vectors (pool adjacent
    violators).

    Blocks whose pooled averages are equal are merged left to right, so
    the output is deterministic.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    if weights is None:
        weights = np.ones(n)
    else:
        weights = np.asarray(weights, dtype=float)

    # stack of blocks: (pooled mean, pooled weight, count)
    means = np.empty(n)
    wsums = np.empty(n)
    counts = np.empty(n, dtype=int)
    top = -1
    for i in range(n):
        top += 1
        means[top] = y[i]
        wsums[top] = weights[i]
        counts[top] = 1
        while top > 0 and means[top - 1] >= means[top]:
            total = wsums[top - 1] + wsums[top]
            means[top - 1] = (wsums[top - 1] * means[top - 1] + wsums[top] * means[top]) / total
            wsums[top - 1] = total
            counts[top - 1] += counts[top]
            top -= 1
    return np.repeat(means[: top + 1], counts[: top + 1])


def project_coordinates(space: SpaceKind, raw: np.ndarray) -> np.ndarray:
    """Metric projection of a raw coordinate vector onto the space's
    constraint set; returns coordinates.  Idempotent."""
    raw = np.asarray(raw, dtype=float)
    if raw.shape != (space.data_len,):
        raise InvalidObject(
            f"expected raw vector of length {space.data_len}, got shape {raw.shape}"
        )
    if not np.all(np.isfinite(raw)):
        raise InvalidObject("raw data contains non-finite values")

    if space.tag == "scalar":
        return raw.copy()
    if space.tag == "quantile":
        return isotonic_projection(raw)

    mat = raw.reshape(space.dim, space.dim)
    sym = 0.5 * (mat + mat.T)
    if space.tag == "adjacency":
        np.fill_diagonal(sym, 0.0)
        return np.clip(sym, 0.0, 1.0).reshape(-1)

    vals, vecs = np.linalg.eigh(sym)
    vals = np.clip(vals, 0.0, None)
    psd = (vecs * vals) @ vecs.T
    psd = 0.5 * (psd + psd.T)
    return psd.reshape(-1)


def project(space: SpaceKind, raw: np.ndarray) -> ObjectPoint:
    """Metric projection of a raw coordinate vector, as an ObjectPoint."""
    return ObjectPoint(space, project_coordinates(space, raw))


def weighted_barycenter(points: list[ObjectPoint], weights: np.ndarray) -> ObjectPoint:
    """Weighted Frechet barycenter argmin_w sum_j w_j d^2(w, x_j).

    Weights must sum to 1 (within 1e-10) but may be negative, e.g. when
    derived from eigenfunction values.  Because the weight sum is 1 the
    coordinatewise weighted average remains the unconstrained minimizer
    of the quadratic objective even with signed weights, so the exact
    solution is that average followed by metric projection onto the
    constraint set.

    Parameters
    ----------
    points : list of ObjectPoint
        At least one point; all in the same space.
    weights : array_like
        Same length as ``points``; sums to 1 within 1e-10.

    Raises
    ------
    EmptyInput
        If ``points`` is empty.
    BadWeights
        If the weights do not match or do not sum to 1.
    SpaceMismatch
        If the points live in different spaces.
    """
    if len(points) == 0:
        raise EmptyInput("weighted_barycenter needs at least one point")
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(points),):
        raise BadWeights(f"{len(points)} points but weight shape {weights.shape}")
    total = weights.sum()
    if abs(total - 1.0) > 1e-10:
        raise BadWeights(f"weights sum to {total!r}, expected 1")
    space = points[0].space
    for p in points[1:]:
        if p.space != space:
            raise SpaceMismatch("barycenter points must share a space")

    stacked = np.stack([p.data for p in points])
    average = weights @ stacked
    return project(space, average)
