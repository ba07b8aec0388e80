"""Metric auto-covariance estimation for samples of object-valued curves.

The central estimator is a U-statistic over trajectory pairs built from
squared distances only, so it applies verbatim in every supported
metric space:

    C_hat(s, t) = 1/(4 n (n-1)) * sum_{i != j} f_{s,t}(X_i, X_j)

with the pair kernel

    f_{s,t}(x, y) = d^2(x(s), y(t)) + d^2(y(s), x(t))
                    - d^2(x(s), x(t)) - d^2(y(s), y(t)).

The distance tensor d^2(X_i(s), X_j(t)) has n^2 T^2 entries; it is
never materialized.  Pair blocks of shape (T, T) are computed one
anchor trajectory at a time and reduced in a fixed order, so the result
is reproducible bit for bit regardless of the worker-thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    DegenerateVariance,
    InvalidObject,
    InvalidSurface,
    SpaceMismatch,
    TooFewTrajectories,
)
from .spaces import ObjectPoint, SpaceKind, cross_squared_distances, validate_block


def trapezoid_weights(time_grid: np.ndarray) -> np.ndarray:
    """Composite trapezoid quadrature weights for a strictly increasing grid."""
    t = np.asarray(time_grid, dtype=float)
    w = np.empty_like(t)
    w[0] = 0.5 * (t[1] - t[0])
    w[-1] = 0.5 * (t[-1] - t[-2])
    w[1:-1] = 0.5 * (t[2:] - t[:-2])
    return w


def _check_time_grid(time_grid: np.ndarray) -> np.ndarray:
    t = np.asarray(time_grid, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise InvalidObject("time grid must be a 1-d array with at least 2 points")
    if not np.all(np.isfinite(t)):
        raise InvalidObject("time grid contains non-finite values")
    if np.any(np.diff(t) <= 0):
        raise InvalidObject("time grid must be strictly increasing")
    if t[0] < 0.0 or t[-1] > 1.0:
        raise InvalidObject("time grid must lie inside [0, 1]")
    return t


@dataclass(frozen=True)
class ObjectTrajectory:
    """One object-valued curve: a time grid plus one object per time.

    ``values`` has shape (T, data_len); row k is the coordinate vector
    of the object at time ``time_grid[k]``.  Space invariants are
    enforced for every row on construction.
    """

    space: SpaceKind
    time_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = _check_time_grid(self.time_grid)
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[0] != t.size:
            raise InvalidObject(
                f"values must have shape (T={t.size}, {self.space.data_len}), got {vals.shape}"
            )
        vals = validate_block(self.space, vals).copy()
        t = t.copy()
        t.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "time_grid", t)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_points(cls, time_grid, points: list[ObjectPoint]) -> "ObjectTrajectory":
        if len(points) == 0:
            raise InvalidObject("trajectory needs at least one point")
        space = points[0].space
        for p in points[1:]:
            if p.space != space:
                raise SpaceMismatch("trajectory points must share a space")
        return cls(space, np.asarray(time_grid, float), np.stack([p.data for p in points]))

    @property
    def n_times(self) -> int:
        return self.time_grid.size

    def point(self, k: int) -> ObjectPoint:
        return ObjectPoint(self.space, self.values[k])

    @property
    def points(self) -> tuple[ObjectPoint, ...]:
        return tuple(self.point(k) for k in range(self.n_times))


@dataclass(frozen=True)
class ObjectSample:
    """n trajectories sharing one space and one time grid (n >= 2)."""

    trajectories: tuple[ObjectTrajectory, ...]

    def __post_init__(self):
        trajs = tuple(self.trajectories)
        if len(trajs) < 2:
            raise TooFewTrajectories("a sample needs at least two trajectories")
        first = trajs[0]
        for tr in trajs[1:]:
            if tr.space != first.space:
                raise SpaceMismatch("sample trajectories must share a space")
            if not np.array_equal(tr.time_grid, first.time_grid):
                raise InvalidObject("sample trajectories must share the time grid")
        object.__setattr__(self, "trajectories", trajs)

    @property
    def space(self) -> SpaceKind:
        return self.trajectories[0].space

    @property
    def time_grid(self) -> np.ndarray:
        return self.trajectories[0].time_grid

    @property
    def n(self) -> int:
        return len(self.trajectories)

    @cached_property
    def stacked_values(self) -> np.ndarray:
        """(n, T, data_len) array of all coordinates."""
        out = np.stack([tr.values for tr in self.trajectories])
        out.flags.writeable = False
        return out


@dataclass(frozen=True)
class KernelSurface:
    """A symmetric T x T kernel on a time grid, with quadrature weights."""

    time_grid: np.ndarray
    values: np.ndarray
    quad_weights: np.ndarray

    def __post_init__(self):
        t = _check_time_grid(self.time_grid).copy()
        vals = np.array(self.values, dtype=float)
        w = np.array(self.quad_weights, dtype=float)
        if vals.shape != (t.size, t.size):
            raise InvalidSurface(f"values must be ({t.size}, {t.size}), got {vals.shape}")
        if np.abs(vals - vals.T).max() > 1e-12:
            raise InvalidSurface("surface is not symmetric")
        if w.shape != (t.size,) or np.any(w < 0):
            raise InvalidSurface("quadrature weights must be T nonnegative reals")
        if abs(w.sum() - (t[-1] - t[0])) > 1e-9:
            raise InvalidSurface("quadrature weights must sum to the grid range")
        for arr in (t, vals, w):
            arr.flags.writeable = False
        object.__setattr__(self, "time_grid", t)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "quad_weights", w)

    @property
    def n_times(self) -> int:
        return self.time_grid.size


def pair_kernel(x: ObjectTrajectory, y: ObjectTrajectory, s_idx: int, t_idx: int) -> float:
    """The symmetrized squared-distance kernel for one trajectory pair at
    one pair of grid indices.

    Symmetric under swapping the trajectories and under swapping the
    indices, and zero when x and y are the same trajectory.  Curves that
    are constant in time give 2 d^2(a, b): values at different times are
    then perfectly dependent.
    """
    if x.space != y.space:
        raise SpaceMismatch("pair kernel needs trajectories in one space")
    T = x.n_times
    if not (0 <= s_idx < T and 0 <= t_idx < T):
        raise IndexError(f"grid indices ({s_idx}, {t_idx}) out of range for T={T}")
    scale = x.space.coord_scale

    def sq(u, v):
        diff = (u - v) * scale
        return float(np.dot(diff, diff))

    return (
        sq(x.values[s_idx], y.values[t_idx])
        + sq(y.values[s_idx], x.values[t_idx])
        - sq(x.values[s_idx], x.values[t_idx])
        - sq(y.values[s_idx], y.values[t_idx])
    )


def _pair_block_terms(E: np.ndarray, sq: np.ndarray, i: int) -> tuple[np.ndarray, np.ndarray]:
    """Contributions of anchor trajectory i to the pair-kernel sum.

    Returns (S_i + S_i^T, D_ii) where S_i = sum_{j > i} D_ij and
    D_ij[s, t] = d^2(X_i(s), X_j(t)).
    """
    T = E.shape[1]
    gram_self = E[i] @ E[i].T
    gram_self = 0.5 * (gram_self + gram_self.T)
    d_self = sq[i][:, None] + sq[i][None, :] - 2.0 * gram_self
    if i == E.shape[0] - 1:
        return np.zeros((T, T)), d_self
    rest = E[i + 1 :]
    gram = E[i] @ rest.reshape(-1, E.shape[2]).T  # (T, (n-i-1)*T)
    gram = gram.reshape(T, rest.shape[0], T)
    # sum over j of D_ij: broadcast the squared norms, then reduce
    s_i = (rest.shape[0] * sq[i])[:, None] + sq[i + 1 :].sum(axis=0)[None, :] - 2.0 * gram.sum(axis=1)
    return s_i + s_i.T, d_self


def estimate_cov_surface(sample: ObjectSample, threads: int = 1) -> KernelSurface:
    """U-statistic estimate of the metric auto-covariance surface.

    Pair blocks are summed over j > i and doubled (the pair kernel is
    symmetric in the trajectory pair), and the result is symmetric in
    (s, t) by construction.  With ``threads > 1`` the per-anchor blocks
    are computed concurrently but reduced in index order, so the output
    does not depend on the thread count.
    """
    n = sample.n
    if n < 2:
        raise TooFewTrajectories("covariance estimation needs n >= 2")
    E = sample.stacked_values * sample.space.coord_scale
    sq = np.einsum("itp,itp->it", E, E)
    T = sample.time_grid.size

    indices = range(n)
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            results = list(pool.map(lambda i: _pair_block_terms(E, sq, i), indices))
    else:
        results = [_pair_block_terms(E, sq, i) for i in indices]

    cross = np.zeros((T, T))
    self_sum = np.zeros((T, T))
    for s_sym, d_self in results:
        cross += s_sym
        self_sum += d_self

    surface = (2.0 * (cross - (n - 1) * self_sum)) / (4.0 * n * (n - 1))
    surface = 0.5 * (surface + surface.T)
    return KernelSurface(sample.time_grid, surface, trapezoid_weights(sample.time_grid))


def _stack_points(objs: list[ObjectPoint]) -> tuple[SpaceKind, np.ndarray]:
    if len(objs) < 2:
        raise TooFewTrajectories("need at least two objects")
    space = objs[0].space
    for o in objs[1:]:
        if o.space != space:
            raise SpaceMismatch("objects must share a space")
    return space, np.stack([o.data for o in objs])


def metric_variance(objs: list[ObjectPoint]) -> float:
    """U-statistic estimate of the metric variance (1/2) E d^2(U, U').

    Equals the diagonal of :func:`estimate_cov_surface` when the objects
    are a time slice of a sample, and the unbiased sample variance for
    scalars.
    """
    space, rows = _stack_points(objs)
    n = rows.shape[0]
    d2 = cross_squared_distances(space, rows, rows)
    np.fill_diagonal(d2, 0.0)  # d(x, x) = 0 exactly; drop Gram-trick noise
    return float(d2.sum() / (2.0 * n * (n - 1)))


def metric_covariance(u: list[ObjectPoint], v: list[ObjectPoint]) -> float:
    """U-statistic estimate of the metric covariance of paired objects.

    Both lists must live in the same space: the estimator evaluates
    distances between u- and v-objects.
    """
    space_u, rows_u = _stack_points(u)
    space_v, rows_v = _stack_points(v)
    if space_u != space_v:
        raise SpaceMismatch("metric covariance needs both margins in one space")
    if rows_u.shape[0] != rows_v.shape[0]:
        raise InvalidObject("paired lists must have equal length")
    n = rows_u.shape[0]
    m = cross_squared_distances(space_u, rows_u, rows_v)
    # pairs with identical objects have distance 0 exactly; enforcing that
    # keeps self-correlation at exactly 1
    same = np.nonzero(np.all(rows_u == rows_v, axis=1))[0]
    m[same, same] = 0.0
    trace = np.trace(m)
    return float((m.sum() - n * trace) / (2.0 * n * (n - 1)))


def metric_correlation(u: list[ObjectPoint], v: list[ObjectPoint]) -> float:
    """Metric correlation in [-1, 1]: covariance over the geometric mean
    of the two metric variances.

    Raises DegenerateVariance if either margin has zero variance.  The
    empirical Cauchy-Schwarz bound holds exactly, so values are clamped
    only against float noise within 1e-9.
    """
    var_u = metric_variance(u)
    var_v = metric_variance(v)
    if var_u <= 0.0 or var_v <= 0.0:
        raise DegenerateVariance("zero metric variance in a margin")
    rho = metric_covariance(u, v) / np.sqrt(var_u * var_v)
    if abs(rho) > 1.0 + 1e-9:
        raise InvalidObject(f"correlation {rho!r} exceeds 1 beyond float tolerance")
    return float(np.clip(rho, -1.0, 1.0))


def total_variance(surface: KernelSurface) -> float:
    """Quadrature integral of the surface diagonal (the operator trace)."""
    return float(np.dot(surface.quad_weights, np.diagonal(surface.values)))


def distance_cov_surface(sample: ObjectSample) -> KernelSurface:
    """Comparison baseline: the squared sample distance covariance
    (biased V-statistic, double-centering form) between the object
    slices at every pair of times.

    Unlike the metric auto-covariance this measures probabilistic
    dependence, not signed association, and is provided only to contrast
    the two kernels.
    """
    n = sample.n
    E = sample.stacked_values * sample.space.coord_scale
    T = sample.time_grid.size
    centered = np.empty((T, n, n))
    for s in range(T):
        rows = E[:, s, :]
        sq = np.einsum("ip,ip->i", rows, rows)
        gram = rows @ rows.T
        d2 = sq[:, None] + sq[None, :] - 2.0 * gram
        np.maximum(d2, 0.0, out=d2)
        d = np.sqrt(d2)
        d = 0.5 * (d + d.T)
        row_mean = d.mean(axis=1, keepdims=True)
        centered[s] = d - row_mean - row_mean.T + d.mean()
    flat = centered.reshape(T, n * n)
    surface = (flat @ flat.T) / (n * n)
    surface = 0.5 * (surface + surface.T)
    return KernelSurface(sample.time_grid, surface, trapezoid_weights(sample.time_grid))
