"""Auto-covariance U-statistic and related kernels against classical oracles."""

import numpy as np
import pytest

from ofpca import (
    DegenerateVariance,
    InvalidObject,
    InvalidSurface,
    KernelSurface,
    ObjectPoint,
    ObjectSample,
    ObjectTrajectory,
    SpaceMismatch,
    TooFewTrajectories,
    distance_cov_surface,
    estimate_cov_surface,
    metric_correlation,
    metric_covariance,
    metric_variance,
    pair_kernel,
    quantile_space,
    scalar_space,
    total_variance,
    trapezoid_weights,
)

from oracles import classical_cross_covariance, pearson_unbiased


def scalar_sample(X, grid=None):
    n, T = X.shape
    if grid is None:
        grid = np.linspace(0.0, 1.0, T)
    space = scalar_space()
    return ObjectSample(tuple(
        ObjectTrajectory(space, grid, X[i][:, None]) for i in range(n)
    ))


def quantile_sample(rng, n, T, m):
    grid = np.linspace(0.0, 1.0, T)
    space = quantile_space(m)
    trajs = []
    for _ in range(n):
        vals = np.sort(rng.normal(size=(T, m)), axis=1)
        trajs.append(ObjectTrajectory(space, grid, vals))
    return ObjectSample(tuple(trajs))


class TestPairKernel:
    def test_same_trajectory_is_zero(self):
        rng = np.random.default_rng(0)
        sample = scalar_sample(rng.normal(size=(2, 6)))
        x = sample.trajectories[0]
        for s in range(6):
            for t in range(6):
                assert pair_kernel(x, x, s, t) == 0.0

    def test_scalar_diagonal_value(self):
        grid = np.linspace(0, 1, 3)
        x = ObjectTrajectory(scalar_space(), grid, np.zeros((3, 1)))
        y = ObjectTrajectory(scalar_space(), grid, np.full((3, 1), 2.0))
        assert pair_kernel(x, y, 1, 1) == 8.0

    def test_constant_trajectories(self):
        # constant-in-time curves are perfectly dependent across times, so
        # the pair kernel equals 2 d^2(a, b) at every (s, t); this is what
        # keeps the estimator consistent with the classical covariance of
        # constant scalar curves
        grid = np.linspace(0, 1, 4)
        x = ObjectTrajectory(scalar_space(), grid, np.full((4, 1), 0.7))
        y = ObjectTrajectory(scalar_space(), grid, np.full((4, 1), -1.3))
        for s in range(4):
            for t in range(4):
                assert pair_kernel(x, y, s, t) == pytest.approx(8.0, abs=1e-12)

    def test_symmetries(self):
        rng = np.random.default_rng(1)
        sample = scalar_sample(rng.normal(size=(2, 5)))
        x, y = sample.trajectories
        for s in range(5):
            for t in range(5):
                v = pair_kernel(x, y, s, t)
                assert v == pytest.approx(pair_kernel(y, x, s, t), abs=1e-14)
                assert v == pytest.approx(pair_kernel(x, y, t, s), abs=1e-14)

    def test_index_out_of_range(self):
        rng = np.random.default_rng(2)
        sample = scalar_sample(rng.normal(size=(2, 5)))
        x, y = sample.trajectories
        with pytest.raises(IndexError):
            pair_kernel(x, y, 5, 0)
        with pytest.raises(IndexError):
            pair_kernel(x, y, 0, -1)


class TestCovSurface:
    def test_matches_classical_oracle_randomized(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            n = int(rng.integers(2, 51))
            T = int(rng.integers(2, 21))
            X = rng.normal(size=(n, T)) * rng.uniform(0.5, 3.0)
            surface = estimate_cov_surface(scalar_sample(X))
            assert np.abs(surface.values - classical_cross_covariance(X)).max() <= 1e-10

    def test_two_point_diagonal(self):
        X = np.array([[0.0, 0.0], [2.0, 2.0]])
        surface = estimate_cov_surface(scalar_sample(X))
        assert surface.values[0, 0] == pytest.approx(2.0, abs=1e-14)

    def test_identical_trajectories_zero_surface(self):
        X = np.tile(np.linspace(-1, 1, 8), (4, 1))
        surface = estimate_cov_surface(scalar_sample(X))
        assert np.abs(surface.values).max() <= 1e-14

    def test_symmetric_exactly(self):
        rng = np.random.default_rng(8)
        surface = estimate_cov_surface(scalar_sample(rng.normal(size=(12, 9))))
        assert np.array_equal(surface.values, surface.values.T)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(9)
        X = rng.normal(size=(10, 7))
        base = estimate_cov_surface(scalar_sample(X)).values
        for _ in range(5):
            perm = rng.permutation(10)
            shuffled = estimate_cov_surface(scalar_sample(X[perm])).values
            assert np.abs(base - shuffled).max() <= 1e-12

    def test_translation_invariance(self):
        rng = np.random.default_rng(10)
        X = rng.normal(size=(8, 6))
        shifted = X + 17.0
        a = estimate_cov_surface(scalar_sample(X)).values
        b = estimate_cov_surface(scalar_sample(shifted)).values
        assert np.abs(a - b).max() <= 1e-10

    def test_quantile_sample_matches_embedded_oracle(self):
        # for quantile curves the surface must match the classical
        # covariance of the (1/sqrt(m))-scaled coordinate curves
        rng = np.random.default_rng(11)
        sample = quantile_sample(rng, n=9, T=5, m=4)
        surface = estimate_cov_surface(sample)
        E = sample.stacked_values / np.sqrt(4)
        n, T, p = E.shape
        centered = E - E.mean(axis=0)
        oracle = np.einsum("isp,itp->st", centered, centered) / (n - 1)
        assert np.abs(surface.values - oracle).max() <= 1e-10

    def test_threads_do_not_change_bytes(self):
        rng = np.random.default_rng(12)
        sample = scalar_sample(rng.normal(size=(20, 10)))
        one = estimate_cov_surface(sample, threads=1).values
        four = estimate_cov_surface(sample, threads=4).values
        assert np.array_equal(one, four)

    def test_quad_weights_sum_to_range(self):
        grid = np.array([0.0, 0.1, 0.4, 1.0])
        w = trapezoid_weights(grid)
        assert w.sum() == pytest.approx(1.0, abs=1e-15)
        assert np.all(w > 0)

    def test_too_few_trajectories(self):
        grid = np.linspace(0, 1, 4)
        tr = ObjectTrajectory(scalar_space(), grid, np.zeros((4, 1)))
        with pytest.raises(TooFewTrajectories):
            ObjectSample((tr,))


class TestMetricVariance:
    def test_identical_objects(self):
        space = scalar_space()
        objs = [ObjectPoint(space, [3.0]) for _ in range(5)]
        assert metric_variance(objs) == 0.0

    def test_two_scalars(self):
        space = scalar_space()
        objs = [ObjectPoint(space, [0.0]), ObjectPoint(space, [2.0])]
        assert metric_variance(objs) == pytest.approx(2.0, abs=1e-14)

    def test_three_scalars(self):
        space = scalar_space()
        objs = [ObjectPoint(space, [v]) for v in (1.0, 2.0, 3.0)]
        assert metric_variance(objs) == pytest.approx(1.0, abs=1e-14)

    def test_matches_unbiased_variance_oracle(self):
        rng = np.random.default_rng(13)
        space = scalar_space()
        for _ in range(20):
            vals = rng.normal(size=int(rng.integers(2, 30)))
            objs = [ObjectPoint(space, [v]) for v in vals]
            assert metric_variance(objs) == pytest.approx(np.var(vals, ddof=1), abs=1e-12)

    def test_matches_surface_diagonal(self):
        rng = np.random.default_rng(14)
        X = rng.normal(size=(7, 5))
        sample = scalar_sample(X)
        surface = estimate_cov_surface(sample)
        space = scalar_space()
        for t in range(5):
            objs = [ObjectPoint(space, [X[i, t]]) for i in range(7)]
            assert metric_variance(objs) == pytest.approx(surface.values[t, t], abs=1e-12)


class TestMetricCorrelation:
    def test_self_correlation_is_one(self):
        space = scalar_space()
        objs = [ObjectPoint(space, [v]) for v in (0.0, 1.0, 5.0)]
        assert metric_correlation(objs, objs) == 1.0

    def test_self_correlation_exact_on_random_fixtures(self):
        rng = np.random.default_rng(21)
        space = quantile_space(4)
        for _ in range(20):
            objs = [ObjectPoint(space, np.sort(rng.normal(size=4)))
                    for _ in range(int(rng.integers(2, 12)))]
            assert metric_correlation(objs, objs) == 1.0

    def test_negated_pairs(self):
        space = scalar_space()
        u = [ObjectPoint(space, [v]) for v in (-1.0, 0.5, 2.0)]
        v = [ObjectPoint(space, [-p.data[0]]) for p in u]
        assert metric_correlation(u, v) == pytest.approx(-1.0, abs=1e-12)

    def test_matches_pearson_oracle(self):
        space = scalar_space()
        uu = np.array([0.0, 1.0, 2.0])
        vv = np.array([1.0, 0.0, 2.0])
        u = [ObjectPoint(space, [x]) for x in uu]
        v = [ObjectPoint(space, [x]) for x in vv]
        assert metric_correlation(u, v) == pytest.approx(pearson_unbiased(uu, vv), abs=1e-10)

    def test_matches_pearson_randomized(self):
        rng = np.random.default_rng(15)
        space = scalar_space()
        for _ in range(20):
            n = int(rng.integers(3, 40))
            uu = rng.normal(size=n)
            vv = 0.3 * uu + rng.normal(size=n)
            u = [ObjectPoint(space, [x]) for x in uu]
            v = [ObjectPoint(space, [x]) for x in vv]
            assert metric_correlation(u, v) == pytest.approx(
                pearson_unbiased(uu, vv), abs=1e-10
            )

    def test_degenerate_variance(self):
        space = scalar_space()
        const = [ObjectPoint(space, [1.0]) for _ in range(3)]
        varying = [ObjectPoint(space, [v]) for v in (0.0, 1.0, 2.0)]
        with pytest.raises(DegenerateVariance):
            metric_correlation(const, varying)

    def test_cross_space_rejected(self):
        u = [ObjectPoint(scalar_space(), [v]) for v in (0.0, 1.0)]
        v = [ObjectPoint(quantile_space(2), [0.0, 1.0]) for _ in range(2)]
        with pytest.raises(SpaceMismatch):
            metric_covariance(u, v)


class TestTotalVariance:
    def test_zero_surface(self):
        grid = np.linspace(0, 1, 5)
        surface = KernelSurface(grid, np.zeros((5, 5)), trapezoid_weights(grid))
        assert total_variance(surface) == 0.0

    def test_rank_one_trace(self):
        grid = np.linspace(0, 1, 201)
        w = trapezoid_weights(grid)
        phi = np.sin(2 * np.pi * grid) + 0.3
        phi = phi / np.sqrt(np.dot(w, phi * phi))
        lam = 4.5
        surface = KernelSurface(grid, lam * np.outer(phi, phi), w)
        assert total_variance(surface) == pytest.approx(lam, rel=1e-10)

    def test_scalar_sample_matches_pointwise_variance_integral(self):
        rng = np.random.default_rng(16)
        X = rng.normal(size=(15, 9)) * np.linspace(1, 2, 9)
        sample = scalar_sample(X)
        surface = estimate_cov_surface(sample)
        w = surface.quad_weights
        pointwise = X.var(axis=0, ddof=1)
        assert total_variance(surface) == pytest.approx(float(np.dot(w, pointwise)), abs=1e-10)

    def test_nonnegative_on_simulated_fixture(self):
        rng = np.random.default_rng(17)
        X = rng.normal(size=(6, 8))
        assert total_variance(estimate_cov_surface(scalar_sample(X))) >= -1e-8


class TestDistanceCovSurface:
    def test_independent_columns_near_zero(self):
        rng = np.random.default_rng(18)
        n = 200
        base = rng.normal(size=n)
        # destroy dependence between the two times by permuting one column
        X = np.stack([base, base[rng.permutation(n)]], axis=1)
        surface = distance_cov_surface(scalar_sample(X, grid=np.array([0.0, 1.0])))
        assert abs(surface.values[0, 1]) <= 0.1

    def test_identical_columns_strictly_positive(self):
        vals = np.linspace(-1, 1, 30)
        X = np.stack([vals, vals], axis=1)
        surface = distance_cov_surface(scalar_sample(X, grid=np.array([0.0, 1.0])))
        assert surface.values[0, 1] > 0.01

    def test_constant_column_zero(self):
        rng = np.random.default_rng(19)
        X = np.stack([np.full(25, 2.0), rng.normal(size=25)], axis=1)
        surface = distance_cov_surface(scalar_sample(X, grid=np.array([0.0, 1.0])))
        assert surface.values[0, 0] == pytest.approx(0.0, abs=1e-14)
        assert surface.values[0, 1] == pytest.approx(0.0, abs=1e-14)


class TestSurfaceInvariants:
    def test_rejects_asymmetric_values(self):
        grid = np.linspace(0, 1, 3)
        vals = np.array([[1.0, 0.5, 0.0], [0.4, 1.0, 0.0], [0.0, 0.0, 1.0]])
        with pytest.raises(InvalidSurface):
            KernelSurface(grid, vals, trapezoid_weights(grid))

    def test_rejects_bad_grid(self):
        with pytest.raises(InvalidObject):
            ObjectTrajectory(scalar_space(), np.array([0.0, 0.5, 0.5]), np.zeros((3, 1)))
        with pytest.raises(InvalidObject):
            ObjectTrajectory(scalar_space(), np.array([0.0, 1.5]), np.zeros((2, 1)))

    def test_sample_requires_shared_grid(self):
        a = ObjectTrajectory(scalar_space(), np.array([0.0, 1.0]), np.zeros((2, 1)))
        b = ObjectTrajectory(scalar_space(), np.array([0.0, 0.5]), np.zeros((2, 1)))
        with pytest.raises(InvalidObject):
            ObjectSample((a, b))
