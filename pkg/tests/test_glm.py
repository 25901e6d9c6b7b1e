"""Tests for the logistic model core: link, likelihood, gradient, IRLS."""

import numpy as np
import pytest

from wavelogit.exceptions import ConvergenceError, DataError, DimensionError
from wavelogit.glm import (
    LabeledCoefficients,
    LinearModelState,
    irls_fit,
    linear_predictor,
    link_logistic,
    neg_log_likelihood,
    nll_gradient,
)


def random_instance(rng, n=30, d=6, scale=1.0):
    theta = rng.standard_normal((n, d))
    state = LinearModelState(omega=scale * rng.standard_normal(d), intercept=scale * rng.standard_normal())
    p = link_logistic(linear_predictor(state, theta))
    y = (rng.random(n) < p).astype(float)
    if y.min() == y.max():
        y[0] = 1.0 - y[0]
    data = LabeledCoefficients(theta=theta, labels=y, j0=1, d=d)
    return state, data


class TestLabeledCoefficients:
    def test_rejects_non_binary_labels(self):
        theta = np.zeros((3, 4))
        with pytest.raises(DataError):
            LabeledCoefficients(theta=theta, labels=np.array([0.0, 0.5, 1.0]), j0=0, d=4)

    def test_rejects_shape_mismatch(self):
        with pytest.raises(DimensionError):
            LabeledCoefficients(theta=np.zeros((3, 4)), labels=np.zeros(2), j0=0, d=4)
        with pytest.raises(DimensionError):
            LabeledCoefficients(theta=np.zeros((3, 4)), labels=np.zeros(3), j0=0, d=8)

    def test_rejects_tiny_problems(self):
        with pytest.raises(DataError):
            LabeledCoefficients(theta=np.zeros((1, 4)), labels=np.zeros(1), j0=0, d=4)

    def test_single_class_blocks_fitting(self):
        data = LabeledCoefficients(theta=np.eye(4), labels=np.ones(4), j0=0, d=4)
        with pytest.raises(DataError):
            irls_fit(data)


class TestLinearPredictor:
    def test_zero_state(self):
        state = LinearModelState(omega=np.zeros(5), intercept=0.0)
        assert linear_predictor(state, np.arange(5.0)) == 0.0

    def test_coordinate_projection(self):
        state = LinearModelState(omega=np.eye(4)[0], intercept=0.0)
        assert linear_predictor(state, np.array([3.0, -1.0, 2.0, 7.0])) == 3.0

    def test_matches_summation_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            d = int(rng.integers(2, 20))
            state = LinearModelState(omega=rng.standard_normal(d), intercept=rng.standard_normal())
            row = rng.standard_normal(d)
            oracle = state.intercept + sum(row[j] * state.omega[j] for j in range(d))
            assert abs(linear_predictor(state, row) - oracle) <= 1e-12

    def test_dimension_mismatch(self):
        state = LinearModelState(omega=np.zeros(5), intercept=0.0)
        with pytest.raises(DimensionError):
            linear_predictor(state, np.zeros(4))


class TestLink:
    def test_center_and_known_value(self):
        assert link_logistic(0.0) == 0.5
        assert abs(link_logistic(np.log(3.0)) - 0.75) <= 1e-15

    def test_saturation_strictly_inside_unit_interval(self):
        hi = link_logistic(40.0)
        lo = link_logistic(-40.0)
        assert 0.0 < lo < hi < 1.0
        assert abs(hi - 1.0) <= 1e-12 and lo <= 1e-12

    def test_no_overflow_far_out(self):
        for eta in (-700.0, 700.0):
            p = link_logistic(eta)
            assert np.isfinite(p) and 0.0 < p < 1.0

    def test_open_interval_within_moderate_range(self):
        eta = np.linspace(-30, 30, 2001)
        p = link_logistic(eta)
        assert np.all(p > 0.0) and np.all(p < 1.0)

    def test_symmetry(self):
        rng = np.random.default_rng(8)
        eta = rng.uniform(-30, 30, size=5000)
        np.testing.assert_allclose(link_logistic(-eta), 1.0 - link_logistic(eta), atol=1e-12)


class TestNegLogLikelihood:
    def test_zero_state_is_n_log_two(self):
        rng = np.random.default_rng(1)
        data = LabeledCoefficients(
            theta=rng.standard_normal((4, 2)), labels=np.array([0.0, 1.0, 0.0, 1.0]), j0=0, d=2
        )
        state = LinearModelState(omega=np.zeros(2), intercept=0.0)
        assert abs(neg_log_likelihood(state, data) - 4 * np.log(2.0)) <= 1e-12

    def test_saturated_fit_is_negligible(self):
        theta = np.array([[1.0, 0.0], [-1.0, 0.0]])
        data = LabeledCoefficients(theta=theta, labels=np.array([1.0, 0.0]), j0=0, d=2)
        state = LinearModelState(omega=np.array([40.0, 0.0]), intercept=0.0)
        assert neg_log_likelihood(state, data) <= 1e-12

    def test_matches_termwise_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            state, data = random_instance(rng)
            p = np.array([link_logistic(linear_predictor(state, row)) for row in data.theta])
            oracle = -sum(
                y * np.log(pi) + (1 - y) * np.log(1 - pi) for y, pi in zip(data.labels, p)
            )
            assert abs(neg_log_likelihood(state, data) - oracle) <= 1e-12 * max(1.0, abs(oracle))

    def test_convexity_along_segments(self):
        """Midpoint NLL never exceeds the chord average."""
        rng = np.random.default_rng(3)
        for _ in range(50):
            _, data = random_instance(rng)
            w0, w1 = rng.standard_normal((2, data.d))
            b0, b1 = rng.standard_normal(2)
            mid = LinearModelState(omega=(w0 + w1) / 2, intercept=(b0 + b1) / 2)
            ends = [
                neg_log_likelihood(LinearModelState(omega=w, intercept=b), data)
                for w, b in ((w0, b0), (w1, b1))
            ]
            assert neg_log_likelihood(mid, data) <= (ends[0] + ends[1]) / 2 + 1e-10


class TestGradient:
    def test_balanced_labels_zero_intercept_gradient(self):
        rng = np.random.default_rng(4)
        theta = rng.standard_normal((10, 3))
        labels = np.array([0.0, 1.0] * 5)
        data = LabeledCoefficients(theta=theta, labels=labels, j0=0, d=3)
        _, gi = nll_gradient(LinearModelState(omega=np.zeros(3), intercept=0.0), data)
        assert abs(gi) <= 1e-12

    def test_saturated_observation_contributes_nothing(self):
        theta = np.array([[1.0, 0.0], [-1.0, 0.0]])
        data = LabeledCoefficients(theta=theta, labels=np.array([1.0, 0.0]), j0=0, d=2)
        g, gi = nll_gradient(LinearModelState(omega=np.array([40.0, 0.0]), intercept=0.0), data)
        assert np.max(np.abs(g)) <= 1e-12 and abs(gi) <= 1e-12

    def test_matches_finite_differences(self):
        """100 seeded instances, central differences, per-coordinate check."""
        rng = np.random.default_rng(6)
        h = 1e-6
        for _ in range(100):
            state, data = random_instance(rng, n=20, d=5)
            g, gi = nll_gradient(state, data)
            for j in range(data.d + 1):
                def at(delta):
                    w = state.omega.copy()
                    b = state.intercept
                    if j < data.d:
                        w[j] += delta
                    else:
                        b += delta
                    return neg_log_likelihood(LinearModelState(omega=w, intercept=b), data)

                numeric = (at(h) - at(-h)) / (2 * h)
                exact = g[j] if j < data.d else gi
                denom = max(1.0, abs(exact))
                assert abs(numeric - exact) / denom <= 1e-5


class TestIrlsFit:
    def test_stationary_point(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            _, data = random_instance(rng, n=60, d=5, scale=0.5)
            state = irls_fit(data, tol=1e-8)
            g, gi = nll_gradient(state, data)
            assert max(np.max(np.abs(g)), abs(gi)) <= 1e-8

    def test_nested_model_improves_fit(self):
        """A full model can only lower the NLL relative to intercept-only."""
        theta = np.array([[-1.0], [-1.0], [-1.0], [1.0], [1.0], [1.0]])
        theta = np.column_stack([theta, np.zeros(6)])
        y = np.array([0.0, 0.0, 1.0, 1.0, 1.0, 0.0])  # one flip each side
        data = LabeledCoefficients(theta=theta, labels=y, j0=0, d=2)
        full = irls_fit(data, columns=[0])
        base = irls_fit(data, columns=[])
        assert neg_log_likelihood(full, data) <= neg_log_likelihood(base, data)

    def test_recovers_truth_on_large_sample(self):
        rng = np.random.default_rng(9)
        n, d = 5000, 4
        omega_true = np.array([0.8, -0.6, 0.0, 0.4])
        intercept_true = -0.3
        theta = rng.standard_normal((n, d))
        p = link_logistic(theta @ omega_true + intercept_true)
        y = (rng.random(n) < p).astype(float)
        state = irls_fit(LabeledCoefficients(theta=theta, labels=y, j0=0, d=d))
        assert np.max(np.abs(state.omega - omega_true)) <= 0.1
        assert abs(state.intercept - intercept_true) <= 0.1

    def test_intercept_only_closed_form(self):
        rng = np.random.default_rng(10)
        theta = rng.standard_normal((40, 3))
        y = np.array([1.0] * 25 + [0.0] * 15)
        data = LabeledCoefficients(theta=theta, labels=y, j0=0, d=3)
        state = irls_fit(data, columns=[])
        expected = np.log(25 / 15)
        assert abs(state.intercept - expected) <= 1e-10
        assert np.all(state.omega == 0.0)

    def test_deterministic(self):
        rng = np.random.default_rng(11)
        _, data = random_instance(rng, n=80, d=6)
        s1 = irls_fit(data)
        s2 = irls_fit(data)
        assert np.array_equal(s1.omega, s2.omega) and s1.intercept == s2.intercept

    def test_nonconvergence_carries_last_iterate(self):
        rng = np.random.default_rng(12)
        _, data = random_instance(rng, n=200, d=8)
        with pytest.raises(ConvergenceError) as info:
            irls_fit(data, max_iter=1, tol=1e-14)
        assert info.value.last_solution is not None
        assert info.value.residual is not None
