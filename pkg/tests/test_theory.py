import math

import numpy as np
import pytest

from src.core.errors import EpsilonTooSmallError, HypothesisViolatedError, LambdaOutOfRangeError
from src.core.markov import true_transition_matrix
from src.core.model import BtlScores, uniform_mu
from src.core.regularize import apply_regularizer, lambda_regularizer
from src.core.theory import (BoundInputs, bias_bound, exact_stationary_distribution, gamma,
                             observation_matrix, per_sample_norm_bound, perturbation_error_bound,
                             perturbation_threshold, rc_failure_probability, rc_sample_complexity,
                             reg_rc_error_bound, reg_rc_failure_probability,
                             reg_rc_sample_complexity, reversible_spectral_gap,
                             spectral_gap_lower_bound, variance_bound)


def inputs(**overrides):
    values = dict(n=10, b=2.0, mu_min=1 / 45, mu_max=1 / 45, epsilon=0.5, delta=0.1)
    values.update(overrides)
    return BoundInputs(**values)


def pair_inputs(b, **overrides):
    values = dict(n=2, b=b, mu_min=1.0, mu_max=1.0, epsilon=0.5, delta=0.1)
    values.update(overrides)
    return BoundInputs(**values)


class TestBoundInputs:

    @pytest.mark.parametrize("overrides", [dict(n=1), dict(b=0.5), dict(mu_min=0.0),
                                           dict(mu_min=0.5, mu_max=0.1), dict(epsilon=1.0),
                                           dict(delta=0.0), dict(lam=1.5), dict(m=-1)])
    def test_rejects_out_of_range(self, overrides):
        with pytest.raises(ValueError):
            inputs(**overrides)

    def test_from_instance(self):
        w = BtlScores([1.0, 2.0, 4.0])
        bound = BoundInputs.from_instance(w, uniform_mu(3), epsilon=0.2, delta=0.05)
        assert bound.b == pytest.approx(4.0)
        assert bound.mu_min == pytest.approx(1 / 3)


class TestSpectralGap:

    def test_pair(self):
        assert spectral_gap_lower_bound(pair_inputs(2.0)) == 0.5

    def test_uniform_mu_closed_form(self):
        for n in (3, 10, 40):
            mu = 2.0 / (n * (n - 1))
            bound = spectral_gap_lower_bound(inputs(n=n, mu_min=mu, mu_max=mu, b=3.0))
            assert bound == pytest.approx(1.0 / ((n - 1) * 3.0))

    def test_pair_chain_gap_is_one(self):
        Q = true_transition_matrix(BtlScores([1 / 3, 2 / 3]), uniform_mu(2))
        assert reversible_spectral_gap(Q, [1 / 3, 2 / 3]) == pytest.approx(1.0)

    def test_bound_holds_on_random_chains(self, rng, make_instance):
        for _ in range(50):
            n = int(rng.integers(2, 16))
            w, mu = make_instance(rng, n)
            Q = true_transition_matrix(w, mu)
            bound = spectral_gap_lower_bound(BoundInputs.from_instance(w, mu, 0.5, 0.1))
            assert reversible_spectral_gap(Q, w.w) >= bound - 1e-12


class TestGamma:

    def test_values(self):
        assert gamma(pair_inputs(2.0)) == pytest.approx(2 / (2 * (1 + math.sqrt(2)) * 2 * math.sqrt(2)))
        assert gamma(pair_inputs(2.0)) == pytest.approx(0.1464, abs=1e-4)
        assert gamma(pair_inputs(1.0)) == pytest.approx(1 / (1 + math.sqrt(2)))

    def test_linear_in_mu_min(self):
        base = gamma(inputs(mu_min=0.01, mu_max=0.05))
        assert gamma(inputs(mu_min=0.03, mu_max=0.05)) == pytest.approx(3 * base)


class TestPerturbationBound:

    def test_zero_and_half_threshold(self):
        bound = inputs()
        assert perturbation_error_bound(0.0, bound) == 0.0
        assert perturbation_error_bound(perturbation_threshold(bound) / 2, bound) == pytest.approx(1.0)

    def test_hypothesis(self):
        bound = inputs()
        with pytest.raises(HypothesisViolatedError):
            perturbation_error_bound(perturbation_threshold(bound), bound)

    def test_bound_holds_on_random_perturbations(self, rng, make_instance):
        checked = 0
        while checked < 50:
            w, mu = make_instance(rng, 5, log_spread=1.0)
            Q = true_transition_matrix(w, mu).entries
            R = rng.uniform(0.0, 1.0, size=(5, 5))
            R /= R.sum(axis=1, keepdims=True)
            bound_inputs = BoundInputs.from_instance(w, mu, 0.5, 0.1)
            direction = np.linalg.norm(R - Q, 2)
            if direction == 0:
                continue
            # Q + t (R - Q) stays row-stochastic and nonnegative for t in [0, 1]
            t = min(1.0, rng.uniform(0.05, 0.95) * perturbation_threshold(bound_inputs) / direction)
            perturbed = (1 - t) * Q + t * R
            delta_norm = np.linalg.norm(perturbed - Q, 2)
            if not delta_norm < perturbation_threshold(bound_inputs):
                continue
            estimate = exact_stationary_distribution(perturbed)
            error = np.linalg.norm(estimate - w.w) / np.linalg.norm(w.w)
            assert error <= perturbation_error_bound(delta_norm, bound_inputs) + 1e-12
            checked += 1


class TestSampleComplexity:

    def test_direct_arithmetic(self):
        mu = 1 / 45
        expected = 64 * 2.0 ** 3 / 10 / mu ** 2 / 0.5 ** 2 * (mu + 10 * mu ** 2) * math.log(2 * 10 / 0.1)
        assert rc_sample_complexity(inputs()) == math.ceil(expected)

    def test_epsilon_scaling(self):
        coarse = rc_sample_complexity(inputs(epsilon=0.5))
        fine = rc_sample_complexity(inputs(epsilon=0.25))
        assert fine / coarse == pytest.approx(4.0, rel=1e-4)

    def test_monotone(self):
        eps_grid = [0.1, 0.2, 0.4, 0.8]
        values = [rc_sample_complexity(inputs(epsilon=e)) for e in eps_grid]
        assert values == sorted(values, reverse=True)
        b_grid = [1.0, 1.5, 2.0, 4.0]
        values = [rc_sample_complexity(inputs(b=b)) for b in b_grid]
        assert values == sorted(values)


class TestRegularizedBounds:

    def test_bias_term(self):
        base = inputs(m=1000)
        g = gamma(base)
        bound = reg_rc_error_bound(inputs(m=1000, lam=g / 4))
        quadrupled = reg_rc_error_bound(inputs(m=4000, lam=g / 4))
        assert bound > 0.5
        assert quadrupled - 0.5 == pytest.approx((bound - 0.5) / 2)

    def test_vanishes(self):
        g = gamma(inputs())
        assert reg_rc_error_bound(inputs(lam=g * 1e-9, m=10 ** 15)) < 1e-3

    def test_lambda_range(self):
        g = gamma(inputs())
        with pytest.raises(LambdaOutOfRangeError):
            reg_rc_error_bound(inputs(lam=g / 2, m=100))
        with pytest.raises(LambdaOutOfRangeError):
            reg_rc_sample_complexity(inputs(lam=0.0))

    def test_bias_bound_values(self):
        assert bias_bound(0.05, 0.1) == pytest.approx(1.0)
        assert bias_bound(1e-12, 0.1) < 1e-10
        with pytest.raises(LambdaOutOfRangeError):
            bias_bound(0.1, 0.1)

    def test_bias_bound_holds_on_random_chains(self, rng, make_instance):
        for _ in range(20):
            n = int(rng.integers(2, 21))
            w, mu = make_instance(rng, n, log_spread=1.0)
            Q = true_transition_matrix(w, mu)
            g = gamma(BoundInputs.from_instance(w, mu, 0.5, 0.1))
            for lam in (g / 8, g / 4, 3 * g / 8):
                regularized = apply_regularizer(Q, lambda_regularizer(n, lam))
                shifted = exact_stationary_distribution(regularized)
                error = np.linalg.norm(shifted - w.w) / np.linalg.norm(w.w)
                assert error <= bias_bound(lam, g) + 1e-12

    def test_sample_complexity_limits(self):
        g = gamma(inputs())
        tiny = reg_rc_sample_complexity(inputs(lam=g * 1e-12))
        assert tiny / rc_sample_complexity(inputs()) == pytest.approx(68 / 64, rel=1e-4)

        lam = g / 8
        floor = 2 * lam / g
        wide = reg_rc_sample_complexity(inputs(lam=lam, epsilon=floor + 0.2))
        narrow = reg_rc_sample_complexity(inputs(lam=lam, epsilon=floor + 0.1))
        assert narrow / wide == pytest.approx(4.0, rel=1e-4)
        near_pole = reg_rc_sample_complexity(inputs(lam=lam, epsilon=floor + 1e-6))
        assert near_pole > 1e6 * wide

    def test_epsilon_floor(self):
        g = gamma(inputs())
        with pytest.raises(EpsilonTooSmallError):
            reg_rc_sample_complexity(inputs(lam=g / 4, epsilon=0.5))


class TestConcentrationIngredients:

    def test_observation_matrix(self):
        Z = observation_matrix(0, 1, 1, 3)
        assert Z[0, 1] == 1.0 and Z[0, 0] == -1.0
        np.testing.assert_array_equal(Z.sum(axis=1), np.zeros(3))

    def test_centered_norm_bound(self, rng, make_instance):
        w, mu = make_instance(rng, 6)
        Q = true_transition_matrix(w, mu).entries
        m = 50
        for i, j in [(0, 1), (2, 5), (3, 4)]:
            for y in (0, 1):
                centered = (observation_matrix(i, j, y, 6) - (Q - np.eye(6))) / m
                assert np.linalg.norm(centered, 2) < per_sample_norm_bound(m)

    def test_variance_and_failure_probabilities(self):
        assert variance_bound(inputs(m=100)) == pytest.approx(variance_bound(inputs(m=200)) * 2)
        low = rc_failure_probability(inputs(m=10 ** 5))
        high = rc_failure_probability(inputs(m=10 ** 7))
        assert 0 <= high < low <= 1
        g = gamma(inputs())
        p = reg_rc_failure_probability(inputs(lam=g / 8, epsilon=0.9, m=10 ** 8))
        assert 0 <= p <= 1

    def test_needs_m(self):
        with pytest.raises(ValueError):
            rc_failure_probability(inputs())
        with pytest.raises(ValueError):
            variance_bound(inputs())
