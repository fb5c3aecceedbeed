"""
Closed-form guarantees for spectral ranking, plus dense oracles to check them.

Every calculator takes a validated BoundInputs. Calculators with a hypothesis
(a range for lambda or epsilon, a small perturbation) raise a
HypothesisViolatedError subclass outside it instead of returning a number
that no longer means anything.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EpsilonTooSmallError, HypothesisViolatedError, LambdaOutOfRangeError
from .markov import TransitionMatrix
from .model import BtlScores, SamplingDistribution

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class BoundInputs:
    n: int
    b: float
    mu_min: float
    mu_max: float
    epsilon: float
    delta: float
    lam: float = 0.0
    m: Optional[int] = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if not self.b >= 1:
            raise ValueError(f"b must be >= 1, got {self.b}")
        if not 0 < self.mu_min <= self.mu_max <= 1:
            raise ValueError(f"need 0 < mu_min <= mu_max <= 1, got {self.mu_min}, {self.mu_max}")
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if not 0 <= self.lam <= 1:
            raise ValueError(f"lambda must lie in [0, 1], got {self.lam}")
        if self.m is not None and self.m < 0:
            raise ValueError(f"m must be nonnegative, got {self.m}")

    @classmethod
    def from_instance(cls, w: BtlScores, mu: SamplingDistribution, epsilon: float, delta: float,
                      lam: float = 0.0, m: Optional[int] = None) -> 'BoundInputs':
        return cls(n=w.n, b=w.b, mu_min=mu.mu_min, mu_max=mu.mu_max,
                   epsilon=epsilon, delta=delta, lam=lam, m=m)

    @property
    def pair_load(self) -> float:
        """mu_max + n mu_max^2, the sampling term shared by every concentration bound."""
        return self.mu_max + self.n * self.mu_max ** 2

    @property
    def log_term(self) -> float:
        return math.log(2 * self.n / self.delta)


def spectral_gap_lower_bound(inputs: BoundInputs) -> float:
    """Lower bound n mu_min / (2b) on the spectral gap of the true chain."""
    return inputs.n * inputs.mu_min / (2.0 * inputs.b)


def gamma(inputs: BoundInputs) -> float:
    return inputs.n * inputs.mu_min / (2.0 * (1.0 + SQRT2) * inputs.b ** 1.5)


def perturbation_threshold(inputs: BoundInputs) -> float:
    return inputs.n * inputs.mu_min / (2.0 * inputs.b ** 1.5)


def perturbation_error_bound(delta_norm: float, inputs: BoundInputs) -> float:
    """Relative error of the stationary distribution after perturbing Q by a matrix of norm delta_norm."""
    if delta_norm < 0:
        raise ValueError(f"delta_norm must be nonnegative, got {delta_norm}")
    threshold = perturbation_threshold(inputs)
    if not delta_norm < threshold:
        raise HypothesisViolatedError(
            f"perturbation norm {delta_norm} must be below n*mu_min/(2b^1.5) = {threshold}")
    scaled = 2.0 * delta_norm * inputs.b ** 1.5
    return scaled / (inputs.n * inputs.mu_min - scaled)


def rc_sample_complexity(inputs: BoundInputs) -> int:
    """Comparisons sufficient for RankCentrality to reach relative error epsilon w.p. 1 - delta."""
    value = (64.0 * inputs.b ** 3 / inputs.n / inputs.mu_min ** 2 / inputs.epsilon ** 2
             * inputs.pair_load * inputs.log_term)
    return int(math.ceil(value))


def _require_lambda(inputs: BoundInputs) -> float:
    g = gamma(inputs)
    if not 0 < inputs.lam < g / 2:
        raise LambdaOutOfRangeError(f"lambda must lie in (0, gamma/2) = (0, {g / 2}), got {inputs.lam}")
    return g


def reg_rc_error_bound(inputs: BoundInputs) -> float:
    """Bias term 2 lambda / gamma plus the concentration term of lambda-regularized RankCentrality."""
    g = _require_lambda(inputs)
    if inputs.m is None or inputs.m < 1:
        raise ValueError("the error bound needs m >= 1")
    bias = 2.0 * inputs.lam / g
    variance = math.sqrt(68.0 * (1.0 - inputs.lam) * inputs.b ** 3 * inputs.pair_load
                         / (inputs.n * inputs.mu_min ** 2 * inputs.m) * inputs.log_term)
    return bias + variance


def bias_bound(lam: float, gamma_val: float) -> float:
    """lambda / (gamma - lambda): distance between the stationary laws of Q and Q D_lambda."""
    if not 0 < lam < gamma_val:
        raise LambdaOutOfRangeError(f"lambda must lie in (0, gamma) = (0, {gamma_val}), got {lam}")
    return lam / (gamma_val - lam)


def reg_rc_sample_complexity(inputs: BoundInputs) -> int:
    g = _require_lambda(inputs)
    floor = 2.0 * inputs.lam / g
    if not inputs.epsilon > floor:
        raise EpsilonTooSmallError(f"epsilon must exceed 2*lambda/gamma = {floor}, got {inputs.epsilon}")
    value = (68.0 * (1.0 - inputs.lam) * inputs.b ** 3 * inputs.pair_load
             / (inputs.n * inputs.mu_min ** 2 * (inputs.epsilon - floor) ** 2) * inputs.log_term)
    return int(math.ceil(value))


# Concentration ingredients

def observation_matrix(i: int, j: int, y: int, n: int) -> np.ndarray:
    """Centered contribution of one record: Q_hat = I + (1/m) * sum of these."""
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise ValueError(f"invalid pair ({i}, {j}) for n={n}")
    winner, loser = (j, i) if y == 1 else (i, j)
    Z = np.zeros((n, n))
    Z[loser, winner] = 1.0
    Z[loser, loser] = -1.0
    return Z


def per_sample_norm_bound(m: int) -> float:
    """Each centered, scaled observation (Q_k - (Q - I)) / m has spectral norm below 3/m."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return 3.0 / m


def variance_bound(inputs: BoundInputs) -> float:
    if inputs.m is None or inputs.m < 1:
        raise ValueError("the variance bound needs m >= 1")
    return (4.0 * (inputs.n - 1) * inputs.mu_max + 4.0 * inputs.n ** 2 * inputs.mu_max ** 2) / inputs.m


def rc_failure_probability(inputs: BoundInputs) -> float:
    """Upper bound on P(relative error >= epsilon) for RankCentrality after m comparisons."""
    if inputs.m is None:
        raise ValueError("the failure probability needs m")
    eps = inputs.epsilon
    exponent = (-(inputs.mu_min ** 2) * eps ** 2 * inputs.n * inputs.m
                / (16.0 * inputs.b ** 3 * (1.0 + eps) ** 2 * inputs.pair_load))
    return min(1.0, 2.0 * inputs.n * math.exp(exponent))


def reg_rc_failure_probability(inputs: BoundInputs) -> float:
    """Upper bound on P(relative error >= epsilon) for lambda-regularized RankCentrality."""
    g = _require_lambda(inputs)
    if not inputs.epsilon > 2.0 * inputs.lam / g:
        raise EpsilonTooSmallError(f"epsilon must exceed 2*lambda/gamma = {2.0 * inputs.lam / g}")
    if inputs.m is None:
        raise ValueError("the failure probability needs m")
    n, b, lam = inputs.n, inputs.b, inputs.lam
    margin = n * inputs.mu_min * inputs.epsilon - 4.0 * (1.0 + SQRT2) * b ** 1.5 * lam
    denom = (16.0 * b ** 3 * (1.0 - lam) ** 2
             * (4.0 * (n - 1) * inputs.mu_max + 4.0 * n ** 2 * inputs.mu_max ** 2)
             + 4.0 * b ** 1.5 * (1.0 - lam) * margin)
    return min(1.0, 2.0 * n * math.exp(-margin ** 2 * inputs.m / denom))


# Dense oracles for small chains

def exact_stationary_distribution(Q) -> np.ndarray:
    """Solve (Q^T - I) pi = 0 with sum(pi) = 1 by a direct linear solve."""
    P = Q.entries if isinstance(Q, TransitionMatrix) else np.asarray(Q, dtype=float)
    n = P.shape[0]
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    return np.linalg.solve(A, rhs)


def reversible_spectral_gap(Q, w: np.ndarray) -> float:
    """1 minus the second-largest eigenvalue of a chain reversible with respect to w."""
    P = Q.entries if isinstance(Q, TransitionMatrix) else np.asarray(Q, dtype=float)
    root = np.sqrt(np.asarray(w, dtype=float))
    S = root[:, None] * P / root[None, :]
    S = 0.5 * (S + S.T)
    eigenvalues = np.linalg.eigvalsh(S)
    return float(1.0 - eigenvalues[-2])
