"""
Ranking algorithms.

rank_centrality        stationary distribution of the empirical chain
regularized_rank_centrality  stationary distribution of Q_hat D
btl_mle                penalized maximum likelihood under the BTL model
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy.special import expit, softmax

from .markov import (SolverSettings, TransitionMatrix, check_ergodicity,
                     empirical_transition_matrix, stationary_distribution)
from .errors import NotErgodicError
from .model import ComparisonDataset, RankingResult
from .regularize import Regularizer, Side, apply_regularizer

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MleConfig:
    l2_strength: float = 0.0
    step_size: float = 0.1
    max_iter: int = 10000
    grad_tol: float = 1e-8

    def __post_init__(self):
        if not self.l2_strength >= 0:
            raise ValueError(f"l2_strength must be nonnegative, got {self.l2_strength}")
        if not self.step_size > 0:
            raise ValueError(f"step_size must be positive, got {self.step_size}")
        if not self.grad_tol > 0:
            raise ValueError(f"grad_tol must be positive, got {self.grad_tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


def _solve(chain: TransitionMatrix, algorithm: str, params: dict,
           solver: Optional[SolverSettings]) -> RankingResult:
    solver = solver or SolverSettings()
    report = check_ergodicity(chain)
    if not report.ergodic:
        raise NotErgodicError(report)
    result = stationary_distribution(chain, tol=solver.tol, max_iter=solver.max_iter,
                                     squaring=solver.squaring, check=False)
    logger.debug(f"{algorithm} {params} solved in {result.iterations} iterations")
    return RankingResult.from_scores(result.distribution, algorithm, params,
                                     iterations=result.iterations, converged=True)


def rank_centrality(data: ComparisonDataset, solver: Optional[SolverSettings] = None) -> RankingResult:
    """Leading left eigenvector of the empirical chain. Raises NotErgodicError when it has none unique."""
    return _solve(empirical_transition_matrix(data), 'rank_centrality', {}, solver)


def regularized_rank_centrality(data: ComparisonDataset, D: Regularizer,
                                solver: Optional[SolverSettings] = None,
                                side: Union[Side, str] = Side.RIGHT) -> RankingResult:
    """Leading left eigenvector of Q_hat D."""
    if data.n != D.n:
        raise ValueError(f"dataset has n={data.n} but regularizer has n={D.n}")
    chain = apply_regularizer(empirical_transition_matrix(data), D, side=side)
    params = dict(D.params)
    params['kind'] = D.kind.value
    return _solve(chain, 'regularized_rank_centrality', params, solver)


def lambda_schedule(eta: float, m: int) -> float:
    """lambda = eta / sqrt(m), clamped to 1."""
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return float(min(eta / np.sqrt(m), 1.0))


def _margins(v: np.ndarray, data: ComparisonDataset) -> Tuple[np.ndarray, np.ndarray]:
    sign = 2.0 * data.y - 1.0
    return sign, sign * (v[data.j] - v[data.i])


def mle_objective_and_gradient(v: np.ndarray, data: ComparisonDataset,
                               l2_strength: float) -> Tuple[float, np.ndarray]:
    """
    Penalized BTL log-likelihood and its gradient.

    Each record contributes log sigmoid(s (v_j - v_i)) with s = 2y - 1, so the
    winner's parameter is pushed up. The penalty is l2_strength * ||v||^2.
    """
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("v must be finite")
    sign, margin = _margins(v, data)
    objective = -np.logaddexp(0.0, -margin).sum() - l2_strength * float(v @ v)
    # d/dmargin log sigmoid(margin) = sigmoid(-margin)
    weight = sign * expit(-margin)
    grad = np.zeros_like(v)
    np.add.at(grad, data.j, weight)
    np.add.at(grad, data.i, -weight)
    grad -= 2.0 * l2_strength * v
    return float(objective), grad


def curvature_bound(data: ComparisonDataset, l2_strength: float) -> float:
    """Gershgorin bound on the Hessian norm of the penalized log-likelihood."""
    counts = np.bincount(np.concatenate([data.i, data.j]), minlength=data.n)
    return counts.max(initial=0) / 2.0 + 2.0 * l2_strength


def btl_mle(data: ComparisonDataset, config: Optional[MleConfig] = None) -> RankingResult:
    """
    Gradient ascent from v = 0; scores are the normalized exp(v).

    The step is step_size, capped at 1 / L where L = max_k c_k / 2 + 2 l2_strength
    bounds the curvature (c_k is the number of comparisons item k took part in).
    """
    config = config or MleConfig()
    if data.m == 0 and config.l2_strength == 0:
        raise ValueError("unregularized MLE is undefined on an empty dataset")

    step = min(config.step_size, 1.0 / curvature_bound(data, config.l2_strength))
    v = np.zeros(data.n)
    converged = False
    iteration = 0
    for iteration in range(1, config.max_iter + 1):
        _, grad = mle_objective_and_gradient(v, data, config.l2_strength)
        if np.abs(grad).max(initial=0.0) <= config.grad_tol:
            converged = True
            break
        v = v + step * grad
        if config.l2_strength == 0:
            v -= v.mean()

    if not converged:
        logger.info(f"btl_mle stopped at max_iter={config.max_iter} without reaching grad_tol")
    params = {'l2_strength': config.l2_strength}
    return RankingResult.from_scores(softmax(v), 'btl_mle', params,
                                     iterations=iteration, converged=converged)
