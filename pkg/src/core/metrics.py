"""Evaluation metrics for estimated score vectors."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import kendalltau

from .errors import DegenerateInputError
from .model import ComparisonDataset

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MetricRow:
    kendall_tau: Optional[float] = None
    l2_rel_err: Optional[float] = None
    test_err: Optional[float] = None

    def __post_init__(self):
        if self.kendall_tau is not None and not -1.0 - 1e-12 <= self.kendall_tau <= 1.0 + 1e-12:
            raise ValueError(f"kendall_tau out of [-1, 1]: {self.kendall_tau}")
        if self.l2_rel_err is not None and self.l2_rel_err < 0:
            raise ValueError(f"l2_rel_err must be nonnegative: {self.l2_rel_err}")
        if self.test_err is not None and not 0.0 <= self.test_err <= 1.0:
            raise ValueError(f"test_err out of [0, 1]: {self.test_err}")


def kendall_tau_b(alpha: np.ndarray, beta: np.ndarray) -> float:
    """Kendall's tau-b. Pairs tied in both vectors count toward no term."""
    alpha = np.asarray(alpha, dtype=float).ravel()
    beta = np.asarray(beta, dtype=float).ravel()
    if alpha.size != beta.size:
        raise ValueError(f"length mismatch: {alpha.size} vs {beta.size}")
    if alpha.size < 2:
        raise DegenerateInputError("kendall tau needs at least 2 items")
    if np.all(alpha == alpha[0]) or np.all(beta == beta[0]):
        raise DegenerateInputError("kendall tau is undefined for a constant vector")
    tau = kendalltau(alpha, beta, variant='b')[0]
    if np.isnan(tau):
        raise DegenerateInputError("kendall tau denominator is zero")
    return float(tau)


def relative_l2_error(estimate: np.ndarray, truth: np.ndarray) -> float:
    """||estimate - truth|| / ||truth|| after l1-normalizing both."""
    estimate = np.asarray(estimate, dtype=float).ravel()
    truth = np.asarray(truth, dtype=float).ravel()
    if estimate.size != truth.size:
        raise ValueError(f"length mismatch: {estimate.size} vs {truth.size}")
    if not np.any(truth != 0) or truth.sum() == 0:
        raise DegenerateInputError("truth vector must be nonzero")
    if estimate.sum() == 0:
        raise DegenerateInputError("estimate vector must have nonzero mass")
    estimate = estimate / estimate.sum()
    truth = truth / truth.sum()
    return float(np.linalg.norm(estimate - truth) / np.linalg.norm(truth))


def pairwise_test_error(scores: np.ndarray, test: ComparisonDataset) -> float:
    """Fraction of test records whose winner scored lower; tied scores count 1/2."""
    if test.m == 0:
        raise DegenerateInputError("test set is empty")
    scores = np.asarray(scores, dtype=float).ravel()
    winner = np.where(test.y == 1, test.j, test.i)
    loser = np.where(test.y == 1, test.i, test.j)
    diff = scores[winner] - scores[loser]
    errors = np.where(diff < 0, 1.0, np.where(diff == 0, 0.5, 0.0))
    return float(errors.mean())


def evaluate(scores: np.ndarray, truth: Optional[np.ndarray] = None,
             test: Optional[ComparisonDataset] = None) -> MetricRow:
    """Every metric whose reference is supplied. Kendall tau needs the truth."""
    tau = err = test_err = None
    if truth is not None:
        tau = kendall_tau_b(scores, truth)
        err = relative_l2_error(scores, truth)
    if test is not None:
        test_err = pairwise_test_error(scores, test)
    return MetricRow(kendall_tau=tau, l2_rel_err=err, test_err=test_err)
