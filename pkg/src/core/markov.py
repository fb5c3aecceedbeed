"""
Markov chains built from comparison data.

The true chain moves from i to j with probability mu_ij * P_ij; the empirical
chain replaces that with the fraction of all comparisons in which j beat i.
Ranking scores are the stationary distribution, found by left power iteration.
"""

import logging
from dataclasses import dataclass
from functools import reduce
from math import gcd
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .errors import MaxIterationsExceeded, NotErgodicError
from .model import BtlScores, ComparisonDataset, SamplingDistribution

logger = logging.getLogger(__name__)

ZERO_TOL = 1e-15
ROW_SUM_TOL = 1e-12
DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 100000


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Row-stochastic n x n matrix. Float dust down to -1e-15 is clamped to zero."""

    entries: np.ndarray

    def __post_init__(self):
        P = np.array(self.entries, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ValueError(f"transition matrix must be square, got shape {P.shape}")
        if not np.all(np.isfinite(P)):
            raise ValueError("transition matrix entries must be finite")
        if np.any(P < -ZERO_TOL):
            raise ValueError(f"negative transition probability {P.min()!r}")
        P[P < 0] = 0.0
        row_err = np.abs(P.sum(axis=1) - 1.0).max(initial=0.0)
        if row_err > ROW_SUM_TOL:
            raise ValueError(f"rows must sum to 1 (max deviation {row_err:.3e})")
        P.setflags(write=False)
        object.__setattr__(self, 'entries', P)

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    @classmethod
    def identity(cls, n: int) -> 'TransitionMatrix':
        return cls(np.eye(n))


@dataclass(frozen=True)
class ErgodicityReport:
    strongly_connected: bool
    aperiodic: bool
    component_count: int

    @property
    def ergodic(self) -> bool:
        return self.strongly_connected and self.aperiodic


@dataclass(frozen=True)
class SolverSettings:
    """Knobs for the power-iteration eigen-solver."""

    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    squaring: bool = False

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True, eq=False)
class StationaryResult:
    distribution: np.ndarray
    iterations: int
    residual: float


def _complete_rows(off_diagonal: np.ndarray) -> np.ndarray:
    P = off_diagonal.copy()
    np.fill_diagonal(P, 0.0)
    np.fill_diagonal(P, 1.0 - P.sum(axis=1))
    return P


def true_transition_matrix(w: BtlScores, mu: SamplingDistribution) -> TransitionMatrix:
    """Q_ij = mu_ij * w_j / (w_i + w_j) off the diagonal; the diagonal completes each row."""
    if w.n != mu.n:
        raise ValueError(f"scores have n={w.n} but mu has n={mu.n}")
    weights = w.w
    P = weights[None, :] / (weights[:, None] + weights[None, :])
    return TransitionMatrix(_complete_rows(mu.mu * P))


def empirical_transition_matrix(data: ComparisonDataset) -> TransitionMatrix:
    """Q_hat_ij = C_ij / m, with C_ij the comparisons of i and j that j won. Empty data gives I."""
    n, m = data.n, data.m
    if m == 0:
        return TransitionMatrix.identity(n)
    counts = np.zeros((n, n))
    won_by_j = data.y == 1
    np.add.at(counts, (data.i[won_by_j], data.j[won_by_j]), 1.0)
    np.add.at(counts, (data.j[~won_by_j], data.i[~won_by_j]), 1.0)
    return TransitionMatrix(_complete_rows(counts / m))


def _as_array(Q) -> np.ndarray:
    return Q.entries if isinstance(Q, TransitionMatrix) else np.asarray(Q, dtype=float)


def _period(adjacency: csr_matrix) -> int:
    """Period of a strongly connected graph from BFS levels: gcd of level(u) + 1 - level(v) over edges."""
    n = adjacency.shape[0]
    order, predecessors = breadth_first_order(adjacency, 0, directed=True, return_predecessors=True)
    level = np.zeros(n, dtype=np.int64)
    for node in order[1:]:
        level[node] = level[predecessors[node]] + 1
    coo = adjacency.tocoo()
    gaps = np.abs(level[coo.row] + 1 - level[coo.col])
    return reduce(gcd, (int(g) for g in gaps if g > 0), 0)


def check_ergodicity(Q) -> ErgodicityReport:
    """Strong connectivity and aperiodicity of the graph with edge i -> j iff Q_ij > 0."""
    P = _as_array(Q)
    n = P.shape[0]
    off = P > ZERO_TOL
    diag_positive = bool(np.any(np.diag(off)))
    np.fill_diagonal(off, False)
    graph = csr_matrix(off)
    count, _ = connected_components(graph, directed=True, connection='strong')
    strongly_connected = count == 1
    if not strongly_connected:
        aperiodic = False
    elif n == 1 or diag_positive:
        aperiodic = True
    else:
        aperiodic = _period(graph) == 1
    return ErgodicityReport(strongly_connected=strongly_connected, aperiodic=aperiodic,
                            component_count=int(count))


def stationary_distribution(Q, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                            start: Optional[np.ndarray] = None, squaring: bool = False,
                            check: bool = True) -> StationaryResult:
    """
    Left power iteration with l1 renormalization.

    Starts from the uniform vector unless ``start`` is given and stops as soon as
    ||pi Q - pi||_1 <= tol. With ``squaring`` the k-th step multiplies by Q^(2^k),
    so slowly mixing chains need far fewer steps; the residual is still taken
    against Q itself.
    """
    P = _as_array(Q)
    n = P.shape[0]
    if check:
        report = check_ergodicity(P)
        if not report.ergodic:
            raise NotErgodicError(report)

    if start is None:
        pi = np.full(n, 1.0 / n)
    else:
        pi = np.asarray(start, dtype=float).copy()
        if pi.shape != (n,) or np.any(pi < 0) or not pi.sum() > 0:
            raise ValueError("start must be a nonnegative vector of length n with positive mass")
        pi /= pi.sum()

    step = P
    residual = np.inf
    for iteration in range(max_iter + 1):
        moved = pi @ P
        residual = float(np.abs(moved - pi).sum())
        if residual <= tol:
            logger.debug(f"power iteration converged after {iteration} steps (residual {residual:.3e})")
            return StationaryResult(distribution=pi, iterations=iteration, residual=residual)
        if iteration == max_iter:
            break
        if squaring and iteration > 0:
            step = step @ step
            step /= step.sum(axis=1, keepdims=True)
            nxt = pi @ step
        else:
            nxt = moved
        pi = nxt / nxt.sum()

    raise MaxIterationsExceeded(iterate=pi, residual=residual, iterations=max_iter)


def matrix_power_density(Q, t: int) -> float:
    """Fraction of entries of Q^t with magnitude below 1e-15."""
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    power = np.linalg.matrix_power(_as_array(Q), t)
    return float(np.mean(np.abs(power) < ZERO_TOL))
