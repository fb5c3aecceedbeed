"""
Domain types and synthetic generators for pairwise-comparison ranking.

Scores follow the Bradley-Terry-Luce convention: item j beats item i with
probability w_j / (w_i + w_j). Datasets store records with i < j and y = 1
meaning j won.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

NORMALIZATION_TOL = 1e-12
ArrayLike = Union[Sequence[float], np.ndarray]


def _as_rng(seed: Union[int, np.random.Generator]) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True, eq=False)
class BtlScores:
    """Positive score vector normalized to sum to one."""

    w: np.ndarray
    b: float = field(init=False)

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float).ravel()
        if w.size < 1:
            raise ValueError("scores must contain at least one item")
        if not np.all(np.isfinite(w)):
            raise ValueError("scores must be finite")
        if np.any(w <= 0):
            raise ValueError("scores must be strictly positive")
        w = w / w.sum()
        w.setflags(write=False)
        object.__setattr__(self, 'w', w)
        object.__setattr__(self, 'b', float(w.max() / w.min()))

    @property
    def n(self) -> int:
        return int(self.w.size)

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True, eq=False)
class SamplingDistribution:
    """Symmetric probability mass over unordered item pairs."""

    mu: np.ndarray

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float)
        if mu.ndim != 2 or mu.shape[0] != mu.shape[1] or mu.shape[0] < 2:
            raise ValueError(f"mu must be a square matrix with n >= 2, got shape {mu.shape}")
        if not np.all(np.isfinite(mu)) or np.any(mu < 0):
            raise ValueError("mu entries must be finite and nonnegative")
        if not np.array_equal(mu, mu.T):
            raise ValueError("mu must be symmetric")
        if np.any(np.diag(mu) != 0):
            raise ValueError("mu must have a zero diagonal")
        total = mu[np.triu_indices(mu.shape[0], k=1)].sum()
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"mu must sum to 1 over unordered pairs, got {total!r}")
        mu.setflags(write=False)
        object.__setattr__(self, 'mu', mu)

    @property
    def n(self) -> int:
        return int(self.mu.shape[0])

    def pair_masses(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Upper-triangle pairs (i, j) and their masses."""
        i, j = np.triu_indices(self.n, k=1)
        return i, j, self.mu[i, j]

    @property
    def mu_min(self) -> float:
        return float(self.pair_masses()[2].min())

    @property
    def mu_max(self) -> float:
        return float(self.pair_masses()[2].max())

    @classmethod
    def from_pair_weights(cls, n: int, weights: Dict[Tuple[int, int], float]) -> 'SamplingDistribution':
        """Build mu from unnormalized weights keyed by (i, j)."""
        mu = np.zeros((n, n))
        for (i, j), value in weights.items():
            if i == j:
                raise ValueError("pairs must join distinct items")
            mu[i, j] = mu[j, i] = value
        total = mu[np.triu_indices(n, k=1)].sum()
        if total <= 0:
            raise ValueError("pair weights must have positive total")
        return cls(mu / total)


@dataclass(frozen=True, eq=False)
class ComparisonDataset:
    """Canonical comparison records: rows (i, j, y) with i < j, y = 1 when j won."""

    n: int
    records: np.ndarray

    def __post_init__(self):
        records = np.asarray(self.records, dtype=np.int64)
        if records.size == 0:
            records = np.zeros((0, 3), dtype=np.int64)
        if records.ndim != 2 or records.shape[1] != 3:
            raise ValueError(f"records must have shape (m, 3), got {records.shape}")
        if self.n < 2:
            raise ValueError(f"a dataset needs at least 2 items, got n={self.n}")
        i, j, y = records[:, 0], records[:, 1], records[:, 2]
        if np.any(i < 0) or np.any(j >= self.n) or np.any(i >= j):
            raise ValueError("records must satisfy 0 <= i < j < n")
        if np.any((y != 0) & (y != 1)):
            raise ValueError("outcomes must be 0 or 1")
        records = records.copy()
        records.setflags(write=False)
        object.__setattr__(self, 'n', int(self.n))
        object.__setattr__(self, 'records', records)

    @property
    def m(self) -> int:
        return int(self.records.shape[0])

    def __len__(self) -> int:
        return self.m

    @property
    def i(self) -> np.ndarray:
        return self.records[:, 0]

    @property
    def j(self) -> np.ndarray:
        return self.records[:, 1]

    @property
    def y(self) -> np.ndarray:
        return self.records[:, 2]

    @classmethod
    def from_records(cls, n: int, rows: Iterable[Sequence[int]]) -> 'ComparisonDataset':
        """Build a dataset from rows of any orientation, swapping i > j and flipping y."""
        arr = np.asarray(list(rows), dtype=np.int64).reshape(-1, 3)
        i, j, y = arr[:, 0].copy(), arr[:, 1].copy(), arr[:, 2].copy()
        if np.any(i == j):
            raise ValueError("self-comparison records are not allowed")
        swap = i > j
        i[swap], j[swap] = arr[swap, 1], arr[swap, 0]
        y[swap] = 1 - y[swap]
        return cls(n, np.column_stack([i, j, y]))

    def subset(self, indices: np.ndarray) -> 'ComparisonDataset':
        return ComparisonDataset(self.n, self.records[np.asarray(indices, dtype=np.int64)])


@dataclass(frozen=True, eq=False)
class FeatureSet:
    """n feature vectors of dimension d."""

    x: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        if x.ndim != 2 or x.shape[1] < 1 or x.shape[0] < 1:
            raise ValueError(f"features must be an (n, d) array with d >= 1, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError("features must be finite")
        x.setflags(write=False)
        object.__setattr__(self, 'x', x)

    @property
    def n(self) -> int:
        return int(self.x.shape[0])

    @property
    def d(self) -> int:
        return int(self.x.shape[1])


def ranking_from_scores(scores: np.ndarray) -> np.ndarray:
    """Items by descending score; ties go to the smaller index."""
    scores = np.asarray(scores, dtype=float)
    return np.lexsort((np.arange(scores.size), -scores))


@dataclass(frozen=True, eq=False)
class RankingResult:
    """Estimated scores plus the metadata of the run that produced them."""

    scores: np.ndarray
    ranking: np.ndarray
    algorithm: str
    params: Dict[str, float] = field(default_factory=dict)
    iterations: int = 0
    converged: bool = True

    @classmethod
    def from_scores(cls, scores: np.ndarray, algorithm: str,
                    params: Optional[Dict[str, float]] = None,
                    iterations: int = 0, converged: bool = True) -> 'RankingResult':
        scores = np.clip(np.asarray(scores, dtype=float), 0.0, None)
        total = scores.sum()
        if not total > 0:
            raise ValueError("scores must have positive mass")
        scores = scores / total
        return cls(scores=scores, ranking=ranking_from_scores(scores), algorithm=algorithm,
                   params=dict(params or {}), iterations=int(iterations), converged=bool(converged))

    @property
    def n(self) -> int:
        return int(self.scores.size)


def comparison_probability(w: Union[BtlScores, ArrayLike], i: int, j: int) -> float:
    """Probability that j is preferred over i: w_j / (w_i + w_j)."""
    weights = w.w if isinstance(w, BtlScores) else np.asarray(w, dtype=float)
    n = weights.size
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"items ({i}, {j}) out of range for n={n}")
    if i == j:
        raise ValueError("comparison needs two distinct items")
    return float(weights[j] / (weights[i] + weights[j]))


def sample_comparisons(w: BtlScores, mu: SamplingDistribution, m: int,
                       seed: Union[int, np.random.Generator]) -> ComparisonDataset:
    """Draw m i.i.d. pairs from mu and a BTL outcome for each."""
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    if w.n != mu.n:
        raise ValueError(f"scores have n={w.n} but mu has n={mu.n}")
    rng = _as_rng(seed)
    pi, pj, mass = mu.pair_masses()
    picks = rng.choice(pi.size, size=m, p=mass / mass.sum())
    i, j = pi[picks], pj[picks]
    p_j = w.w[j] / (w.w[i] + w.w[j])
    y = (rng.random(m) < p_j).astype(np.int64)
    return ComparisonDataset(w.n, np.column_stack([i, j, y]))


def uniform_mu(n: int) -> SamplingDistribution:
    if n < 2:
        raise ValueError(f"uniform sampling needs n >= 2, got {n}")
    pairs = n * (n - 1) / 2
    mu = np.full((n, n), 1.0 / pairs)
    np.fill_diagonal(mu, 0.0)
    return SamplingDistribution(mu)


def scores_from_log(v: np.ndarray) -> BtlScores:
    """Scores w_i proportional to exp(v_i), shifted by the max for stability."""
    v = np.asarray(v, dtype=float)
    return BtlScores(np.exp(v - v.max()))


def scores_random_exp(n: int, seed: Union[int, np.random.Generator], high: float = 5.0) -> BtlScores:
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    rng = _as_rng(seed)
    return scores_from_log(rng.uniform(0.0, high, size=n))


def scores_linear(n: int) -> BtlScores:
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return BtlScores(np.arange(1, n + 1, dtype=float))


def scores_from_cardinal(values: ArrayLike) -> BtlScores:
    """BTL scores from average cardinal ratings, w_i proportional to exp(rating_i)."""
    values = np.asarray(values, dtype=float).ravel()
    if values.size < 2 or not np.all(np.isfinite(values)):
        raise ValueError("cardinal ratings must be finite with at least 2 items")
    return scores_from_log(values)


def generate_experiment_a(seed: Union[int, np.random.Generator], n: int = 1600) -> Tuple[FeatureSet, BtlScores]:
    """Two-dimensional features on [0, 4]^2 with a mix of periodic and smooth score terms."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    rng = _as_rng(seed)
    x = rng.uniform(0.0, 4.0, size=(n, 2))
    omega = rng.standard_normal(size=(4, 2))
    proj = x @ omega.T
    raw = np.exp(np.cos(5.0 * proj[:, :2])).sum(axis=1) + np.exp(proj[:, 2:] / 10.0).sum(axis=1)
    return FeatureSet(x), BtlScores(raw)


def generate_experiment_b(seed: Union[int, np.random.Generator], n: int = 1000) -> Tuple[FeatureSet, BtlScores]:
    """Scalar features on [0, 4] with scores exp(cos(5 omega x))."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    rng = _as_rng(seed)
    x = rng.uniform(0.0, 4.0, size=n)
    omega = rng.standard_normal()
    raw = np.exp(np.cos(5.0 * omega * x))
    return FeatureSet(x.reshape(-1, 1)), BtlScores(raw)


def generate_clustered(n_clusters: int, cluster_size: int, separation: float = 1000.0,
                       seed: Union[int, np.random.Generator] = 0,
                       score_spread: float = 5.0) -> Tuple[FeatureSet, BtlScores]:
    """Tight clusters on a line; every member of a cluster shares features and score."""
    if n_clusters < 1 or cluster_size < 1:
        raise ValueError("n_clusters and cluster_size must be >= 1")
    if n_clusters * cluster_size < 2:
        raise ValueError("clustered instance needs at least 2 items")
    if not separation > 0:
        raise ValueError(f"separation must be positive, got {separation}")
    rng = _as_rng(seed)
    centers = separation * np.arange(n_clusters, dtype=float)
    cluster_scores = np.exp(rng.uniform(0.0, score_spread, size=n_clusters))
    # resample until every cluster has its own score
    while np.unique(cluster_scores).size < n_clusters:
        cluster_scores = np.exp(rng.uniform(0.0, score_spread, size=n_clusters))
    labels = np.repeat(np.arange(n_clusters), cluster_size)
    return FeatureSet(centers[labels].reshape(-1, 1)), BtlScores(cluster_scores[labels])
