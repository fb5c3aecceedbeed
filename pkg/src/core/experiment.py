"""
Seeded experiment harness.

Each trial draws one comparison dataset and runs every configured algorithm
on it, so all algorithms in a trial see byte-identical data. Trial t uses
seed base_seed + t. Rows are sorted before they are emitted, which keeps the
output independent of how many worker processes ran the trials.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..extractors.comparison_parser import read_cardinal, read_features, read_scores
from ..utils import derive_seed, format_float
from .data_manager import DataManager, sweep_frame
from .errors import ConfigError, DegenerateInputError, MaxIterationsExceeded, NotErgodicError
from .markov import SolverSettings, empirical_transition_matrix, matrix_power_density
from .metrics import MetricRow, kendall_tau_b, pairwise_test_error, relative_l2_error
from .model import (BtlScores, ComparisonDataset, FeatureSet, RankingResult, SamplingDistribution,
                    generate_clustered, generate_experiment_a, generate_experiment_b,
                    sample_comparisons, scores_from_cardinal, scores_linear, scores_random_exp,
                    uniform_mu)
from .rank import (MleConfig, btl_mle, lambda_schedule, rank_centrality,
                   regularized_rank_centrality)
from .regularize import (Regularizer, apply_regularizer, decayed_mix, diffusion_regularizer,
                         lambda_regularizer)
from .run_config import DEFAULT_SIGMA_GRID, RunConfig

logger = logging.getLogger(__name__)

ALGORITHM_KINDS = ('rc', 'lambda_rc', 'eta_rc', 'diffusion_rc', 'decayed_diffusion_rc', 'btl_mle')
_PARAM_NAMES = {
    'lambda_rc': 'lambda',
    'eta_rc': 'eta',
    'diffusion_rc': 'sigma',
    'decayed_diffusion_rc': 'sigma',
    'btl_mle': 'l2',
}
SPLIT_STREAM = 1


@dataclass(frozen=True)
class AlgorithmSpec:
    kind: str
    value: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ALGORITHM_KINDS:
            raise ValueError(f"unknown algorithm kind {self.kind!r}")
        if self.kind == 'rc' and self.value is not None:
            raise ValueError("rc takes no parameter")
        if self.kind != 'rc' and self.value is None:
            raise ValueError(f"{self.kind} needs a parameter value")

    @property
    def label(self) -> str:
        return self.kind

    @property
    def params(self) -> str:
        if self.kind == 'rc':
            return ''
        return f"{_PARAM_NAMES[self.kind]}={format_float(self.value)}"

    @property
    def needs_features(self) -> bool:
        return self.kind in ('diffusion_rc', 'decayed_diffusion_rc')


@dataclass(frozen=True)
class TrialRow:
    m: int
    trial: int
    algorithm: str
    base_params: str
    metrics: MetricRow
    failed: bool = False
    iterations: int = 0
    converged: bool = True

    @property
    def params(self) -> str:
        markers = [self.base_params] if self.base_params else []
        if self.failed:
            markers.append("failed=true")
        elif not self.converged:
            markers.append("converged=false")
        return ";".join(markers)

    def sort_key(self) -> Tuple[int, int, str, str]:
        return (self.m, self.trial, self.algorithm, self.base_params)


@dataclass
class SweepResult:
    rows: List[TrialRow]
    aggregate: pd.DataFrame
    density: Optional[List[Dict[str, object]]] = None
    paths: Dict[str, object] = field(default_factory=dict)


def algorithms_from_config(config: RunConfig) -> List[AlgorithmSpec]:
    specs = [AlgorithmSpec('rc')] if config.include_rc else []
    specs += [AlgorithmSpec('eta_rc', float(v)) for v in config.eta_grid]
    specs += [AlgorithmSpec('lambda_rc', float(v)) for v in config.lambda_grid]
    specs += [AlgorithmSpec('diffusion_rc', float(v)) for v in config.sigma_grid]
    specs += [AlgorithmSpec('decayed_diffusion_rc', float(v)) for v in config.decayed_sigma_grid]
    specs += [AlgorithmSpec('btl_mle', float(v)) for v in config.mle_l2_grid]
    return specs


def build_instance(config: RunConfig) -> Tuple[BtlScores, Optional[FeatureSet]]:
    """Ground-truth scores and optional features described by the config."""
    kind = config.generator
    features = None
    if kind == 'random':
        truth = scores_random_exp(config.n, config.generator_seed)
    elif kind == 'linear':
        truth = scores_linear(config.n)
    elif kind == 'exp-a':
        features, truth = generate_experiment_a(config.generator_seed, config.n)
    elif kind == 'exp-b':
        features, truth = generate_experiment_b(config.generator_seed, config.n)
    elif kind == 'clustered':
        features, truth = generate_clustered(config.n_clusters, config.cluster_size,
                                             config.separation, config.generator_seed,
                                             config.score_spread)
    elif kind == 'file':
        truth = BtlScores(read_scores(config.truth_path))
    elif kind == 'cardinal':
        truth = scores_from_cardinal(read_cardinal(config.cardinal_path))
    else:
        raise ConfigError('generator', f"unsupported generator {kind!r}")

    if kind in ('file', 'cardinal') and config.features_path:
        features = read_features(config.features_path)
    if features is not None and features.n != truth.n:
        raise ConfigError('features_path', f"features cover {features.n} items but truth has {truth.n}")
    return truth, features


def _snap_ceil(value: float) -> int:
    nearest = round(value)
    if math.isclose(value, nearest, rel_tol=0.0, abs_tol=1e-9):
        return int(nearest)
    return int(math.ceil(value))


def split_dataset(data: ComparisonDataset, test_fraction: float,
                  seed: int) -> Tuple[ComparisonDataset, ComparisonDataset]:
    """Random record-level split into ceil(m(1 - f)) training records and the rest."""
    if not 0 <= test_fraction < 1:
        raise ValueError(f"test_fraction must lie in [0, 1), got {test_fraction}")
    m = data.m
    n_train = min(m, _snap_ceil(m * (1.0 - test_fraction)))
    order = np.random.default_rng(seed).permutation(m)
    train = data.subset(np.sort(order[:n_train]))
    test = data.subset(np.sort(order[n_train:]))
    return train, test


def _kendall_or_zero(scores: np.ndarray, truth: np.ndarray) -> Optional[float]:
    # constant estimates have no concordant or discordant pairs
    if np.all(scores == scores[0]):
        return 0.0
    try:
        return kendall_tau_b(scores, truth)
    except DegenerateInputError:
        return None


def _run_algorithm(spec: AlgorithmSpec, train: ComparisonDataset, features: Optional[FeatureSet],
                   kernels: Dict[float, Regularizer], solver: SolverSettings,
                   mle: MleConfig) -> RankingResult:
    n = train.n
    if spec.kind == 'rc':
        return rank_centrality(train, solver)
    if spec.kind == 'lambda_rc':
        return regularized_rank_centrality(train, lambda_regularizer(n, spec.value), solver)
    if spec.kind == 'eta_rc':
        lam = lambda_schedule(spec.value, max(train.m, 1))
        return regularized_rank_centrality(train, lambda_regularizer(n, lam), solver)
    if spec.kind == 'btl_mle':
        config = MleConfig(l2_strength=spec.value, step_size=mle.step_size,
                           max_iter=mle.max_iter, grad_tol=mle.grad_tol)
        return btl_mle(train, config)

    if features is None:
        raise ValueError(f"{spec.kind} needs features")
    kernel = kernels.get(spec.value)
    if kernel is None:
        kernel = diffusion_regularizer(features, spec.value)
        kernels[spec.value] = kernel
    if spec.kind == 'diffusion_rc':
        return regularized_rank_centrality(train, kernel, solver)
    return regularized_rank_centrality(train, decayed_mix(kernel, max(train.m, 1)), solver)


def run_trial(truth: BtlScores, features: Optional[FeatureSet], mu: SamplingDistribution, m: int,
              algorithms: Sequence[AlgorithmSpec], seed: int, trial: int = 0,
              test_fraction: float = 0.0, solver: Optional[SolverSettings] = None,
              mle: Optional[MleConfig] = None,
              kernels: Optional[Dict[float, Regularizer]] = None) -> List[TrialRow]:
    """Draw one dataset and evaluate every algorithm on it. Failures fall back to uniform scores."""
    if features is not None and features.n != truth.n:
        raise ValueError(f"features cover {features.n} items but truth has {truth.n}")
    if any(spec.needs_features for spec in algorithms) and features is None:
        raise ValueError("diffusion algorithms need features")
    solver = solver or SolverSettings()
    mle = mle or MleConfig()
    kernels = {} if kernels is None else kernels

    data = sample_comparisons(truth, mu, m, seed)
    test = None
    train = data
    if test_fraction > 0:
        train, test = split_dataset(data, test_fraction, derive_seed(seed, SPLIT_STREAM))
        if test.m == 0:
            test = None

    rows = []
    for spec in algorithms:
        failed = False
        converged = True
        iterations = 0
        try:
            result = _run_algorithm(spec, train, features, kernels, solver, mle)
            scores = result.scores
            iterations = result.iterations
            converged = result.converged
            if not converged:
                logger.warning(f"m={m} trial={trial} {spec.label} {spec.params}: stopped after "
                               f"{iterations} iterations without converging")
        except NotErgodicError as e:
            logger.info(f"m={m} trial={trial} {spec.label} {spec.params}: {e}; using uniform scores")
            failed = True
        except MaxIterationsExceeded as e:
            logger.warning(f"m={m} trial={trial} {spec.label} {spec.params}: {e}; using uniform scores")
            failed = True
            iterations = e.iterations
        if failed:
            scores = np.full(truth.n, 1.0 / truth.n)

        metrics = MetricRow(
            kendall_tau=_kendall_or_zero(scores, truth.w),
            l2_rel_err=relative_l2_error(scores, truth.w),
            test_err=pairwise_test_error(scores, test) if test is not None else None,
        )
        rows.append(TrialRow(m=m, trial=trial, algorithm=spec.label, base_params=spec.params,
                             metrics=metrics, failed=failed, iterations=iterations,
                             converged=converged))
    return rows


def density_report(truth: BtlScores, features: FeatureSet, mu: SamplingDistribution, m: int,
                   sigma_grid: Sequence[float], power: int, seed: int) -> List[Dict[str, object]]:
    """Zero fractions of Q_hat^t and (Q_hat D_sigma)^t on one sampled dataset."""
    data = sample_comparisons(truth, mu, m, seed)
    Qhat = empirical_transition_matrix(data)
    rows = [{'m': m, 'matrix': 'Q_hat', 'sigma': None, 'power': power,
             'zero_fraction': matrix_power_density(Qhat, power)}]
    for sigma in sigma_grid:
        chain = apply_regularizer(Qhat, diffusion_regularizer(features, sigma))
        rows.append({'m': m, 'matrix': 'Q_hat_D', 'sigma': float(sigma), 'power': power,
                     'zero_fraction': matrix_power_density(chain, power)})
    return rows


def aggregate_rows(rows: Sequence[TrialRow]) -> pd.DataFrame:
    """Mean and standard error per (m, algorithm, params), then best-of-grid rows by mean Kendall tau."""
    frame = sweep_frame(rows)
    frame['params'] = [row.base_params for row in rows]
    frame['failed'] = [row.failed for row in rows]
    metric_columns = ['kendall_tau', 'l2_rel_err', 'test_err']
    columns = (['m', 'algorithm', 'params', 'trials', 'failures']
               + [f"{c}_{stat}" for c in metric_columns for stat in ('mean', 'stderr')])
    if frame.empty:
        return pd.DataFrame(columns=columns)

    grouped = frame.groupby(['m', 'algorithm', 'params'], sort=True)
    summary = grouped.agg(trials=('trial', 'size'), failures=('failed', 'sum'))
    for column in metric_columns:
        stats = grouped[column].agg(['mean', 'std', 'count'])
        summary[f"{column}_mean"] = stats['mean']
        summary[f"{column}_stderr"] = stats['std'] / np.sqrt(stats['count'])
    summary = summary.reset_index()
    summary['failures'] = summary['failures'].astype(int)

    best = []
    tuned = summary[summary['params'] != '']
    for (m, algorithm), group in tuned.groupby(['m', 'algorithm'], sort=True):
        scores = group['kendall_tau_mean']
        if scores.isna().all():
            continue
        winner = group.loc[scores.idxmax()].copy()
        winner['algorithm'] = f"{algorithm}[best]"
        best.append(winner)
    if best:
        summary = pd.concat([summary, pd.DataFrame(best)], ignore_index=True)
        for column in ('m', 'trials', 'failures'):
            summary[column] = summary[column].astype(int)
        for column in columns[5:]:
            summary[column] = summary[column].astype(float)
    summary = summary.sort_values(['m', 'algorithm', 'params'], kind='mergesort').reset_index(drop=True)
    return summary[columns]


# Worker state for process pools; set once per worker by the initializer.
_WORKER_CONTEXT: Optional[dict] = None


def _init_worker(context: dict) -> None:
    global _WORKER_CONTEXT
    _WORKER_CONTEXT = context


def _trial_worker(task: Tuple[int, int]) -> List[TrialRow]:
    if _WORKER_CONTEXT is None:
        raise RuntimeError("sweep worker not initialized")
    m, trial = task
    ctx = _WORKER_CONTEXT
    return run_trial(ctx['truth'], ctx['features'], ctx['mu'], m, ctx['algorithms'],
                     seed=ctx['base_seed'] + trial, trial=trial,
                     test_fraction=ctx['test_fraction'], solver=ctx['solver'],
                     mle=ctx['mle'], kernels=ctx['kernels'])


def run_sweep(config: RunConfig, data_manager: Optional[DataManager] = None,
              write: bool = True) -> SweepResult:
    """Run every (m, trial) of the config and write raw, aggregate and density CSVs."""
    config.validate()
    truth, features = build_instance(config)
    mu = uniform_mu(truth.n)
    algorithms = algorithms_from_config(config)
    if any(spec.needs_features for spec in algorithms) and features is None:
        raise ConfigError('sigma_grid', "diffusion algorithms need features")
    m_grid = config.resolved_m_grid(truth.n)
    solver = SolverSettings(tol=config.solver_tol, max_iter=config.solver_max_iter,
                            squaring=config.accelerate)
    mle = MleConfig(step_size=config.mle_step_size, max_iter=config.mle_max_iter,
                    grad_tol=config.mle_grad_tol)

    kernels = {}
    if features is not None:
        for sigma in sorted(set(config.sigma_grid) | set(config.decayed_sigma_grid)):
            kernels[float(sigma)] = diffusion_regularizer(features, sigma)

    logger.info(f"Sweep: n={truth.n}, m_grid={m_grid}, repeats={config.repeats}, "
                f"{len(algorithms)} algorithms, workers={config.workers}")
    context = {'truth': truth, 'features': features, 'mu': mu, 'algorithms': algorithms,
               'base_seed': config.base_seed, 'test_fraction': config.test_fraction,
               'solver': solver, 'mle': mle, 'kernels': kernels}
    tasks = [(m, trial) for m in m_grid for trial in range(config.repeats)]

    rows: List[TrialRow] = []
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers, initializer=_init_worker,
                                 initargs=(context,)) as executor:
            for done, batch in enumerate(executor.map(_trial_worker, tasks, chunksize=4), start=1):
                rows.extend(batch)
                if done % config.repeats == 0:
                    logger.info(f"completed {done}/{len(tasks)} trials")
    else:
        _init_worker(context)
        for done, task in enumerate(tasks, start=1):
            rows.extend(_trial_worker(task))
            if done % config.repeats == 0:
                logger.info(f"completed m={task[0]} ({done}/{len(tasks)} trials)")

    rows.sort(key=TrialRow.sort_key)
    aggregate = aggregate_rows(rows)

    density = None
    if config.density_power is not None:
        if features is None:
            raise ConfigError('density_power', "density report needs features")
        sigmas = config.sigma_grid or config.decayed_sigma_grid or DEFAULT_SIGMA_GRID
        density = []
        for m in m_grid:
            density.extend(density_report(truth, features, mu, m, sigmas, config.density_power,
                                          seed=config.base_seed))

    result = SweepResult(rows=rows, aggregate=aggregate, density=density)
    if write:
        manager = data_manager or DataManager()
        result.paths = manager.write_sweep_outputs(config.output, rows, aggregate, density)
    return result
