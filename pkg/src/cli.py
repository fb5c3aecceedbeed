#!/usr/bin/env python3
"""
Command-line front end: simulate, rank, eval, sweep, bounds.

Exit codes: 0 success, 1 I/O failure, 2 invalid flags/input/config,
3 algorithmic failure (non-ergodic chain or solver cap reached).
Data goes to standard output; diagnostics go to standard error.
"""

import argparse
import logging
import sys
from typing import List, Optional

from .config import config
from .core.data_manager import (write_comparisons, write_features, write_metric_row,
                                write_report, write_scores)
from .core.errors import MaxIterationsExceeded, NotErgodicError
from .core.experiment import run_sweep
from .core.markov import SolverSettings
from .core.metrics import evaluate
from .core.model import (RankingResult, generate_clustered, generate_experiment_a,
                         generate_experiment_b, sample_comparisons, scores_from_cardinal,
                         scores_linear, scores_random_exp, uniform_mu)
from .core.rank import MleConfig, btl_mle, lambda_schedule, rank_centrality, regularized_rank_centrality
from .core.regularize import decayed_mix, diffusion_regularizer, lambda_regularizer
from .core.run_config import load_run_config
from .core.theory import (BoundInputs, bias_bound, gamma, perturbation_threshold,
                          rc_failure_probability, rc_sample_complexity, reg_rc_error_bound,
                          reg_rc_failure_probability, reg_rc_sample_complexity,
                          spectral_gap_lower_bound)
from .extractors.comparison_parser import read_cardinal, read_comparisons, read_features, read_scores
from .utils import derive_seed, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2
EXIT_ALGORITHM = 3

GENERATOR_STREAM = 0
SAMPLER_STREAM = 1


class UsageError(ValueError):
    """Flag combination rejected after parsing."""


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.m < 0:
        raise UsageError("--m must be nonnegative")
    gen_seed = derive_seed(args.seed, GENERATOR_STREAM)
    features = None
    kind = args.scores
    if kind == 'cardinal':
        if not args.cardinal:
            raise UsageError("--scores cardinal needs --cardinal")
        truth = scores_from_cardinal(read_cardinal(args.cardinal))
    else:
        if args.n is None or args.n < 2:
            raise UsageError("--n must be an integer >= 2")
        if kind == 'random':
            truth = scores_random_exp(args.n, gen_seed)
        elif kind == 'linear':
            truth = scores_linear(args.n)
        elif kind == 'exp-a':
            features, truth = generate_experiment_a(gen_seed, args.n)
        elif kind == 'exp-b':
            features, truth = generate_experiment_b(gen_seed, args.n)
        else:
            if args.n_clusters < 1:
                raise UsageError("--n-clusters must be >= 1")
            if args.n % args.n_clusters != 0:
                raise UsageError(f"--n {args.n} is not a multiple of --n-clusters {args.n_clusters}")
            features, truth = generate_clustered(args.n_clusters, args.n // args.n_clusters,
                                                 args.separation, gen_seed)

    data = sample_comparisons(truth, uniform_mu(truth.n), args.m, derive_seed(args.seed, SAMPLER_STREAM))
    write_comparisons(args.out_comparisons, data)
    write_scores(args.out_truth, RankingResult.from_scores(truth.w, 'truth'))
    if features is not None:
        if args.out_features:
            write_features(args.out_features, features)
        else:
            logger.warning(f"generator {kind} produced features but --out-features was not given")
    print(f"simulated n={truth.n} m={data.m} scores={kind}", file=sys.stderr)
    return EXIT_OK


def cmd_rank(args: argparse.Namespace) -> int:
    data = read_comparisons(args.comparisons, n=args.n)
    solver = SolverSettings(tol=args.tol if args.tol is not None else config.solver_tol,
                            max_iter=args.max_iter if args.max_iter is not None else config.solver_max_iter,
                            squaring=args.squaring)
    kind = args.regularizer

    if kind == 'none':
        try:
            result = rank_centrality(data, solver)
        except NotErgodicError:
            print("error: empirical chain is not ergodic; try --regularizer lambda with --lambda or --eta",
                  file=sys.stderr)
            raise
    elif kind == 'mle':
        result = btl_mle(data, MleConfig(l2_strength=args.l2))
    else:
        if kind == 'lambda':
            if (args.lam is None) == (args.eta is None):
                raise UsageError("--regularizer lambda needs exactly one of --lambda or --eta")
            lam = args.lam if args.lam is not None else lambda_schedule(args.eta, max(data.m, 1))
            D = lambda_regularizer(data.n, lam)
        else:
            if not args.features:
                raise UsageError(f"--regularizer {kind} needs --features")
            if args.sigma is None:
                raise UsageError(f"--regularizer {kind} needs --sigma")
            features = read_features(args.features)
            if features.n != data.n:
                raise UsageError(f"features cover {features.n} items but comparisons have n={data.n}")
            D = diffusion_regularizer(features, args.sigma)
            if kind == 'decayed-diffusion':
                D = decayed_mix(D, max(data.m, 1))
        result = regularized_rank_centrality(data, D, solver, side=args.side)

    write_scores(args.out, result)
    # spectral rankers raise NotErgodicError rather than return
    status = 'n/a' if kind == 'mle' else 'true'
    print(f"algorithm={result.algorithm} iterations={result.iterations} ergodic={status} "
          f"converged={str(result.converged).lower()}", file=sys.stderr)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    if not args.truth and not args.test_comparisons:
        raise UsageError("eval needs --truth and/or --test-comparisons")
    scores = read_scores(args.scores)
    truth = None
    test = None
    if args.truth:
        truth = read_scores(args.truth)
        if truth.size != scores.size:
            raise UsageError(f"truth has {truth.size} items but scores have {scores.size}")
    if args.test_comparisons:
        test = read_comparisons(args.test_comparisons, n=scores.size)
    write_metric_row(sys.stdout, evaluate(scores, truth=truth, test=test))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    run = load_run_config(args.config)
    if args.workers is not None:
        run.workers = args.workers
    if args.output is not None:
        run.output = args.output
    result = run_sweep(run)
    for name, path in result.paths.items():
        print(f"{name}: {path}", file=sys.stderr)
    return EXIT_OK


def cmd_bounds(args: argparse.Namespace) -> int:
    uniform = 2.0 / (args.n * (args.n - 1)) if args.n >= 2 else None
    mu_min = args.mu_min if args.mu_min is not None else uniform
    mu_max = args.mu_max if args.mu_max is not None else uniform
    if mu_min is None:
        raise UsageError("--n must be >= 2")
    lam = args.lam if args.lam is not None else 0.0
    inputs = BoundInputs(n=args.n, b=args.b, mu_min=mu_min, mu_max=mu_max,
                         epsilon=args.eps, delta=args.delta, lam=lam, m=args.m)

    report = {
        'spectral_gap_lower_bound': spectral_gap_lower_bound(inputs),
        'gamma': gamma(inputs),
        'perturbation_threshold': perturbation_threshold(inputs),
        'rc_sample_complexity': rc_sample_complexity(inputs),
    }
    if args.m is not None:
        report['rc_failure_probability'] = rc_failure_probability(inputs)
    if args.lam is not None:
        report['bias_bound'] = bias_bound(lam, report['gamma'])
        report['reg_rc_sample_complexity'] = reg_rc_sample_complexity(inputs)
        if args.m is not None:
            report['reg_rc_error_bound'] = reg_rc_error_bound(inputs)
            report['reg_rc_failure_probability'] = reg_rc_failure_probability(inputs)
    write_report(sys.stdout, report)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='regrank', description=__doc__.strip().splitlines()[0])
    parser.add_argument('--log-level', default=None, type=str.upper,
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help='default from REGRANK_LOG_LEVEL')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('simulate', help='generate ground truth and BTL comparisons')
    p.add_argument('--n', type=int)
    p.add_argument('--m', type=int, required=True)
    p.add_argument('--scores', choices=['random', 'linear', 'exp-a', 'exp-b', 'clustered', 'cardinal'],
                   required=True)
    p.add_argument('--seed', type=int, required=True)
    p.add_argument('--out-comparisons', required=True)
    p.add_argument('--out-truth', required=True)
    p.add_argument('--out-features')
    p.add_argument('--n-clusters', type=int, default=10)
    p.add_argument('--separation', type=float, default=1000.0)
    p.add_argument('--cardinal', help='id,score CSV of average ratings for --scores cardinal')
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser('rank', help='rank items from a comparison file')
    p.add_argument('--comparisons', required=True)
    p.add_argument('--n', type=int)
    p.add_argument('--regularizer', choices=['none', 'lambda', 'diffusion', 'decayed-diffusion', 'mle'],
                   default='none')
    p.add_argument('--lambda', dest='lam', type=float)
    p.add_argument('--eta', type=float)
    p.add_argument('--sigma', type=float)
    p.add_argument('--features')
    p.add_argument('--l2', type=float, default=0.0, help='l2 strength for --regularizer mle')
    p.add_argument('--side', choices=['right', 'left', 'both'], default='right')
    p.add_argument('--squaring', action='store_true', help='accelerate power iteration by squaring')
    p.add_argument('--tol', type=float)
    p.add_argument('--max-iter', type=int)
    p.add_argument('--out', required=True)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser('eval', help='score an estimate against truth and/or held-out comparisons')
    p.add_argument('--scores', required=True)
    p.add_argument('--truth')
    p.add_argument('--test-comparisons')
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser('sweep', help='run a seeded experiment sweep from a JSON config')
    p.add_argument('--config', required=True)
    p.add_argument('--workers', type=int)
    p.add_argument('--output')
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser('bounds', help='evaluate the closed-form guarantees')
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--b', type=float, required=True)
    p.add_argument('--mu-min', type=float)
    p.add_argument('--mu-max', type=float)
    p.add_argument('--eps', type=float, required=True)
    p.add_argument('--delta', type=float, required=True)
    p.add_argument('--lambda', dest='lam', type=float)
    p.add_argument('--m', type=int)
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config.validate()
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    setup_logging(args.log_level or config.log_level, config.log_file)
    try:
        return args.func(args)
    except NotErgodicError as e:
        logger.error(str(e))
        return EXIT_ALGORITHM
    except MaxIterationsExceeded as e:
        logger.error(str(e))
        return EXIT_ALGORITHM
    except ValueError as e:
        # MalformedInputError, ConfigError, HypothesisViolatedError and UsageError land here
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == '__main__':
    sys.exit(main())
