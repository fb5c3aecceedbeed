"""Sweep run configuration: a flat JSON document, keys listed in SWEEP_CONFIG_REFERENCE.md."""

import json
import logging
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from .errors import ConfigError

logger = logging.getLogger(__name__)

CONFIG_VERSION = 1
GENERATORS = ('random', 'linear', 'exp-a', 'exp-b', 'clustered', 'file', 'cardinal')
FEATURE_GENERATORS = ('exp-a', 'exp-b', 'clustered')

DEFAULT_ETA_GRID = [1 / 24, 1 / 12, 1 / 6, 1 / 3, 1.0]
DEFAULT_SIGMA_GRID = [2.0 ** k for k in range(-6, 1)]


def default_m_grid(n: int) -> List[int]:
    """Geometric grid n/4, n/2, ..., 32n."""
    grid = sorted({max(1, int(round(n * 2.0 ** k))) for k in range(-2, 6)})
    return grid


@dataclass
class RunConfig:
    version: int = CONFIG_VERSION

    # instance
    generator: str = 'random'
    n: Optional[int] = None
    generator_seed: int = 0
    n_clusters: int = 10
    cluster_size: int = 10
    separation: float = 1000.0
    score_spread: float = 5.0
    truth_path: Optional[str] = None
    features_path: Optional[str] = None
    cardinal_path: Optional[str] = None

    # protocol
    m_grid: Optional[List[int]] = None
    repeats: int = 40
    base_seed: int = 0
    test_fraction: float = 0.0

    # algorithms
    include_rc: bool = True
    eta_grid: List[float] = field(default_factory=lambda: list(DEFAULT_ETA_GRID))
    lambda_grid: List[float] = field(default_factory=list)
    sigma_grid: List[float] = field(default_factory=list)
    decayed_sigma_grid: List[float] = field(default_factory=list)
    mle_l2_grid: List[float] = field(default_factory=list)
    mle_step_size: float = 0.1
    mle_max_iter: int = 10000
    mle_grad_tol: float = 1e-8

    # solver
    solver_tol: float = 1e-12
    solver_max_iter: int = 100000
    accelerate: bool = True

    # outputs
    density_power: Optional[int] = None
    workers: int = 1
    output: str = 'sweep.csv'

    @property
    def has_features(self) -> bool:
        if self.generator in FEATURE_GENERATORS:
            return True
        return self.generator in ('file', 'cardinal') and self.features_path is not None

    def resolved_m_grid(self, n: int) -> List[int]:
        return list(self.m_grid) if self.m_grid is not None else default_m_grid(n)

    @classmethod
    def from_dict(cls, data: Dict[str, Any], base_dir: Optional[Path] = None) -> 'RunConfig':
        if not isinstance(data, dict):
            raise ConfigError(None, "top level must be an object")
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(key, "unknown key")
        config = cls(**data)
        if base_dir is not None:
            for key in ('truth_path', 'features_path', 'cardinal_path'):
                value = getattr(config, key)
                if value is not None and not Path(value).is_absolute():
                    setattr(config, key, str(Path(base_dir) / value))
        config.validate()
        return config

    def validate(self) -> None:
        if self.version != CONFIG_VERSION:
            raise ConfigError('version', f"unsupported version {self.version!r}, expected {CONFIG_VERSION}")
        if self.generator not in GENERATORS:
            raise ConfigError('generator', f"must be one of {', '.join(GENERATORS)}, got {self.generator!r}")

        if self.generator in ('random', 'linear', 'exp-a', 'exp-b'):
            if not isinstance(self.n, int) or self.n < 2:
                raise ConfigError('n', f"must be an integer >= 2 for generator {self.generator!r}")
        if self.generator == 'clustered':
            _require_int('n_clusters', self.n_clusters, 1)
            _require_int('cluster_size', self.cluster_size, 1)
            if self.n_clusters * self.cluster_size < 2:
                raise ConfigError('cluster_size', "clustered instance needs at least 2 items")
            if not _is_number(self.separation) or self.separation <= 0:
                raise ConfigError('separation', "must be positive")
            if not _is_number(self.score_spread) or self.score_spread <= 0:
                raise ConfigError('score_spread', "must be positive")
        if self.generator == 'file' and not self.truth_path:
            raise ConfigError('truth_path', "required for generator 'file'")
        if self.generator == 'cardinal' and not self.cardinal_path:
            raise ConfigError('cardinal_path', "required for generator 'cardinal'")

        if self.m_grid is not None:
            if not isinstance(self.m_grid, list) or not self.m_grid:
                raise ConfigError('m_grid', "must be a nonempty list of positive integers")
            for value in self.m_grid:
                _require_int('m_grid', value, 1)
            if any(b <= a for a, b in zip(self.m_grid, self.m_grid[1:])):
                raise ConfigError('m_grid', "must be strictly increasing")
        _require_int('repeats', self.repeats, 1)
        _require_int('base_seed', self.base_seed, 0)
        _require_int('generator_seed', self.generator_seed, 0)
        if not _is_number(self.test_fraction) or not 0 <= self.test_fraction < 1:
            raise ConfigError('test_fraction', "must lie in [0, 1)")

        for key in ('eta_grid', 'sigma_grid', 'decayed_sigma_grid'):
            _require_grid(key, getattr(self, key), lambda v: v > 0, "positive")
        _require_grid('lambda_grid', self.lambda_grid, lambda v: 0 <= v <= 1, "in [0, 1]")
        _require_grid('mle_l2_grid', self.mle_l2_grid, lambda v: v >= 0, "nonnegative")
        if (self.sigma_grid or self.decayed_sigma_grid) and not self.has_features:
            key = 'sigma_grid' if self.sigma_grid else 'decayed_sigma_grid'
            raise ConfigError(key, "diffusion algorithms need features from the generator or features_path")
        if not (self.include_rc or self.eta_grid or self.lambda_grid or self.sigma_grid
                or self.decayed_sigma_grid or self.mle_l2_grid):
            raise ConfigError('include_rc', "no algorithm selected")

        if not _is_number(self.mle_step_size) or self.mle_step_size <= 0:
            raise ConfigError('mle_step_size', "must be positive")
        _require_int('mle_max_iter', self.mle_max_iter, 1)
        if not _is_number(self.mle_grad_tol) or self.mle_grad_tol <= 0:
            raise ConfigError('mle_grad_tol', "must be positive")
        if not _is_number(self.solver_tol) or self.solver_tol <= 0:
            raise ConfigError('solver_tol', "must be positive")
        _require_int('solver_max_iter', self.solver_max_iter, 1)
        if self.density_power is not None:
            _require_int('density_power', self.density_power, 1)
        _require_int('workers', self.workers, 1)
        if not isinstance(self.output, str) or not self.output:
            raise ConfigError('output', "must be a nonempty path")


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def _require_int(key: str, value: Any, minimum: int) -> None:
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ConfigError(key, f"must be an integer >= {minimum}, got {value!r}")


def _require_grid(key: str, values: Any, check, description: str) -> None:
    if not isinstance(values, list):
        raise ConfigError(key, "must be a list")
    for value in values:
        if not _is_number(value) or not check(value):
            raise ConfigError(key, f"entries must be {description}, got {value!r}")


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """Read and validate a sweep configuration. Relative data paths resolve against the file."""
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(None, f"{path}: invalid JSON at line {e.lineno}: {e.msg}")
    logger.info(f"Loaded run config from {path}")
    return RunConfig.from_dict(data, base_dir=path.parent)
