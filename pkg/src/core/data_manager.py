"""
CSV writers and output-path management.

All floats are written with 17 significant digits so every binary64 value
survives a write/read round trip. Line endings are always '\\n', so identical
inputs give byte-identical files.
"""

import logging
from pathlib import Path
from typing import Dict, IO, Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..config import config
from .metrics import MetricRow
from .model import ComparisonDataset, FeatureSet, RankingResult

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'
SWEEP_COLUMNS = ['m', 'trial', 'algorithm', 'params', 'kendall_tau', 'l2_rel_err', 'test_err']
METRIC_COLUMNS = ['kendall_tau', 'l2_rel_err', 'test_err']
DENSITY_COLUMNS = ['m', 'matrix', 'sigma', 'power', 'zero_fraction']

Target = Union[str, Path, IO[str]]


def _to_csv(frame: pd.DataFrame, target: Target) -> None:
    frame.to_csv(target, index=False, float_format=FLOAT_FORMAT, lineterminator='\n', na_rep='')
    if isinstance(target, (str, Path)):
        logger.info(f"Wrote {len(frame)} rows to {target}")


def write_scores(path: Target, result: RankingResult) -> None:
    """id,score,rank with rank 0 for the highest score."""
    rank = np.empty(result.n, dtype=np.int64)
    rank[result.ranking] = np.arange(result.n)
    frame = pd.DataFrame({'id': np.arange(result.n), 'score': result.scores, 'rank': rank})
    _to_csv(frame, path)


def write_comparisons(path: Target, data: ComparisonDataset) -> None:
    frame = pd.DataFrame(np.asarray(data.records).reshape(-1, 3), columns=['i', 'j', 'y'])
    _to_csv(frame, path)


def write_features(path: Target, features: FeatureSet) -> None:
    frame = pd.DataFrame(features.x, columns=[f"f{k}" for k in range(features.d)])
    frame.insert(0, 'id', np.arange(features.n))
    _to_csv(frame, path)


def sweep_frame(rows: Iterable) -> pd.DataFrame:
    """Rows with m, trial, algorithm, params and a MetricRow, in the sweep schema."""
    records = []
    for row in rows:
        metrics = row.metrics
        records.append({
            'm': int(row.m),
            'trial': int(row.trial),
            'algorithm': row.algorithm,
            'params': row.params,
            'kendall_tau': metrics.kendall_tau,
            'l2_rel_err': metrics.l2_rel_err,
            'test_err': metrics.test_err,
        })
    frame = pd.DataFrame.from_records(records, columns=SWEEP_COLUMNS)
    for column in METRIC_COLUMNS:
        frame[column] = frame[column].astype(float)
    return frame


def write_sweep(path: Target, rows: Iterable) -> None:
    """m,trial,algorithm,params,kendall_tau,l2_rel_err,test_err; unpopulated metrics are empty cells."""
    _to_csv(sweep_frame(rows), path)


def write_aggregate(path: Target, frame: pd.DataFrame) -> None:
    _to_csv(frame, path)


def write_density(path: Target, rows: Sequence[Dict[str, object]]) -> None:
    _to_csv(pd.DataFrame.from_records(list(rows), columns=DENSITY_COLUMNS), path)


def write_metric_row(target: Target, row: MetricRow) -> None:
    frame = pd.DataFrame([{c: getattr(row, c) for c in METRIC_COLUMNS}], columns=METRIC_COLUMNS)
    for column in METRIC_COLUMNS:
        frame[column] = frame[column].astype(float)
    _to_csv(frame, target)


def write_report(target: Target, quantities: Dict[str, float]) -> None:
    """Labeled quantity,value report."""
    frame = pd.DataFrame({'quantity': list(quantities.keys()),
                          'value': [float(v) for v in quantities.values()]})
    _to_csv(frame, target)


class DataManager:
    """Resolves where sweep outputs go and writes the raw, aggregate and density files."""

    def __init__(self, base_dir: Optional[Union[str, Path]] = None):
        self.base_dir = Path(base_dir) if base_dir else None
        self.logger = logging.getLogger(__name__)

    def resolve(self, output: Union[str, Path]) -> Path:
        """Absolute paths stay put; relative ones land in the configured output directory."""
        path = Path(output)
        if path.is_absolute():
            return path
        root = self.base_dir if self.base_dir is not None else config.ensure_output_dir()
        return root / path

    def sweep_paths(self, output: Union[str, Path]) -> Dict[str, Path]:
        raw = self.resolve(output)
        if raw.suffix == '':
            raw = raw.with_suffix('.csv')
        stem = raw.with_suffix('')
        return {
            'raw': raw,
            'aggregate': stem.parent / f"{stem.name}_aggregate.csv",
            'density': stem.parent / f"{stem.name}_density.csv",
        }

    def write_sweep_outputs(self, output: Union[str, Path], rows: List, aggregate: pd.DataFrame,
                            density: Optional[Sequence[Dict[str, object]]] = None) -> Dict[str, Path]:
        paths = self.sweep_paths(output)
        paths['raw'].parent.mkdir(parents=True, exist_ok=True)
        write_sweep(paths['raw'], rows)
        write_aggregate(paths['aggregate'], aggregate)
        written = {'raw': paths['raw'], 'aggregate': paths['aggregate']}
        if density is not None:
            write_density(paths['density'], density)
            written['density'] = paths['density']
        self.logger.info(f"Sweep outputs written under {paths['raw'].parent}")
        return written
