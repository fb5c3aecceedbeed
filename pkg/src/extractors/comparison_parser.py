"""
CSV readers for comparisons, features, and score files.

Parsers reject malformed input instead of repairing it; every error names the
file and the 1-based line of the offending row (the header is line 1).
"""

import logging
import re
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
import pandas as pd

from ..core.errors import MalformedInputError
from ..core.model import ComparisonDataset, FeatureSet
from ..utils import validate_file_path

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
_PARSER_LINE = re.compile(r"line (\d+)")
_INT_PATTERN = r"[+-]?\d+"


def _line_number(row_position: int) -> int:
    return int(row_position) + 2


def _read_table(path: PathLike) -> pd.DataFrame:
    """Read a CSV as strings so every cell can be validated explicitly."""
    if not validate_file_path(path):
        raise FileNotFoundError(f"no such file: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=False)
    except pd.errors.EmptyDataError:
        raise MalformedInputError(path, 1, "file is empty, expected a header row")
    except pd.errors.ParserError as e:
        match = _PARSER_LINE.search(str(e))
        line = int(match.group(1)) if match else None
        raise MalformedInputError(path, line, f"ragged row: {e}")
    # rows shorter than the header come back as NaN even with keep_default_na off
    missing = frame.isna().any(axis=1).to_numpy()
    if missing.any():
        raise MalformedInputError(path, _line_number(np.flatnonzero(missing)[0]), "ragged row: missing fields")
    return frame


def _require_header(path: PathLike, frame: pd.DataFrame, expected: List[str]) -> None:
    actual = [str(c).strip() for c in frame.columns]
    if actual != expected:
        raise MalformedInputError(path, 1, f"expected header {','.join(expected)}, got {','.join(actual)}")


def _parse_int_column(path: PathLike, frame: pd.DataFrame, column: str) -> np.ndarray:
    cells = frame[column].str.strip()
    ok = cells.str.fullmatch(_INT_PATTERN).to_numpy(dtype=bool)
    if not ok.all():
        bad = np.flatnonzero(~ok)[0]
        raise MalformedInputError(path, _line_number(bad), f"column {column}: not an integer: {frame[column].iloc[bad]!r}")
    values = cells.map(int)
    lo, hi = int(np.iinfo(np.int64).min), int(np.iinfo(np.int64).max)
    in_range = values.map(lambda v: lo <= v <= hi).to_numpy(dtype=bool)
    if not in_range.all():
        bad = np.flatnonzero(~in_range)[0]
        raise MalformedInputError(path, _line_number(bad), f"column {column}: integer out of range: {frame[column].iloc[bad]!r}")
    return values.to_numpy(dtype=np.int64)


def _to_float(cell: str) -> float:
    try:
        return float(cell)
    except ValueError:
        return np.nan


def _parse_float_block(path: PathLike, frame: pd.DataFrame, columns: List[str]) -> np.ndarray:
    # float() parses 17-digit output back to the identical binary64 value
    block = frame[columns].apply(lambda col: col.str.strip().map(_to_float))
    values = block.to_numpy(dtype=float)
    bad_rows = ~np.isfinite(values).all(axis=1) if values.size else np.zeros(len(frame), dtype=bool)
    if bad_rows.any():
        row = np.flatnonzero(bad_rows)[0]
        raise MalformedInputError(path, _line_number(row), "non-finite or non-numeric value")
    return values


def _parse_ids(path: PathLike, frame: pd.DataFrame) -> np.ndarray:
    """Ids must be exactly 0..n-1, once each, in any order. Returns the row order by id."""
    ids = _parse_int_column(path, frame, 'id')
    n = ids.size
    seen = np.full(n, -1, dtype=np.int64)
    for position, item in enumerate(ids):
        if item < 0 or item >= n:
            raise MalformedInputError(path, _line_number(position), f"id {item} outside 0..{n - 1}")
        if seen[item] >= 0:
            raise MalformedInputError(path, _line_number(position), f"duplicate id {item}")
        seen[item] = position
    return seen


def read_comparisons(path: PathLike, n: Optional[int] = None) -> ComparisonDataset:
    """Comparison CSV with header i,j,y; rows with i > j are swapped and y flipped."""
    frame = _read_table(path)
    _require_header(path, frame, ['i', 'j', 'y'])
    i = _parse_int_column(path, frame, 'i')
    j = _parse_int_column(path, frame, 'j')
    y = _parse_int_column(path, frame, 'y')

    for name, column in (('i', i), ('j', j)):
        negative = np.flatnonzero(column < 0)
        if negative.size:
            raise MalformedInputError(path, _line_number(negative[0]), f"negative index in column {name}")
    bad_y = np.flatnonzero((y != 0) & (y != 1))
    if bad_y.size:
        raise MalformedInputError(path, _line_number(bad_y[0]), f"outcome y must be 0 or 1, got {y[bad_y[0]]}")
    self_pairs = np.flatnonzero(i == j)
    if self_pairs.size:
        raise MalformedInputError(path, _line_number(self_pairs[0]), "self-comparison")

    largest = int(max(i.max(initial=-1), j.max(initial=-1)))
    if n is None:
        if largest < 0:
            raise MalformedInputError(path, None, "cannot infer the item count from an empty file; pass n")
        n = largest + 1
    elif largest >= n:
        row = int(np.flatnonzero(np.maximum(i, j) >= n)[0])
        raise MalformedInputError(path, _line_number(row), f"index {largest} out of range for n={n}")

    data = ComparisonDataset.from_records(n, np.column_stack([i, j, y]))
    logger.info(f"Read {data.m} comparisons over {data.n} items from {path}")
    return data


def read_features(path: PathLike) -> FeatureSet:
    """Feature CSV with header id,f0,f1,...; rows may come in any id order."""
    frame = _read_table(path)
    columns = [str(c).strip() for c in frame.columns]
    expected = ['id'] + [f"f{k}" for k in range(len(columns) - 1)]
    if len(columns) < 2:
        raise MalformedInputError(path, 1, "expected header id,f0,... with at least one feature column")
    _require_header(path, frame, expected)
    frame.columns = expected
    order = _parse_ids(path, frame)
    values = _parse_float_block(path, frame, expected[1:])
    if len(frame) == 0:
        raise MalformedInputError(path, None, "no feature rows")
    features = FeatureSet(values[order])
    logger.info(f"Read {features.n} feature vectors of dimension {features.d} from {path}")
    return features


def _read_id_scores(path: PathLike, expected: List[str]) -> np.ndarray:
    frame = _read_table(path)
    _require_header(path, frame, expected)
    frame.columns = expected
    if len(frame) == 0:
        raise MalformedInputError(path, None, "no score rows")
    order = _parse_ids(path, frame)
    if 'rank' in expected:
        _parse_int_column(path, frame, 'rank')
    values = _parse_float_block(path, frame, ['score'])[:, 0]
    return values[order]


def read_scores(path: PathLike) -> np.ndarray:
    """Scores CSV with header id,score,rank, as written by write_scores."""
    return _read_id_scores(path, ['id', 'score', 'rank'])


def read_cardinal(path: PathLike) -> np.ndarray:
    """Average cardinal ratings, header id,score."""
    return _read_id_scores(path, ['id', 'score'])
