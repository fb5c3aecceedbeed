"""Typed errors raised by the ranking toolkit."""

from typing import Optional

import numpy as np


class RankingError(Exception):
    """Base class for every error the toolkit raises on purpose."""


class NotErgodicError(RankingError):
    """The transition matrix has no unique stationary distribution."""

    def __init__(self, report, message: Optional[str] = None):
        self.report = report
        if message is None:
            message = (
                f"transition matrix is not ergodic "
                f"(strongly_connected={report.strongly_connected}, "
                f"aperiodic={report.aperiodic}, components={report.component_count})"
            )
        super().__init__(message)


class MaxIterationsExceeded(RankingError):
    """Power iteration hit its iteration cap before reaching tolerance."""

    def __init__(self, iterate: np.ndarray, residual: float, iterations: int):
        self.iterate = iterate
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"power iteration did not converge after {iterations} iterations "
            f"(residual {residual:.3e})"
        )


class DegenerateInputError(RankingError, ValueError):
    """Input has no information for the requested quantity."""


class HypothesisViolatedError(RankingError, ValueError):
    """A bound was requested outside the range where it holds."""


class LambdaOutOfRangeError(HypothesisViolatedError):
    pass


class EpsilonTooSmallError(HypothesisViolatedError):
    pass


class MalformedInputError(RankingError, ValueError):
    """An input file could not be parsed. Carries the offending line."""

    def __init__(self, path, line: Optional[int], reason: str):
        self.path = str(path)
        self.line = line
        self.reason = reason
        location = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{location}: {reason}")


class ConfigError(RankingError, ValueError):
    """A run configuration is invalid."""

    def __init__(self, key: Optional[str], reason: str):
        self.key = key
        prefix = f"config key '{key}': " if key else "config: "
        super().__init__(prefix + reason)
