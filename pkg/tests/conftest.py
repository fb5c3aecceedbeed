import numpy as np
import pytest

from src.core.model import BtlScores, SamplingDistribution


def random_scores(rng: np.random.Generator, n: int, log_spread: float = 2.0) -> BtlScores:
    return BtlScores(np.exp(rng.uniform(0.0, log_spread, size=n)))


def random_mu(rng: np.random.Generator, n: int) -> SamplingDistribution:
    """Strictly positive, non-uniform pair distribution."""
    upper = np.triu(rng.uniform(0.5, 1.5, size=(n, n)), k=1)
    upper /= upper.sum()
    return SamplingDistribution(upper + upper.T)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def make_instance():
    def factory(rng, n, log_spread=2.0):
        return random_scores(rng, n, log_spread), random_mu(rng, n)
    return factory
