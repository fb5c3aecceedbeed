"""Row-stochastic regularizers D and the regularized chain Q_hat D."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Union

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import softmax

from .markov import TransitionMatrix
from .model import FeatureSet

logger = logging.getLogger(__name__)


class RegularizerKind(Enum):
    IDENTITY = "identity"
    LAMBDA = "lambda"
    DIFFUSION = "diffusion"
    DECAYED_DIFFUSION = "decayed_diffusion"


class Side(Enum):
    RIGHT = "right"
    LEFT = "left"
    BOTH = "both"


@dataclass(frozen=True, eq=False)
class Regularizer:
    D: TransitionMatrix
    kind: RegularizerKind
    params: Dict[str, float] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.D.n

    @property
    def entries(self) -> np.ndarray:
        return self.D.entries


def identity_regularizer(n: int) -> Regularizer:
    return Regularizer(TransitionMatrix.identity(n), RegularizerKind.IDENTITY)


def lambda_regularizer(n: int, lam: float) -> Regularizer:
    """D_lambda = (1 - lambda) I + (lambda / n) 11^T."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    D = (1.0 - lam) * np.eye(n) + (lam / n) * np.ones((n, n))
    return Regularizer(TransitionMatrix(D), RegularizerKind.LAMBDA, {'lambda': float(lam)})


def diffusion_regularizer(x: FeatureSet, sigma: float) -> Regularizer:
    """Gaussian diffusion kernel D_ik proportional to exp(-||x_i - x_k||^2 / sigma^2), row-normalized."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if not isinstance(x, FeatureSet):
        x = FeatureSet(x)
    sq_dist = cdist(x.x, x.x, metric='sqeuclidean')
    # softmax subtracts the row max, so far-away rows still normalize
    D = softmax(-sq_dist / sigma ** 2, axis=1)
    return Regularizer(TransitionMatrix(D), RegularizerKind.DIFFUSION, {'sigma': float(sigma)})


def decayed_mix(D: Regularizer, m: int) -> Regularizer:
    """(1 - 1/sqrt(m)) I + D / sqrt(m)."""
    if m < 1:
        raise ValueError(f"decayed mix needs m >= 1, got {m}")
    weight = 1.0 / np.sqrt(m)
    mixed = (1.0 - weight) * np.eye(D.n) + weight * D.entries
    params = dict(D.params)
    params['m'] = int(m)
    return Regularizer(TransitionMatrix(mixed), RegularizerKind.DECAYED_DIFFUSION, params)


def apply_regularizer(Qhat: TransitionMatrix, D: Regularizer,
                      side: Union[Side, str] = Side.RIGHT) -> TransitionMatrix:
    """Regularized chain Q_hat D (or D Q_hat, D Q_hat D)."""
    side = Side(side)
    if Qhat.n != D.n:
        raise ValueError(f"dimension mismatch: Q_hat is {Qhat.n}x{Qhat.n}, D is {D.n}x{D.n}")
    Q, R = Qhat.entries, D.entries
    if side is Side.RIGHT:
        product = Q @ R
    elif side is Side.LEFT:
        product = R @ Q
    else:
        product = R @ Q @ R
    return TransitionMatrix(product)
