"""
Multivariate Gaussian densities over rule feature vectors.
"""
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Union

import numpy as np
from scipy.linalg import LinAlgError, cholesky, solve_triangular

from src.features.extractor import FeatureVector
from src.utils.config import settings
from src.utils.errors import FeatureSchemaError, ModelError

Sample = Union[FeatureVector, np.ndarray, Sequence[float]]


@dataclass(frozen=True, eq=False)
class GaussianParams:
    """Mean, covariance and the diagonal regularizer added before factorizing."""

    mu: np.ndarray
    sigma: np.ndarray
    reg_epsilon: float = 1e-6

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=np.float64))
        sigma = np.atleast_2d(np.asarray(self.sigma, dtype=np.float64))
        if sigma.shape != (len(mu), len(mu)):
            raise ModelError(f"covariance shape {sigma.shape} does not match mean length {len(mu)}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def dim(self) -> int:
        return len(self.mu)

    @cached_property
    def factor(self) -> np.ndarray:
        """Lower Cholesky factor of sigma + reg_epsilon * I."""
        try:
            return cholesky(self.sigma + self.reg_epsilon * np.eye(self.dim), lower=True)
        except LinAlgError as e:
            raise ModelError(f"covariance is not positive definite after regularization: {e}") from e

    @cached_property
    def log_normalizer(self) -> float:
        return -0.5 * self.dim * math.log(2.0 * math.pi) - float(np.log(np.diag(self.factor)).sum())

    def logpdf(self, x: np.ndarray) -> float:
        """Log density at ``x``."""
        z = solve_triangular(self.factor, np.asarray(x, dtype=np.float64) - self.mu, lower=True)
        return self.log_normalizer - 0.5 * float(z @ z)


def _as_array(sample: Sample) -> np.ndarray:
    if isinstance(sample, FeatureVector):
        return sample.values
    return np.atleast_1d(np.asarray(sample, dtype=np.float64))


def fit_gaussian(samples: Sequence[Sample], reg_epsilon: Optional[float] = None) -> GaussianParams:
    """
    Maximum-likelihood Gaussian of a set of feature vectors.

    The covariance uses divisor n. A single sample gets the identity covariance.

    Args:
        samples: Feature vectors of every application of one rule
        reg_epsilon: Diagonal regularizer (defaults to the configured one)

    Returns:
        Fitted parameters

    Raises:
        FeatureSchemaError: No samples, or samples of different lengths.
    """
    reg_epsilon = settings.covariance_epsilon if reg_epsilon is None else reg_epsilon
    if not samples:
        raise FeatureSchemaError("cannot fit a Gaussian to zero samples")
    arrays = [_as_array(s) for s in samples]
    dims = {len(a) for a in arrays}
    if len(dims) != 1:
        raise FeatureSchemaError(f"dimension mismatch among samples: {sorted(dims)}")
    data = np.vstack(arrays)
    mu = data.mean(axis=0)
    if len(data) == 1:
        sigma = np.eye(data.shape[1])
    else:
        sigma = np.atleast_2d(np.cov(data, rowvar=False, bias=True))
    return GaussianParams(mu=mu, sigma=sigma, reg_epsilon=reg_epsilon)
