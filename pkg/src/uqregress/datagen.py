"""Built-in synthetic regression benchmark with known noise levels.

Features are uniform on (-3, 3)^d; the target is a fixed smooth
polynomial-plus-sine of the features plus heteroscedastic Gaussian noise
whose std depends on the first coordinate. Because the true noise std is
returned alongside the data, a perfectly calibrated PredictionSet can be
constructed exactly — the oracle behind all calibration-null tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LabeledDataset, RngSeed
from .errors import DomainError

NOISE_FLOOR = 0.05
NOISE_SLOPE = 0.2


def true_function(features: np.ndarray) -> np.ndarray:
    """The noiseless target surface."""
    X = np.atleast_2d(np.asarray(features, dtype=np.float64))
    x0 = X[:, 0]
    y = np.sin(2.0 * x0) + 0.5 * x0 * x0 - 0.25 * x0
    if X.shape[1] > 1:
        y = y + 0.3 * X[:, 1:].sum(axis=1) / np.sqrt(X.shape[1] - 1)
    return y


def noise_std(features: np.ndarray) -> np.ndarray:
    """Heteroscedastic noise level: 0.05 + 0.2 * |x0|."""
    X = np.atleast_2d(np.asarray(features, dtype=np.float64))
    return NOISE_FLOOR + NOISE_SLOPE * np.abs(X[:, 0])


@dataclass(frozen=True)
class SyntheticData:
    dataset: LabeledDataset | None  # None when n == 0
    true_sigma: np.ndarray
    dim: int


def generate_synthetic(n: int, dim: int, seed: RngSeed, n_groups: int = 0) -> SyntheticData:
    """Draw n labeled rows; optional equal-width group tags on x0.

    Deterministic for a given (n, dim, seed, n_groups).
    """
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if dim < 1:
        raise DomainError(f"dim must be >= 1, got {dim}")
    if n_groups < 0:
        raise DomainError(f"n_groups must be >= 0, got {n_groups}")
    if n == 0:
        return SyntheticData(dataset=None, true_sigma=np.empty(0), dim=dim)
    rng = seed.generator()
    X = rng.uniform(-3.0, 3.0, size=(n, dim))
    sigma = noise_std(X)
    y = true_function(X) + sigma * rng.standard_normal(n)
    groups = None
    if n_groups > 0:
        bins = np.minimum(((X[:, 0] + 3.0) / 6.0 * n_groups).astype(int), n_groups - 1)
        groups = tuple(f"g{b}" for b in bins)
    ds = LabeledDataset(
        ids=tuple(f"r{i:06d}" for i in range(n)),
        features=X,
        targets=y,
        groups=groups,
    )
    return SyntheticData(dataset=ds, true_sigma=sigma, dim=dim)


def calibrated_prediction_set(data: SyntheticData) -> "PredictionSet":
    """The oracle PredictionSet: mu = true surface, sigma = true noise std."""
    from .core import PredictionSet

    if data.dataset is None:
        raise DomainError("cannot build predictions from an empty dataset")
    ds = data.dataset
    return PredictionSet(
        ids=ds.ids,
        y_true=ds.targets,
        mu=true_function(ds.features),
        sigma=data.true_sigma,
        groups=ds.groups,
    )
