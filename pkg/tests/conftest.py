import numpy as np
import pytest

from uqregress.core import PredictionSet, RngSeed

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_pset(y_true, mu, sigma, groups=None, ids=None) -> PredictionSet:
    n = len(y_true)
    return PredictionSet(
        ids=tuple(ids) if ids is not None else tuple(f"p{i}" for i in range(n)),
        y_true=np.asarray(y_true, dtype=float),
        mu=np.asarray(mu, dtype=float),
        sigma=np.asarray(sigma, dtype=float),
        groups=groups,
    )


def gaussian_null(n: int, seed: int, sigma_scale: float = 1.0) -> PredictionSet:
    """Perfectly specified predictions: y ~ Normal(mu, sigma^2), reported
    sigma optionally mis-scaled by ``sigma_scale``."""
    rng = RngSeed(seed).generator()
    mu = rng.uniform(-2.0, 2.0, n)
    sigma = rng.uniform(0.1, 1.0, n)
    y = mu + sigma * rng.standard_normal(n)
    return make_pset(y, mu, sigma * sigma_scale)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
