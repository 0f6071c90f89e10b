"""Tightness: the negatively oriented mean interval score.

Central Gaussian intervals mu ± Φ⁻¹(1 - a/2)·sigma are drawn at coverages
1%..99% in 1% steps. Each level scores the interval width plus a (2/a)-scaled
penalty for missing the truth; lower is tighter. Each point is scored by its
mean over the 99 levels, and the set by the mean of those per-point means.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PredictionSet, validate_prediction_set
from .errors import DomainError
from .numerics import std_normal_quantile

COVERAGE_GRID = np.round(np.arange(1, 100) / 100.0, 2)


@dataclass(frozen=True)
class IntervalScoreReport:
    mean_score: float
    per_point_scores: np.ndarray
    coverage_grid: np.ndarray


def interval_score(p: PredictionSet, coverage_grid=None) -> IntervalScoreReport:
    """Negatively oriented mean interval score of a prediction set.

    sigma == 0 points degenerate gracefully: zero width, penalty term only
    (the finite coverage grid keeps every 2/a factor finite).
    """
    validate_prediction_set(p)
    if p.n < 1:
        raise DomainError("interval_score needs n >= 1")
    grid = COVERAGE_GRID if coverage_grid is None else np.asarray(coverage_grid, dtype=np.float64)
    if np.any(grid <= 0.0) or np.any(grid >= 1.0):
        raise DomainError("coverages must lie strictly inside (0, 1)")
    miss = 1.0 - grid                      # a = 1 - coverage
    half_width_z = std_normal_quantile(1.0 - miss / 2.0)

    resid = p.y_true - p.mu
    totals = np.zeros(p.n, dtype=np.float64)
    # accumulate level by level: O(n) memory instead of n x levels
    for a, zq in zip(miss, half_width_z):
        half = zq * p.sigma
        below = np.maximum(-half - resid, 0.0)   # y < lower bound
        above = np.maximum(resid - half, 0.0)    # y > upper bound
        totals += 2.0 * half + (2.0 / a) * (below + above)
    per_point = totals / grid.size
    return IntervalScoreReport(
        mean_score=float(per_point.mean()),
        per_point_scores=per_point,
        coverage_grid=grid,
    )
