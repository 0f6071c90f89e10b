"""Scalar recalibration: one positive multiplier on every sigma.

The multiplier minimizes the miscalibration area of the rescaled prediction
set. The search runs in log-space over [bracket_lo, bracket_hi] — the area is
empirically unimodal in ln(s) but not provably so, so a coarse 25-point
pre-scan picks the best cell before Brent refines inside it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calibration import DEFAULT_GRID_SIZE, calibration_curve
from .core import PredictionSet, validate_prediction_set
from .errors import AllSigmaZeroError, DomainError, NonPositiveScalarError
from .numerics import BrentResult, brent_minimize

PRESCAN_POINTS = 25


@dataclass(frozen=True)
class RecalibrationResult:
    scalar: float
    area_before: float
    area_after: float
    brent: BrentResult
    grid_size: int


def apply_scalar(p: PredictionSet, s: float) -> PredictionSet:
    """Multiply every sigma by ``s``; mu and y_true are untouched."""
    if not np.isfinite(s) or s <= 0.0:
        raise NonPositiveScalarError(f"scalar must be finite and > 0, got {s}")
    return p.with_sigma(p.sigma * float(s))


def fit_scalar(
    p: PredictionSet,
    bracket_lo: float = 1e-3,
    bracket_hi: float = 1e3,
    grid_size: int = DEFAULT_GRID_SIZE,
    tol: float = 1e-6,
    max_iter: int = 200,
) -> RecalibrationResult:
    """Fit the sigma multiplier that minimizes miscalibration area.

    The returned scalar is never worse (in area, up to ``tol``) than the best
    pre-scan point; with the default symmetric bracket the pre-scan includes
    s = 1 exactly, so the fit can only improve on the uncalibrated area.
    A non-converged Brent run is reported via ``brent.converged`` rather than
    raised; the best point found is still returned.
    """
    validate_prediction_set(p)
    if not 0.0 < bracket_lo < bracket_hi:
        raise DomainError(f"invalid bracket [{bracket_lo}, {bracket_hi}]")
    if not np.any(p.sigma > 0.0):
        raise AllSigmaZeroError("every sigma is zero; nothing to recalibrate")

    def area_at(t: float) -> float:
        return calibration_curve(apply_scalar(p, float(np.exp(t))), grid_size).miscalibration_area

    t_lo, t_hi = float(np.log(bracket_lo)), float(np.log(bracket_hi))
    scan_t = np.linspace(t_lo, t_hi, PRESCAN_POINTS)
    scan_area = np.array([area_at(t) for t in scan_t])
    best = int(np.argmin(scan_area))
    cell_lo = scan_t[max(best - 1, 0)]
    cell_hi = scan_t[min(best + 1, PRESCAN_POINTS - 1)]

    brent = brent_minimize(area_at, cell_lo, cell_hi, tol=tol, max_iter=max_iter)
    if brent.value <= scan_area[best]:
        t_star, area_after = brent.argmin, brent.value
    else:  # keep the incumbent if Brent stalled on a flat/multimodal cell
        t_star, area_after = float(scan_t[best]), float(scan_area[best])

    area_before = calibration_curve(p, grid_size).miscalibration_area
    return RecalibrationResult(
        scalar=float(np.exp(t_star)),
        area_before=area_before,
        area_after=float(area_after),
        brent=brent,
        grid_size=grid_size,
    )
