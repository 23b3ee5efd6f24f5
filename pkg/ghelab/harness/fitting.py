"""Least-squares order fits on log-log axes."""

import logging
import math
from typing import Optional, Sequence

import numpy as np

from ..errors import InsufficientDataError
from ..models.reports import FitResult

logger = logging.getLogger(__name__)

MIN_POINTS = 3
MIN_R_SQUARED = 0.98


def loglog_fit(
    x: Sequence[float],
    y: Sequence[float],
    quantity: str,
    expected: float,
    tolerance: Optional[float] = None,
    min_points: int = MIN_POINTS,
    min_r2: float = MIN_R_SQUARED,
) -> FitResult:
    """Fit log(y) = slope log(x) + intercept and judge the slope.

    Points with a non-positive or non-finite coordinate are dropped. The fit
    is inconclusive with fewer than min_points points or with R^2 below
    min_r2; an inconclusive fit never passes.

    Args:
        x: Abscissae, typically the relaxation times
        y: Measured values
        quantity: Name stored in the result
        expected: Expected slope
        tolerance: Accepted |slope - expected|; None accepts any slope >= expected
        min_points: Fewest usable points
        min_r2: Smallest accepted coefficient of determination

    Returns:
        FitResult with status pass, fail or inconclusive
    """
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    keep = np.isfinite(xs) & np.isfinite(ys) & (xs > 0) & (ys > 0)
    lx, ly = np.log(xs[keep]), np.log(ys[keep])
    result = FitResult(
        quantity=quantity,
        expected=expected,
        tolerance=tolerance,
        points=int(lx.size),
    )

    if lx.size < min_points:
        result.note = f"{lx.size} usable point(s), need {min_points}"
        logger.warning(f"Fit {quantity} inconclusive: {result.note}")
        return result
    if np.ptp(lx) == 0.0:
        result.note = "all abscissae coincide"
        logger.warning(f"Fit {quantity} inconclusive: {result.note}")
        return result

    slope, intercept = np.polyfit(lx, ly, 1)
    predicted = slope * lx + intercept
    ss_res = float(np.sum((ly - predicted) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0

    result.slope = float(slope)
    result.intercept = float(intercept)
    result.r_squared = r_squared

    if r_squared < min_r2:
        result.note = f"R^2={r_squared:.4f} below {min_r2}"
        logger.warning(f"Fit {quantity} inconclusive: {result.note}")
        return result

    if tolerance is None:
        ok = result.slope >= expected
    else:
        ok = abs(result.slope - expected) <= tolerance
    result.status = "pass" if ok else "fail"
    logger.info(
        f"Fit {quantity}: slope={result.slope:.4f} (expected {expected:g}), "
        f"R^2={r_squared:.5f}, {result.status}"
    )
    return result


def exact_result(quantity: str, expected: float, worst: float, threshold: float, points: int) -> FitResult:
    """Report a quantity that vanishes identically instead of fitting round-off.

    Status is exact when worst <= threshold and fail otherwise.
    """
    passed = math.isfinite(worst) and worst <= threshold
    return FitResult(
        quantity=quantity,
        expected=expected,
        points=points,
        status="exact" if passed else "fail",
        note=f"max {worst:.3e} against round-off threshold {threshold:.3e}",
    )


def require_points(count: int, what: str, minimum: int = MIN_POINTS) -> None:
    """Raise InsufficientDataError if fewer than minimum values are given."""
    if count < minimum:
        raise InsufficientDataError(f"insufficient points: {count} {what}, need at least {minimum}")
