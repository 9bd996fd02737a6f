"""Report arithmetic: performance ratios and aggregate statistics."""

from __future__ import annotations

import math
from typing import Iterable

__all__ = ["rho", "geometric_mean", "relative_std"]


def rho(value: float, reference: float) -> float:
    """Performance ratio in percent: below 100 beats the reference."""
    if reference <= 0:
        raise ValueError("reference must be positive")
    return value / reference * 100.0


def geometric_mean(values: Iterable[float]) -> float:
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError("geometric_mean of no values")
    if any(v <= 0 for v in vals):
        raise ValueError("geometric_mean needs positive values")
    return math.exp(sum(math.log(v) for v in vals) / len(vals))


def relative_std(values: Iterable[float]) -> float:
    """Sample relative standard deviation in percent (0 for a single value)."""
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError("relative_std of no values")
    if len(vals) == 1:
        return 0.0
    mean = sum(vals) / len(vals)
    if mean == 0:
        raise ValueError("relative_std undefined for zero mean")
    var = sum((v - mean) ** 2 for v in vals) / (len(vals) - 1)
    return math.sqrt(var) / abs(mean) * 100.0
