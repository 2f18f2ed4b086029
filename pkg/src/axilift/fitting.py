"""Least-squares power-law fits."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    max_abs_residual: float
    n_points: int


def fit_loglog(xs, ys) -> FitResult:
    """Fit log y = slope * log x + intercept by ordinary least squares."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise DomainError("need two equal-length sequences of at least 2 points")
    if np.any(x <= 0) or np.any(y <= 0) or not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DomainError("log-log fit needs finite positive entries")
    lx, ly = np.log(x), np.log(y)
    mx, my = math.fsum(lx) / len(lx), math.fsum(ly) / len(ly)
    dx, dy = lx - mx, ly - my
    sxx = math.fsum(dx * dx)
    if sxx == 0.0:
        raise DomainError("x values must not all coincide")
    slope = math.fsum(dx * dy) / sxx
    intercept = my - slope * mx
    resid = ly - (slope * lx + intercept)
    return FitResult(slope, intercept, float(np.max(np.abs(resid))), len(x))
