"""Finite-difference stencils on uniform grids.

Fourth-order five-point central stencils in the interior; the outermost
two samples on each side are left NaN because no centered stencil of
that order exists there.
"""

from __future__ import annotations

import numpy as np


def check_uniform(s: np.ndarray) -> float:
    """Return the common step of a uniform grid, raising if it is not one."""
    s = np.asarray(s, dtype=float)
    if s.ndim != 1 or s.size < 2:
        raise ValueError("grid must be a 1-d array with at least 2 samples")
    d = np.diff(s)
    h = float(d[0])
    if h == 0.0 or not np.allclose(d, h, rtol=1e-9, atol=1e-12 * max(1.0, abs(h))):
        raise ValueError("grid must be uniformly spaced")
    return h


def deriv1(y: np.ndarray, h: float) -> np.ndarray:
    """Five-point first derivative along axis 0; outer two rows NaN."""
    y = np.asarray(y, dtype=float)
    out = np.full_like(y, np.nan)
    if y.shape[0] >= 5:
        out[2:-2] = (y[:-4] - 8.0 * y[1:-3] + 8.0 * y[3:-1] - y[4:]) / (12.0 * h)
    return out


def deriv2(y: np.ndarray, h: float) -> np.ndarray:
    """Five-point second derivative along axis 0; outer two rows NaN."""
    y = np.asarray(y, dtype=float)
    out = np.full_like(y, np.nan)
    if y.shape[0] >= 5:
        out[2:-2] = (
            -y[:-4] + 16.0 * y[1:-3] - 30.0 * y[2:-2] + 16.0 * y[3:-1] - y[4:]
        ) / (12.0 * h * h)
    return out


def interior(n: int) -> slice:
    """Index window where the five-point stencils are defined."""
    return slice(2, n - 2)
