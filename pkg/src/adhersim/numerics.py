"""Grid construction and small numerical helpers shared by the engine."""

from __future__ import annotations

import numpy as np

# Canonical simulation resolution: 100 steps per year (0.01-year step).
# Event times (policy starts, nudge activations, window ends) are snapped to
# this grid, and the nudge state machine always sweeps it, so that refining
# the quadrature grid never moves a discontinuity.
STEPS_PER_YEAR = 100


def time_grid(horizon: float, steps_per_year: int = STEPS_PER_YEAR) -> np.ndarray:
    """Uniform grid over [0, horizon] with exact node values.

    Nodes are computed as integer/steps_per_year so that a snapped event time
    compares bit-exactly equal to the grid node it sits on.
    """
    n = round(horizon * steps_per_year)
    if abs(n - horizon * steps_per_year) > 1e-9:
        raise ValueError(
            f"horizon {horizon} is not representable on a 1/{steps_per_year}-year grid"
        )
    if n <= 0:
        raise ValueError("horizon must be positive")
    return np.arange(n + 1) / steps_per_year


def snap_up(t: float, steps_per_year: int = STEPS_PER_YEAR) -> float:
    """Smallest grid node >= t (grid nodes are multiples of 1/steps_per_year)."""
    i = int(np.ceil(t * steps_per_year - 1e-9))
    return max(i, 0) / steps_per_year


def sigmoid(z: np.ndarray | float) -> np.ndarray | float:
    """Numerically stable logistic function 1 / (1 + exp(-z))."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    if out.ndim == 0:
        return float(out)
    return out


def check_finite(name: str, value: float) -> float:
    value = float(value)
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    return value
