"""ROI, payback, break-even, design-space sweeps, and the cost-effectiveness
frontier.

ROI follows the study's cost-relative definition
ROI = (C_baseline - C_policy) / C_policy * 100, with the policy-arm cost in
the denominator (not incremental policy spend).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .costmodel import Trajectory, simulate_trajectory
from .numerics import check_finite
from .params import ModelParams
from .scenarios import PolicyConfig, PolicyKind, build_preset

BREAKEVEN_GAMMA_MAX = 20.0
BREAKEVEN_MAX_ITER = 80
BREAKEVEN_GAMMA_TOL = 1e-4
BREAKEVEN_ROI_TOL = 0.01  # percentage points at the root

# Contour levels exported with design-space sweeps.
CONTOUR_LEVELS_SIGN = (-5.0, 0.0, 5.0)
CONTOUR_LEVELS_DESIGN = (0.0, 50.0, 100.0)


@dataclass(frozen=True)
class RoiGrid:
    """Design-space sweep over adherence gain (rows) and cost scale (columns)."""

    delta_axis: np.ndarray
    gamma_axis: np.ndarray
    roi_percent: np.ndarray        # shape (len(delta_axis), len(gamma_axis))
    total_cost: np.ndarray         # policy-arm C(T) per cell
    breakeven_gamma_per_delta: tuple[float | None, ...]


def roi(cost_baseline: float, cost_policy: float) -> float:
    """Return on investment in percent; positive iff the policy arm is cheaper."""
    check_finite("cost_baseline", cost_baseline)
    check_finite("cost_policy", cost_policy)
    if cost_policy <= 0:
        raise ValueError(f"cost_policy must be > 0, got {cost_policy}")
    return (cost_baseline - cost_policy) / cost_policy * 100.0


def monetized_roi(cost_baseline: float, cost_policy: float, health_benefit: float) -> float:
    """ROI with a monetized health benefit credited as additional savings."""
    check_finite("health_benefit", health_benefit)
    if cost_policy <= 0:
        raise ValueError(f"cost_policy must be > 0, got {cost_policy}")
    return (cost_baseline - cost_policy + health_benefit) / cost_policy * 100.0


def payback_time(traj_baseline: Trajectory, traj_policy: Trajectory) -> float | None:
    """First time the policy arm's cumulative cost drops below the baseline's.

    Linearly interpolated between the bracketing grid nodes; None when the
    policy arm never becomes strictly cheaper within the horizon.
    """
    if len(traj_baseline.times) != len(traj_policy.times) or not np.array_equal(
        traj_baseline.times, traj_policy.times
    ):
        raise ValueError("trajectories are on different grids")
    diff = traj_policy.cumulative_cost - traj_baseline.cumulative_cost
    below = np.nonzero(diff < 0)[0]
    below = below[below > 0]
    if len(below) == 0:
        return None
    i = int(below[0])
    t0, t1 = traj_baseline.times[i - 1], traj_baseline.times[i]
    d0, d1 = diff[i - 1], diff[i]
    if d0 <= 0:
        return float(t1) if d0 == 0 else float(t0)
    return float(t0 + (t1 - t0) * d0 / (d0 - d1))


def _policy_roi(params: ModelParams, policy: PolicyConfig, baseline_cost: float) -> tuple[float, float]:
    traj = simulate_trajectory(params, policy)
    cost = traj.final_cost
    return roi(baseline_cost, cost), cost


def baseline_cost(params: ModelParams) -> float:
    """Cumulative cost of the no-policy counterfactual at the horizon."""
    return simulate_trajectory(params, build_preset("baseline")).final_cost


def breakeven_gamma(
    params: ModelParams,
    policy_template: PolicyConfig,
    delta: float,
) -> float | None:
    """Largest cost intensity gamma* at which ROI is still zero.

    Bracketing scan over [0, 20] followed by bisection; returns None when the
    design is already losing money at gamma = 0 or never crosses zero inside
    the bracket.  A non-monotone ROI profile along the scan aborts with an
    error since gamma enters the integrand linearly and ROI must decrease.
    """
    check_finite("delta", delta)
    if not (0.0 <= delta <= 1.0):
        raise ValueError("delta must be in [0, 1]")
    c_base = baseline_cost(params)

    def f(gamma: float) -> float:
        policy = replace(policy_template, adherence_gain_delta=delta, cost_scale_gamma=gamma)
        return _policy_roi(params, policy, c_base)[0]

    f0 = f(0.0)
    if abs(f0) < BREAKEVEN_ROI_TOL:
        return 0.0
    if f0 < 0:
        return None

    lo, f_lo = 0.0, f0
    hi = None
    prev = f0
    for gamma in np.linspace(2.0, BREAKEVEN_GAMMA_MAX, 10):
        val = f(float(gamma))
        if val > prev + 1e-9:
            raise ValueError(
                f"ROI is not decreasing in gamma near gamma={gamma:.3f}; model misconfigured"
            )
        if val <= 0:
            hi = float(gamma)
            break
        lo, f_lo = float(gamma), val
        prev = val
    if hi is None:
        return None

    for _ in range(BREAKEVEN_MAX_ITER):
        mid = 0.5 * (lo + hi)
        val = f(mid)
        if val > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < BREAKEVEN_GAMMA_TOL:
            break
    root = 0.5 * (lo + hi)
    if abs(f(root)) > BREAKEVEN_ROI_TOL:
        raise ValueError(f"bisection failed to reach |ROI| < {BREAKEVEN_ROI_TOL} at gamma*={root}")
    return root


def sweep_design_space(
    params: ModelParams,
    template: PolicyConfig,
    delta_axis: np.ndarray,
    gamma_axis: np.ndarray,
) -> RoiGrid:
    """Evaluate ROI and total cost over the (delta, gamma) design space."""
    delta_axis = np.asarray(delta_axis, dtype=float)
    gamma_axis = np.asarray(gamma_axis, dtype=float)
    for name, axis in (("delta_axis", delta_axis), ("gamma_axis", gamma_axis)):
        if axis.size == 0:
            raise ValueError(f"{name} must be nonempty")
        if axis.size > 1 and not np.all(np.diff(axis) > 0):
            raise ValueError(f"{name} must be strictly increasing")

    c_base = baseline_cost(params)
    roi_grid = np.empty((delta_axis.size, gamma_axis.size))
    cost_grid = np.empty_like(roi_grid)
    for i, delta in enumerate(delta_axis):
        for j, gamma in enumerate(gamma_axis):
            policy = replace(
                template, adherence_gain_delta=float(delta), cost_scale_gamma=float(gamma)
            )
            try:
                roi_grid[i, j], cost_grid[i, j] = _policy_roi(params, policy, c_base)
            except ValueError as exc:
                raise ValueError(
                    f"sweep cell (delta={delta}, gamma={gamma}) failed: {exc}"
                ) from exc

    breakevens = tuple(
        breakeven_gamma(params, template, float(delta)) for delta in delta_axis
    )
    return RoiGrid(
        delta_axis=delta_axis,
        gamma_axis=gamma_axis,
        roi_percent=roi_grid,
        total_cost=cost_grid,
        breakeven_gamma_per_delta=breakevens,
    )


def roi_slope(
    params: ModelParams,
    template: PolicyConfig,
    delta: float,
    gamma: float,
) -> float:
    """dROI/dgamma by central finite difference with step 0.01 * max(gamma, 1).

    Falls back to a one-sided forward difference when gamma - h would be
    negative.
    """
    check_finite("gamma", gamma)
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    c_base = baseline_cost(params)
    h = 0.01 * max(gamma, 1.0)

    def f(g: float) -> float:
        policy = replace(template, adherence_gain_delta=delta, cost_scale_gamma=g)
        return _policy_roi(params, policy, c_base)[0]

    if gamma - h < 0:
        return (f(gamma + h) - f(gamma)) / h
    return (f(gamma + h) - f(gamma - h)) / (2.0 * h)


def frontier(grid: RoiGrid) -> list[tuple[float, float]]:
    """Pareto-nondominated (total_cost, roi_percent) pairs, ascending by cost.

    A cell is dominated when another cell costs no more and returns no less,
    with at least one strict improvement.
    """
    costs = grid.total_cost.ravel()
    rois = grid.roi_percent.ravel()
    if costs.size == 0:
        raise ValueError("empty grid")
    points = list(zip(costs.tolist(), rois.tolist()))
    kept: list[tuple[float, float]] = []
    for c, r in points:
        dominated = any(
            (c2 <= c and r2 >= r) and (c2 < c or r2 > r) for c2, r2 in points
        )
        if not dominated:
            kept.append((c, r))
    kept.sort(key=lambda p: (p[0], -p[1]))
    return kept


def scenario_roi_table(params: ModelParams, preset_names: tuple[str, ...] | None = None) -> dict[str, float]:
    """ROI per preset against the shared baseline (the Figure 4/5 comparison)."""
    from .scenarios import PRESET_NAMES

    names = preset_names or tuple(n for n in PRESET_NAMES if n != "baseline")
    c_base = baseline_cost(params)
    out: dict[str, float] = {}
    for name in names:
        out[name] = _policy_roi(params, build_preset(name), c_base)[0]
    return out
