"""Policy scenario definitions: adherence trajectories, expenditure functions,
the adaptive-nudge feedback sweep, and the stress transforms.

All adherence and expenditure functions are right-continuous in time; a policy
active from time tau contributes from s = tau onward.  Event times are snapped
up to the canonical 0.01-year grid so every discontinuity sits on a grid node.
The integrator also needs left limits at jump nodes, which every evaluator
here exposes through a ``side`` argument ("right" default, "left" for the
limit from below).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .numerics import STEPS_PER_YEAR, check_finite, snap_up, time_grid
from .params import ModelParams

# Pinned scenario defaults not covered by the reference parameter file.
REGRESSIVE_DECAY_THETA = 0.5      # per year; half-life ~1.4 years
ADAPTIVE_DECAY_THETA = 0.02       # per year; slow erosion between nudges
ADAPTIVE_NUDGE_THRESHOLD = 0.82   # re-engagement trigger level
NUDGE_WINDOW_YEARS = 0.5          # each activation opens a cost window of this length
DEFAULT_NUDGE_UNIT_COST = 0.5     # units of P(s) added per open window
DEFAULT_BASELINE_DECAY = 0.05     # per year, decaying-counterfactual variant


class PolicyKind(enum.Enum):
    BASELINE = "baseline"
    EARLY_ADHERENCE = "early_adherence"
    DELAYED = "delayed"
    REGRESSIVE = "regressive"
    ADAPTIVE_NUDGES = "adaptive_nudges"
    LOW_IMPACT = "low_impact"
    CUSTOM = "custom"


class StressKind(enum.Enum):
    COST_INFLATION = "cost_inflation"
    ACCELERATED_PROGRESSION = "accelerated_progression"


@dataclass(frozen=True)
class PolicyConfig:
    """One policy design.

    Fields not used by a given kind are ignored by the evaluators but still
    range-validated.  ``inflation_factor`` and ``progression_compression`` are
    stress multipliers applied by :func:`apply_stress`.
    """

    kind: PolicyKind
    start_tau: float = 0.0
    adherence_gain_delta: float = 0.0
    cost_scale_gamma: float = 0.0
    decay_theta: float = 0.0
    nudge_threshold: float = 0.0
    nudge_unit_cost: float = DEFAULT_NUDGE_UNIT_COST
    baseline_decay: float | None = None
    inflation_factor: float = 1.0
    progression_compression: float = 1.0

    def __post_init__(self) -> None:
        check_finite("start_tau", self.start_tau)
        check_finite("adherence_gain_delta", self.adherence_gain_delta)
        check_finite("cost_scale_gamma", self.cost_scale_gamma)
        check_finite("decay_theta", self.decay_theta)
        check_finite("nudge_threshold", self.nudge_threshold)
        check_finite("nudge_unit_cost", self.nudge_unit_cost)
        if self.start_tau < 0:
            raise ValueError("start_tau must be >= 0")
        if not (0.0 <= self.adherence_gain_delta <= 1.0):
            raise ValueError("adherence_gain_delta must be in [0, 1]")
        if self.cost_scale_gamma < 0:
            raise ValueError("cost_scale_gamma must be >= 0")
        if self.decay_theta < 0:
            raise ValueError("decay_theta must be >= 0")
        if not (0.0 <= self.nudge_threshold <= 1.0):
            raise ValueError("nudge_threshold must be in [0, 1]")
        if self.nudge_unit_cost < 0:
            raise ValueError("nudge_unit_cost must be >= 0")
        if self.baseline_decay is not None:
            check_finite("baseline_decay", self.baseline_decay)
            if self.baseline_decay < 0:
                raise ValueError("baseline_decay must be >= 0")
        if self.inflation_factor < 1.0:
            raise ValueError("inflation_factor must be >= 1")
        if not (0.0 < self.progression_compression <= 1.0):
            raise ValueError("progression_compression must be in (0, 1]")

    @property
    def tau_snapped(self) -> float:
        return snap_up(self.start_tau)


@dataclass(frozen=True)
class NudgeLog:
    """Activation times of the adaptive re-engagement rule."""

    activation_times: tuple[float, ...] = ()

    @property
    def count(self) -> int:
        return len(self.activation_times)


EMPTY_NUDGE_LOG = NudgeLog()

_PRESETS = {
    "baseline": dict(kind=PolicyKind.BASELINE),
    "early_adherence": dict(
        kind=PolicyKind.EARLY_ADHERENCE, start_tau=2.0,
        adherence_gain_delta=0.3, cost_scale_gamma=1.5,
    ),
    "delayed": dict(
        kind=PolicyKind.DELAYED, start_tau=5.0,
        adherence_gain_delta=0.3, cost_scale_gamma=1.5,
    ),
    "regressive": dict(
        kind=PolicyKind.REGRESSIVE, start_tau=2.0,
        adherence_gain_delta=0.3, cost_scale_gamma=1.2,
        decay_theta=REGRESSIVE_DECAY_THETA,
    ),
    "adaptive_nudges": dict(
        kind=PolicyKind.ADAPTIVE_NUDGES, start_tau=2.0,
        adherence_gain_delta=0.3, cost_scale_gamma=2.0,
        decay_theta=ADAPTIVE_DECAY_THETA, nudge_threshold=ADAPTIVE_NUDGE_THRESHOLD,
    ),
    "low_impact": dict(
        kind=PolicyKind.LOW_IMPACT, start_tau=2.0,
        adherence_gain_delta=0.05, cost_scale_gamma=3.0,
    ),
}

PRESET_NAMES = tuple(_PRESETS)


def build_preset(name: str) -> PolicyConfig:
    """Return the pinned configuration for a named scenario."""
    key = name.strip().lower()
    if key not in _PRESETS:
        raise ValueError(
            f"unknown scenario {name!r}; valid names: {', '.join(PRESET_NAMES)}"
        )
    return PolicyConfig(**_PRESETS[key])


def validate_pair(params: ModelParams, policy: PolicyConfig) -> None:
    """Cross-checks that couple the parameter vector with a policy design.

    Only conditions the engine cannot evaluate past are rejected here.
    A0 + delta above 1 is tolerated (adherence is clamped to [0, 1]) and an
    unreachable nudge threshold simply never triggers: stochastic draws near
    the edges of their support must propagate through the engine rather than
    abort a whole Monte Carlo run.  Hand-authored run configurations enforce
    the stricter A0 + delta <= 1 and threshold < A0 + delta invariants at
    parse time instead (see cli/runconfig).
    """
    if policy.start_tau > params.horizon_T:
        raise ValueError("start_tau lies beyond horizon_T")


def validate_authored_pair(params: ModelParams, policy: PolicyConfig) -> None:
    """Strict invariants for hand-authored configurations."""
    validate_pair(params, policy)
    a_top = params.adherence_baseline_A0 + policy.adherence_gain_delta
    if a_top > 1.0 + 1e-12:
        raise ValueError(
            f"adherence_gain_delta: A0 + delta = {a_top:.4f} exceeds 1"
        )
    if policy.kind is PolicyKind.ADAPTIVE_NUDGES and policy.nudge_threshold >= a_top:
        raise ValueError(
            "nudge_threshold must be below adherence_baseline_A0 + adherence_gain_delta"
        )


def _indicator(x: np.ndarray, side: str) -> np.ndarray:
    # Right-continuous Heaviside: active for x >= 0.  The left limit at the
    # jump itself is the pre-jump value, hence strict inequality.
    if side == "right":
        return x >= 0.0
    if side == "left":
        return x > 0.0
    raise ValueError(f"side must be 'right' or 'left', got {side!r}")


def _base_component(params: ModelParams, policy: PolicyConfig, s: np.ndarray) -> np.ndarray:
    a0 = params.adherence_baseline_A0
    if policy.baseline_decay is not None:
        return a0 * np.exp(-policy.baseline_decay * s)
    return np.full_like(s, a0, dtype=float)


def _last_boost_times(policy: PolicyConfig, nudges: NudgeLog, s: np.ndarray, side: str) -> np.ndarray:
    """Most recent boost (policy start or activation) at or before each s."""
    boosts = np.array((policy.tau_snapped,) + nudges.activation_times)
    idx = (
        np.searchsorted(boosts, s, side="right")
        if side == "right"
        else np.searchsorted(boosts, s, side="left")
    )
    idx = np.maximum(idx - 1, 0)
    return boosts[idx]


def adherence_array(
    params: ModelParams,
    policy: PolicyConfig,
    nudges: NudgeLog,
    s: np.ndarray,
    side: str = "right",
) -> np.ndarray:
    """Vectorized adherence trajectory A(s), clamped to [0, 1]."""
    s = np.asarray(s, dtype=float)
    tau = policy.tau_snapped
    delta = policy.adherence_gain_delta
    active = _indicator(s - tau, side)
    base = _base_component(params, policy, s)

    kind = policy.kind
    if kind is PolicyKind.BASELINE:
        gain = np.zeros_like(s)
    elif kind in (PolicyKind.EARLY_ADHERENCE, PolicyKind.DELAYED, PolicyKind.LOW_IMPACT):
        gain = delta * active
    elif kind is PolicyKind.REGRESSIVE or (kind is PolicyKind.CUSTOM and policy.decay_theta > 0):
        gain = delta * np.exp(-policy.decay_theta * np.maximum(s - tau, 0.0)) * active
    elif kind is PolicyKind.CUSTOM:
        gain = delta * active
    elif kind is PolicyKind.ADAPTIVE_NUDGES:
        t_last = _last_boost_times(policy, nudges, s, side)
        gain = delta * np.exp(-policy.decay_theta * np.maximum(s - t_last, 0.0)) * active
    else:  # pragma: no cover
        raise ValueError(f"unhandled policy kind {kind}")
    return np.clip(base + gain, 0.0, 1.0)


def policy_cost_array(
    policy: PolicyConfig,
    nudges: NudgeLog,
    s: np.ndarray,
    side: str = "right",
) -> np.ndarray:
    """Vectorized expenditure function P(s), in policy units (scaled to dollars
    by the model's policy_unit_cost inside the cost integrand)."""
    s = np.asarray(s, dtype=float)
    if policy.kind is PolicyKind.BASELINE:
        return np.zeros_like(s)
    p = _indicator(s - policy.tau_snapped, side).astype(float)
    if policy.kind is PolicyKind.ADAPTIVE_NUDGES:
        for t_a in nudges.activation_times:
            window_open = (
                _indicator(s - t_a, side).astype(float)
                - _indicator(s - (t_a + NUDGE_WINDOW_YEARS), side).astype(float)
            )
            p = p + policy.nudge_unit_cost * window_open
    return p


def adherence_at(params: ModelParams, policy: PolicyConfig, s: float) -> float:
    """Adherence fraction at time s (right-continuous)."""
    if not (0.0 <= s <= params.horizon_T):
        raise ValueError(f"s={s} outside [0, {params.horizon_T}]")
    validate_pair(params, policy)
    nudges = (
        compute_nudge_log(params, policy)
        if policy.kind is PolicyKind.ADAPTIVE_NUDGES
        else EMPTY_NUDGE_LOG
    )
    return float(adherence_array(params, policy, nudges, np.array([s]))[0])


def policy_cost_at(policy: PolicyConfig, nudges: NudgeLog, s: float) -> float:
    """Policy expenditure P(s) in policy units (right-continuous)."""
    if s < 0:
        raise ValueError(f"s={s} must be >= 0")
    return float(policy_cost_array(policy, nudges, np.array([s]))[0])


def compute_nudge_log(params: ModelParams, policy: PolicyConfig) -> NudgeLog:
    """Deterministic forward sweep of the adaptive re-engagement rule.

    The sweep always runs on the canonical 0.01-year grid: whenever the
    decaying adherence value falls below the trigger threshold at a node, an
    activation is recorded there and adherence resets to A0 + delta.  The log
    is therefore independent of any finer quadrature grid used later.
    """
    if policy.kind is not PolicyKind.ADAPTIVE_NUDGES:
        raise ValueError("compute_nudge_log requires an adaptive_nudges policy")
    validate_pair(params, policy)
    a0 = params.adherence_baseline_A0
    delta = policy.adherence_gain_delta
    theta = policy.decay_theta
    threshold = policy.nudge_threshold
    if theta == 0.0 or delta == 0.0:
        return EMPTY_NUDGE_LOG
    if a0 + delta <= threshold:
        # The boosted level never reaches the trigger band, so adherence can
        # never cross below it; the rule stays inert.
        return EMPTY_NUDGE_LOG

    times = time_grid(params.horizon_T, STEPS_PER_YEAR)
    i_start = int(round(policy.tau_snapped * STEPS_PER_YEAR))
    t_boost = times[i_start]
    activations: list[float] = []
    for i in range(i_start + 1, len(times)):
        value = a0 + delta * math.exp(-theta * (times[i] - t_boost))
        if value < threshold:
            t_boost = times[i]
            activations.append(t_boost)
    return NudgeLog(tuple(activations))


def apply_stress(policy: PolicyConfig, stress: StressKind, value: float) -> PolicyConfig:
    """Return a copy of the policy with one stress transform applied.

    CostInflation multiplies the effective cost intensity by ``value``
    (reference 1.20); AcceleratedProgression rescales disease time by
    ``value`` (reference 0.85), applied in the cost model as k -> k/value,
    s0 -> value * s0.
    """
    check_finite("stress value", value)
    if stress is StressKind.COST_INFLATION:
        if value < 1.0:
            raise ValueError("cost inflation factor must be >= 1")
        return replace(policy, inflation_factor=value)
    if stress is StressKind.ACCELERATED_PROGRESSION:
        if not (0.0 < value <= 1.0):
            raise ValueError("progression compression must be in (0, 1]")
        return replace(policy, progression_compression=value)
    raise ValueError(f"unknown stress kind {stress!r}")
