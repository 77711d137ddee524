"""Run configuration: plain key = value documents driving one run each.

Example::

    params_file = params/reference_params.txt
    scenario = early_adherence
    mode = mc
    output_dir = out/mc_early
    seed = 42
    n_draws = 10000
    policy.cost_scale_gamma = 1.5   # optional preset overrides

Unknown keys, missing mode-required keys, and out-of-range values are
rejected with the offending key named.  ``serialize_run_config`` emits a
canonical document that parses back to an equal configuration.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields, replace

from .scenarios import PRESET_NAMES, PolicyConfig, PolicyKind, build_preset


class RunMode(enum.Enum):
    SIMULATE = "simulate"
    COMPARE = "compare"
    SWEEP = "sweep"
    BREAKEVEN = "breakeven"
    MONTE_CARLO = "mc"
    STRESS = "stress"


_POLICY_OVERRIDE_FIELDS = (
    "start_tau",
    "adherence_gain_delta",
    "cost_scale_gamma",
    "decay_theta",
    "nudge_threshold",
    "nudge_unit_cost",
    "baseline_decay",
    "inflation_factor",
    "progression_compression",
)

_STRESS_KINDS = ("cost_inflation", "accelerated_progression")
_STRESS_DEFAULTS = {"cost_inflation": 1.2, "accelerated_progression": 0.85}


@dataclass(frozen=True)
class RunConfig:
    params_file: str
    scenario: str
    mode: RunMode
    output_dir: str
    seed: int | None = None
    n_draws: int | None = None
    n_workers: int = 1
    delta_axis: tuple[float, ...] = ()
    gamma_axis: tuple[float, ...] = ()
    stress_kind: str | None = None
    stress_value: float | None = None
    policy_overrides: dict[str, float] = field(default_factory=dict)

    def build_policy(self) -> PolicyConfig:
        if self.scenario == "custom":
            policy = PolicyConfig(kind=PolicyKind.CUSTOM)
        else:
            policy = build_preset(self.scenario)
        if self.policy_overrides:
            policy = replace(policy, **self.policy_overrides)
        return policy


def _parse_axis(key: str, raw: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in raw.replace(",", " ").split())
    except ValueError:
        raise ValueError(f"{key}: expected a list of numbers, got {raw!r}") from None
    if not values:
        raise ValueError(f"{key}: must contain at least one value")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"{key}: values must be strictly increasing")
    return values


def parse_run_config(text: str) -> RunConfig:
    """Parse and fully validate a run-configuration document."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key in raw:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    def take(key: str) -> str | None:
        return raw.pop(key, None)

    params_file = take("params_file")
    if not params_file:
        raise ValueError("missing required key: params_file")
    scenario = take("scenario")
    if not scenario:
        raise ValueError("missing required key: scenario")
    scenario = scenario.lower()
    if scenario not in PRESET_NAMES + ("custom",):
        raise ValueError(
            f"scenario: unknown name {scenario!r}; valid: {', '.join(PRESET_NAMES + ('custom',))}"
        )
    mode_raw = take("mode")
    if not mode_raw:
        raise ValueError("missing required key: mode")
    try:
        mode = RunMode(mode_raw.lower())
    except ValueError:
        raise ValueError(
            f"mode: unknown mode {mode_raw!r}; valid: {', '.join(m.value for m in RunMode)}"
        ) from None
    output_dir = take("output_dir")
    if not output_dir:
        raise ValueError("missing required key: output_dir")

    seed = take("seed")
    seed_val = None
    if seed is not None:
        try:
            seed_val = int(seed)
        except ValueError:
            raise ValueError(f"seed: expected an integer, got {seed!r}") from None

    n_draws = take("n_draws")
    n_draws_val = None
    if n_draws is not None:
        try:
            n_draws_val = int(n_draws)
        except ValueError:
            raise ValueError(f"n_draws: expected an integer, got {n_draws!r}") from None
        if n_draws_val < 1:
            raise ValueError("n_draws: must be >= 1")

    n_workers = take("n_workers")
    n_workers_val = 1
    if n_workers is not None:
        n_workers_val = int(n_workers)
        if n_workers_val < 1:
            raise ValueError("n_workers: must be >= 1")

    delta_axis = take("delta_axis")
    delta_vals = _parse_axis("delta_axis", delta_axis) if delta_axis else ()
    gamma_axis = take("gamma_axis")
    gamma_vals = _parse_axis("gamma_axis", gamma_axis) if gamma_axis else ()

    stress_kind = take("stress_kind")
    if stress_kind is not None:
        stress_kind = stress_kind.lower()
        if stress_kind not in _STRESS_KINDS:
            raise ValueError(
                f"stress_kind: unknown kind {stress_kind!r}; valid: {', '.join(_STRESS_KINDS)}"
            )
    stress_value_raw = take("stress_value")
    stress_value = float(stress_value_raw) if stress_value_raw is not None else None

    overrides: dict[str, float] = {}
    for key in list(raw):
        if key.startswith("policy."):
            name = key[len("policy."):]
            if name not in _POLICY_OVERRIDE_FIELDS:
                raise ValueError(
                    f"{key}: unknown policy field; valid: "
                    + ", ".join("policy." + f for f in _POLICY_OVERRIDE_FIELDS)
                )
            try:
                overrides[name] = float(raw.pop(key))
            except ValueError:
                raise ValueError(f"{key}: expected a number, got {raw[key]!r}") from None
    if raw:
        raise ValueError(f"unknown key: {', '.join(sorted(raw))}")

    # mode-required fields
    if mode is RunMode.MONTE_CARLO:
        if seed_val is None:
            raise ValueError("mode=mc requires key: seed")
        if n_draws_val is None:
            raise ValueError("mode=mc requires key: n_draws")
    if mode is RunMode.SWEEP:
        if not delta_vals:
            raise ValueError("mode=sweep requires key: delta_axis")
        if not gamma_vals:
            raise ValueError("mode=sweep requires key: gamma_axis")
    if mode is RunMode.BREAKEVEN and not delta_vals:
        raise ValueError("mode=breakeven requires key: delta_axis")
    if mode is RunMode.STRESS and stress_kind is None:
        raise ValueError("mode=stress requires key: stress_kind")
    if stress_value is not None:
        if stress_kind is None:
            raise ValueError("stress_value given without stress_kind")
        if stress_kind == "cost_inflation" and stress_value < 1.0:
            raise ValueError("stress_value: cost_inflation factor must be >= 1")
        if stress_kind == "accelerated_progression" and not (0.0 < stress_value <= 1.0):
            raise ValueError("stress_value: progression compression must be in (0, 1]")

    config = RunConfig(
        params_file=params_file,
        scenario=scenario,
        mode=mode,
        output_dir=output_dir,
        seed=seed_val,
        n_draws=n_draws_val,
        n_workers=n_workers_val,
        delta_axis=delta_vals,
        gamma_axis=gamma_vals,
        stress_kind=stress_kind,
        stress_value=stress_value,
        policy_overrides=overrides,
    )
    config.build_policy()  # surfaces out-of-range override values now
    return config


def effective_stress_value(config: RunConfig) -> float:
    if config.stress_kind is None:
        raise ValueError("no stress_kind configured")
    if config.stress_value is not None:
        return config.stress_value
    return _STRESS_DEFAULTS[config.stress_kind]


def serialize_run_config(config: RunConfig) -> str:
    """Canonical document form; parse(serialize(c)) == c."""
    lines = [
        f"params_file = {config.params_file}",
        f"scenario = {config.scenario}",
        f"mode = {config.mode.value}",
        f"output_dir = {config.output_dir}",
    ]
    if config.seed is not None:
        lines.append(f"seed = {config.seed}")
    if config.n_draws is not None:
        lines.append(f"n_draws = {config.n_draws}")
    if config.n_workers != 1:
        lines.append(f"n_workers = {config.n_workers}")
    if config.delta_axis:
        lines.append("delta_axis = " + ", ".join(repr(v) for v in config.delta_axis))
    if config.gamma_axis:
        lines.append("gamma_axis = " + ", ".join(repr(v) for v in config.gamma_axis))
    if config.stress_kind is not None:
        lines.append(f"stress_kind = {config.stress_kind}")
    if config.stress_value is not None:
        lines.append(f"stress_value = {config.stress_value!r}")
    for name in sorted(config.policy_overrides):
        lines.append(f"policy.{name} = {config.policy_overrides[name]!r}")
    return "\n".join(lines) + "\n"
