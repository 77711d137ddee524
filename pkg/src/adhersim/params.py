"""Calibrated model parameters and the reference parameter file format.

The reference file is plain ``key = value`` text, one field per line, with
``#`` comments.  Keys must match ModelParams field names exactly; unknown keys
are rejected.  All fields are required except ``severity_coupling_eta``
(default 0), ``health_weight_lambda`` (default 0) and ``policy_unit_cost``
(default 1).
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .numerics import check_finite


@dataclass(frozen=True)
class ModelParams:
    """Full calibrated parameter vector for the cost model.

    policy_unit_cost is the dollar value (per year) of one unit of the policy
    expenditure function P(s); the dimensionless intensity gamma multiplies
    gamma * policy_unit_cost * P(s) into the cost integrand.
    """

    baseline_cost_C0: float        # dollars, cumulative cost at t=0
    discount_rate_rho: float       # per year, continuous discounting
    disease_max_Dmax: float        # severity asymptote, in (0, 1]
    disease_steepness_k: float     # per year, logistic growth rate
    disease_midpoint_s0: float     # years, logistic inflection time
    disease_cost_alpha: float      # dollars/year per unit severity
    adherence_baseline_A0: float   # fraction in [0, 1]
    adherence_cost_beta: float     # dollars/year per squared adherence unit; < 0 is savings
    health_weight_lambda: float = 0.0   # dollars/year per health-outcome unit
    severity_coupling_eta: float = 0.0  # dimensionless >= 0, adherence -> progression
    policy_unit_cost: float = 1.0       # dollars/year per unit of P(s)
    horizon_T: float = 10.0             # years

    def __post_init__(self) -> None:
        for f in fields(self):
            check_finite(f.name, getattr(self, f.name))
        if self.discount_rate_rho < 0:
            raise ValueError("discount_rate_rho must be >= 0")
        if self.horizon_T <= 0:
            raise ValueError("horizon_T must be > 0")
        if not (0.0 < self.disease_max_Dmax <= 1.0):
            raise ValueError("disease_max_Dmax must be in (0, 1]")
        if not (0.0 <= self.adherence_baseline_A0 <= 1.0):
            raise ValueError("adherence_baseline_A0 must be in [0, 1]")
        if self.disease_steepness_k <= 0:
            raise ValueError("disease_steepness_k must be > 0")
        if self.severity_coupling_eta < 0:
            raise ValueError("severity_coupling_eta must be >= 0")
        if self.policy_unit_cost < 0:
            raise ValueError("policy_unit_cost must be >= 0")


_OPTIONAL_DEFAULTS = {
    "severity_coupling_eta": 0.0,
    "health_weight_lambda": 0.0,
    "policy_unit_cost": 1.0,
}

_FIELD_NAMES = [f.name for f in fields(ModelParams)]


def parse_params(text: str) -> ModelParams:
    """Parse reference-parameter text into a validated ModelParams."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _FIELD_NAMES:
            raise ValueError(
                f"line {lineno}: unknown key {key!r} (valid keys: {', '.join(_FIELD_NAMES)})"
            )
        if key in values:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = float(val.strip())
        except ValueError:
            raise ValueError(f"line {lineno}: value for {key!r} is not a number: {val.strip()!r}") from None

    missing = [
        name for name in _FIELD_NAMES
        if name not in values and name not in _OPTIONAL_DEFAULTS and name != "horizon_T"
    ]
    if "horizon_T" not in values:
        values["horizon_T"] = 10.0
    if missing:
        raise ValueError(f"missing required keys: {', '.join(missing)}")
    return ModelParams(**values)


def load_params(path: str | Path) -> ModelParams:
    """Load and validate a reference parameter file."""
    return parse_params(Path(path).read_text())


def reference_params() -> ModelParams:
    """The pinned reference parameter vector shipped with the package."""
    return load_params(reference_params_path())


def reference_params_path() -> Path:
    return Path(__file__).parent / "data" / "reference_params.txt"
