import pytest

from adhersim.costmodel import simulate_trajectory
from adhersim.params import ModelParams, reference_params
from adhersim.scenarios import PRESET_NAMES, build_preset


@pytest.fixture(scope="session")
def ref_params() -> ModelParams:
    return reference_params()


@pytest.fixture(scope="session")
def preset_trajectories(ref_params):
    """One simulated trajectory per preset, shared across tests."""
    return {name: simulate_trajectory(ref_params, build_preset(name)) for name in PRESET_NAMES}


@pytest.fixture(scope="session")
def baseline_traj(preset_trajectories):
    return preset_trajectories["baseline"]


def make_params(**overrides) -> ModelParams:
    """Simple valid parameter vector for closed-form and unit tests."""
    defaults = dict(
        baseline_cost_C0=1000.0,
        discount_rate_rho=0.03,
        disease_max_Dmax=0.95,
        disease_steepness_k=0.5,
        disease_midpoint_s0=5.0,
        disease_cost_alpha=200.0,
        adherence_baseline_A0=0.5,
        adherence_cost_beta=-100.0,
        health_weight_lambda=0.0,
        severity_coupling_eta=0.0,
        policy_unit_cost=1.0,
        horizon_T=10.0,
    )
    defaults.update(overrides)
    return ModelParams(**defaults)
