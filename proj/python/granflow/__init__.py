"""Python bindings for the granflow simulator."""

import json

from . import _core
from ._core import (
    ConfigError,
    ScenarioError,
    SimulationError,
    bulk_implicit_residual,
    observed_orders,
    plastic_stress_reg,
    scenario_names,
    slip_traction_reg,
    viscous_stress_activated,
    yield_stress,
)

__all__ = [
    "ConfigError",
    "ScenarioError",
    "SimulationError",
    "bulk_implicit_residual",
    "config_hash",
    "default_config",
    "normalize_config",
    "observed_orders",
    "plastic_stress_reg",
    "run_scenario",
    "scenario_names",
    "simulate",
    "slip_traction_reg",
    "viscous_stress_activated",
    "yield_stress",
]


def _dump(config):
    return config if isinstance(config, str) else json.dumps(config)


def default_config():
    """Every config key with its default value."""
    return json.loads(_core.default_config())


def normalize_config(config):
    """Validate a config (dict or JSON text) and return it with defaults filled in."""
    return json.loads(_core.normalize_config(_dump(config)))


def config_hash(config):
    return _core.config_hash(_dump(config))


def simulate(config):
    """Run to t_end. Returns the final fields as numpy arrays plus the time-series CSV."""
    return _core.simulate(_dump(config))


def run_scenario(name):
    if name not in scenario_names():
        raise KeyError(f"unknown scenario {name!r}")
    return _core.run_scenario(name)
