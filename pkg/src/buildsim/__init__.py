"""Modular white-box simulation of a heated single-family house.

5R1C envelope, boiler or heat-pump hydronics, PV and battery, stochastic
occupancy and a 36-scenario January benchmark with energy, CO2 and cost
accounting.
"""

from .config import RunConfig, load_config, validate_config
from .engine import BuildingModel, SimulationTrace, simulate
from .errors import BuildSimError, ConfigError, SimulationError
from .scenario import ScenarioResult, ScenarioSpec, Tariffs, account, build_matrix, parse_code, run_matrix

__version__ = "0.1.0"

__all__ = [
    "BuildSimError",
    "BuildingModel",
    "ConfigError",
    "RunConfig",
    "ScenarioResult",
    "ScenarioSpec",
    "SimulationError",
    "SimulationTrace",
    "Tariffs",
    "account",
    "build_matrix",
    "load_config",
    "parse_code",
    "run_matrix",
    "simulate",
    "validate_config",
]
