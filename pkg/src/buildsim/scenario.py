"""The 6 x 3 x 2 scenario matrix, its execution and energy/CO2/cost accounting.

Building variants combine an insulation preset with a heating plant:

====  ==========  ===============================
B1    worse       gas boiler + buffer tank
B2    worse       ground-source heat pump
B3    worse       heat pump + PV + battery
B4    better      gas boiler + buffer tank
B5    better      ground-source heat pump
B6    better      heat pump + PV + battery
====  ==========  ===============================

Occupancy: O1 normal (reference profile), O2 vacation (nobody home),
O3 always home. Weather: W1 reference, W2 cold wave.
"""

from __future__ import annotations

import csv
import io
import itertools
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import NamedTuple

import numpy as np

from . import engine, envelope, occupancy, plant
from .config import ResolvedInputs, RunConfig, filter_codes, load_config, resolve
from .errors import ConfigError


J_PER_KWH = 3.6e6


class BuildingVariant(NamedTuple):
    insulation: str
    plant: str
    pv: bool


BUILDING_VARIANTS = {
    "B1": BuildingVariant("worse", "boiler", False),
    "B2": BuildingVariant("worse", "heat_pump", False),
    "B3": BuildingVariant("worse", "heat_pump", True),
    "B4": BuildingVariant("better", "boiler", False),
    "B5": BuildingVariant("better", "heat_pump", False),
    "B6": BuildingVariant("better", "heat_pump", True),
}
OCCUPANCY_VARIANTS = {"O1": "normal", "O2": "vacation", "O3": "always home"}
WEATHER_VARIANTS = {"W1": "reference", "W2": "cold wave"}

_CODE = re.compile(r"^(B[1-6])(O[1-3])(W[12])$")

RESULT_COLUMNS = ("scenario_code", "v_gas_m3", "e_load_kwh", "e_gen_kwh", "e_feed_kwh", "co2_t", "cost_eur")


@dataclass(frozen=True)
class ScenarioSpec:
    building: str
    occupancy: str
    weather: str
    seed: int = 0

    def __post_init__(self):
        if self.building not in BUILDING_VARIANTS:
            raise ConfigError(f"unknown building variant {self.building!r}")
        if self.occupancy not in OCCUPANCY_VARIANTS:
            raise ConfigError(f"unknown occupancy variant {self.occupancy!r}")
        if self.weather not in WEATHER_VARIANTS:
            raise ConfigError(f"unknown weather variant {self.weather!r}")

    @property
    def code(self) -> str:
        return self.building + self.occupancy + self.weather

    @property
    def variant(self) -> BuildingVariant:
        return BUILDING_VARIANTS[self.building]


def parse_code(code: str, seed: int = 0) -> ScenarioSpec:
    """``"B1O1W1"`` -> ScenarioSpec; the inverse of :attr:`ScenarioSpec.code`."""
    m = _CODE.match(code)
    if m is None:
        raise ConfigError(f"invalid scenario code {code!r}")
    return ScenarioSpec(*m.groups(), seed=seed)


ALL_CODES = tuple(b + o + w for b, o, w in itertools.product(BUILDING_VARIANTS, OCCUPANCY_VARIANTS,
                                                             WEATHER_VARIANTS))


def build_matrix(config: RunConfig | None = None, pattern: str | None = None,
                 resolved: ResolvedInputs | None = None) -> list[ScenarioSpec]:
    """Scenario specs matching ``pattern`` (default: the config filter), in table order.

    Every spec carries the config seed, so variants differ only in the
    factor they vary.
    """
    config = config or load_config()
    pattern = config.filter if pattern is None else pattern
    presets = set(resolved.fabrics) if resolved is not None else set(config.section("fabric"))
    codes = filter_codes(ALL_CODES, pattern)
    if not codes:
        raise ConfigError(f"filter {pattern!r} matches no scenario")
    specs = [parse_code(c, seed=config.seed) for c in codes]
    for s in specs:
        if s.variant.insulation not in presets:
            raise ConfigError(f"{s.code}: unknown fabric preset {s.variant.insulation!r}")
    return specs


# ---------------------------------------------------------------------------
# Model construction
# ---------------------------------------------------------------------------

def plant_rating(fabric: envelope.BuildingFabric, res: ResolvedInputs) -> float:
    """Design heat load at the sizing conditions times the sizing margin, W."""
    s = res.sizing
    net = envelope.build_network(fabric)
    load = envelope.design_heat_load(net, float(s.get("t_ext", 263.15)), float(s.get("t_air", 295.15)))
    return float(s.get("margin", 1.2)) * load


def presence_for(variant: str, res: ResolvedInputs) -> occupancy.PresenceProfile:
    size = res.household_size
    if variant == "O1":
        return res.profile_table.profile(size)
    return occupancy.PresenceProfile.constant(0.0 if variant == "O2" else 1.0, size)


def model_for(spec: ScenarioSpec, res: ResolvedInputs, config: RunConfig) -> engine.BuildingModel:
    v = spec.variant
    if v.insulation not in res.fabrics:
        raise ConfigError(f"{spec.code}: unknown fabric preset {v.insulation!r}")
    fabric = res.fabrics[v.insulation]
    q = plant_rating(fabric, res)
    r = res.radiator
    t_design = float(res.sizing.get("t_air", 295.15))
    ua = float(r.get("ua_factor", 1.5)) * q / (float(r.get("design_supply", 318.15)) - t_design)
    radiator = plant.RadiatorParams(
        ua=ua,
        max_flow=q / (plant.CP_WATER * float(r.get("design_delta_t", 5.0))),
        band=float(r.get("band", 2.0)),
        radiative_fraction=float(r.get("radiative_fraction", 0.0)),
    )
    try:
        if v.plant == "boiler":
            kw = dict(boiler=plant.BoilerParams(q_rated=q, **res.boiler))
        else:
            kw = dict(heat_pump=plant.HeatPumpParams(q_rated=q, **res.heat_pump))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{spec.code}: {exc}") from exc
    init = res.initial
    return engine.BuildingModel(
        fabric=fabric,
        weather=res.weather_for(spec.weather),
        presence=presence_for(spec.occupancy, res),
        radiator=radiator,
        plant_kind=v.plant,
        appliances=res.appliances,
        pv=res.pv if v.pv else None,
        battery=res.battery if v.pv else None,
        schedule=res.schedule,
        thermostat=res.thermostat,
        fuel=res.fuel,
        dt=config.dt,
        start=config.start,
        t_init=float(init.get("t_air", 293.15)),
        t_loop_init=float(init.get("t_loop", 293.15)),
        t_tank_init=float(init.get("t_tank", 333.15)),
        code=spec.code,
        **kw,
    )


# ---------------------------------------------------------------------------
# Accounting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Tariffs:
    elec_price: float = 0.3986  # EUR/kWh
    gas_price: float = 0.02907  # EUR/kWh of gas (HHV)
    feed_in_tariff: float = 0.0  # EUR/kWh
    elec_co2: float = 0.380  # kg/kWh
    fuel: plant.FuelConstants = field(default_factory=plant.FuelConstants)

    def __post_init__(self):
        for k in ("elec_price", "gas_price", "feed_in_tariff", "elec_co2"):
            if not getattr(self, k) >= 0:
                raise ConfigError(f"tariff {k} must be non-negative")

    @classmethod
    def from_resolved(cls, res: ResolvedInputs) -> "Tariffs":
        return cls(**{k: float(v) for k, v in res.tariffs.items()}, fuel=res.fuel)


@dataclass(frozen=True)
class ScenarioResult:
    code: str
    v_gas: float  # m3
    e_load: float  # kWh, negative = consumed
    e_gen: float  # kWh
    e_feed: float  # kWh, signed net exchange, positive = exported
    co2: float  # t
    cost: float  # EUR

    def row(self) -> tuple:
        return (self.code, self.v_gas, self.e_load, self.e_gen, self.e_feed, self.co2, self.cost)


def account_totals(v_gas: float, e_grid: float, e_export: float = 0.0,
                   tariffs: Tariffs = Tariffs()) -> tuple[float, float]:
    """CO2 (t) and cost (EUR) from gas volume (m3) and grid energies (kWh).

    ``e_grid`` is the energy drawn from the grid, ``e_export`` the energy fed
    in (credited at the feed-in tariff).
    """
    f = tariffs.fuel
    gas_mass = v_gas * f.density
    gas_kwh = gas_mass * f.hhv / J_PER_KWH
    co2 = (gas_mass * f.co2_per_kg + e_grid * tariffs.elec_co2) / 1000.0
    cost = gas_kwh * tariffs.gas_price + e_grid * tariffs.elec_price - e_export * tariffs.feed_in_tariff
    return co2, cost


def account(trace: engine.SimulationTrace, tariffs: Tariffs = Tariffs()) -> ScenarioResult:
    """Monthly totals of one trace in the layout of the results table."""
    dt = trace.dt
    fuel = float(np.sum(trace.fuel_mass))
    v_gas = fuel / tariffs.fuel.density
    p_feed = np.asarray(trace.p_feed)
    e_grid = float(np.sum(np.maximum(-p_feed, 0.0))) * dt / J_PER_KWH
    e_export = float(np.sum(np.maximum(p_feed, 0.0))) * dt / J_PER_KWH
    e_load = -float(np.sum(trace.p_appliance) + np.sum(trace.p_electric_plant)) * dt / J_PER_KWH
    e_gen = float(np.sum(trace.p_pv)) * dt / J_PER_KWH
    e_feed = float(np.sum(p_feed)) * dt / J_PER_KWH
    co2, cost = account_totals(v_gas, e_grid, e_export, tariffs)
    return ScenarioResult(trace.code, v_gas, e_load, e_gen, e_feed, co2, cost)


def plant_energy(trace: engine.SimulationTrace, fuel: plant.FuelConstants = plant.FuelConstants()) -> float:
    """Energy bought for heating, kWh: fuel (HHV) plus heat-pump electricity."""
    return (float(np.sum(trace.fuel_mass)) * fuel.hhv
            + float(np.sum(trace.p_electric_plant)) * trace.dt) / J_PER_KWH


def comfort_fraction(trace: engine.SimulationTrace, low: float = 292.65, high: float = 295.65,
                     skip: int | None = None) -> float:
    """Share of steps after the warm-up with ``low <= t_air <= high``."""
    skip = trace.warmup_steps if skip is None else skip
    t = np.asarray(trace.t_air)[skip:]
    if t.size == 0:
        return float("nan")
    return float(np.mean((t >= low) & (t <= high)))


def load_table4() -> list[ScenarioResult]:
    """Published January results of the 36 scenarios (blank cells read as 0)."""
    text = (resources.files("buildsim") / "data" / "table4.csv").read_text(encoding="utf-8")
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    out = []
    for rec in csv.DictReader(io.StringIO(body)):
        num = [float(rec[c]) if rec[c].strip() else 0.0 for c in RESULT_COLUMNS[1:]]
        out.append(ScenarioResult(rec["scenario_code"], *num))
    return out


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------

class ScenarioRun(NamedTuple):
    spec: ScenarioSpec
    trace: engine.SimulationTrace
    result: ScenarioResult


_WORKER: dict = {}


def run_scenario(spec: ScenarioSpec, res: ResolvedInputs, config: RunConfig) -> ScenarioRun:
    model = model_for(spec, res, config)
    trace = engine.simulate(model, config.horizon, seed=spec.seed, warmup=config.warmup)
    return ScenarioRun(spec, trace, account(trace, Tariffs.from_resolved(res)))


def _init_worker(res, config):
    _WORKER["res"] = res
    _WORKER["config"] = config


def _run_in_worker(spec):
    return run_scenario(spec, _WORKER["res"], _WORKER["config"])


def run_matrix(config: RunConfig, specs: list[ScenarioSpec] | None = None,
               resolved: ResolvedInputs | None = None, jobs: int | None = None) -> list[ScenarioRun]:
    """Simulate ``specs`` (default: the config's filtered matrix), returned in input order."""
    res = resolved or resolve(config)
    specs = build_matrix(config, resolved=res) if specs is None else specs
    jobs = config.jobs if jobs is None else jobs
    if jobs <= 1 or len(specs) <= 1:
        return [run_scenario(s, res, config) for s in specs]
    with ProcessPoolExecutor(max_workers=min(jobs, len(specs)), initializer=_init_worker,
                             initargs=(res, config)) as pool:
        return list(pool.map(_run_in_worker, specs))
