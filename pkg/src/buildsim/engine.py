"""Fixed-order co-simulation loop coupling all building modules.

Per step, in order: weather sample, occupancy and appliance load, solar
gains, setpoint and thermostat (on the previous air temperature), heat
generator, radiator and envelope, PV and battery dispatch, record.

Inputs that do not depend on the simulated state (weather, presence,
solar gains, setpoints, PV) are evaluated for all steps up front; the
result is identical to evaluating them inside the loop.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta

import numpy as np

from . import control, electrical, envelope, occupancy, plant
from .errors import ConfigError, SimulationError, WeatherRangeError
from .weather import WeatherSeries, solar_azimuth


TRACE_COLUMNS = (
    "timestamp",
    "t_air",
    "t_sur",
    "t_mas",
    "t_ext",
    "heating_on",
    "phi_hc",
    "p_electric_plant",
    "fuel_mass",
    "p_appliance",
    "occupants",
    "p_pv",
    "p_char",
    "p_disc",
    "p_feed",
    "soc",
)

PLANT_KINDS = ("boiler", "heat_pump", "none")


@dataclass(frozen=True)
class BuildingModel:
    """Fully resolved inputs of one simulation run."""

    fabric: envelope.BuildingFabric
    weather: WeatherSeries
    presence: occupancy.PresenceProfile
    radiator: plant.RadiatorParams
    plant_kind: str = "boiler"
    heat_pump: plant.HeatPumpParams | None = None
    boiler: plant.BoilerParams | None = None
    appliances: occupancy.ApplianceTable = field(default_factory=occupancy.ApplianceTable)
    pv: electrical.PvArray | None = None
    battery: electrical.BatteryState | None = None
    schedule: control.SetpointSchedule = field(default_factory=control.SetpointSchedule)
    thermostat: control.ThermostatState = field(default_factory=control.ThermostatState)
    fuel: plant.FuelConstants = field(default_factory=plant.FuelConstants)
    dt: float = 900.0
    start: datetime | None = None
    t_init: float = 293.15
    t_loop_init: float = 293.15
    t_tank_init: float = 333.15
    code: str = ""

    def __post_init__(self):
        if self.plant_kind not in PLANT_KINDS:
            raise ConfigError(f"unknown plant kind {self.plant_kind!r}")
        if self.plant_kind == "boiler" and (self.boiler is None or self.heat_pump is not None):
            raise ConfigError(f"{self.code or 'model'}: boiler configuration needs boiler parameters only")
        if self.plant_kind == "heat_pump" and (self.heat_pump is None or self.boiler is not None):
            raise ConfigError(f"{self.code or 'model'}: heat-pump configuration needs heat-pump parameters only")
        if self.plant_kind == "none" and (self.heat_pump is not None or self.boiler is not None):
            raise ConfigError(f"{self.code or 'model'}: plant parameters given for a configuration without plant")
        if self.battery is not None and self.pv is None:
            raise ConfigError(f"{self.code or 'model'}: battery requires a PV array")
        if not self.dt > 0 or 86400 % self.dt:
            raise ConfigError(f"dt={self.dt} s must be positive and divide one day")

    @property
    def water_mass(self) -> float:
        if self.plant_kind == "boiler":
            return self.boiler.water_mass
        if self.plant_kind == "heat_pump":
            return self.heat_pump.loop_mass
        return plant.DEFAULT_LOOP_MASS


class SimulationTrace:
    """Per-step simulation record, one array per column in :data:`TRACE_COLUMNS`."""

    def __init__(self, start: datetime, dt: float, columns: dict, code: str = "", warmup_steps: int = 0):
        self.start = start
        self.dt = float(dt)
        self.code = code
        self.warmup_steps = warmup_steps
        self._cols = {}
        for name in TRACE_COLUMNS[1:]:
            arr = np.asarray(columns[name])
            arr.setflags(write=False)
            self._cols[name] = arr

    def __len__(self) -> int:
        return len(self._cols["t_air"])

    def __getattr__(self, name):
        try:
            return self.__dict__["_cols"][name]
        except KeyError:
            raise AttributeError(name) from None

    def column(self, name: str) -> np.ndarray:
        return self._cols[name]

    @property
    def timestamps(self) -> list[datetime]:
        return [self.start + timedelta(seconds=k * self.dt) for k in range(len(self))]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(TRACE_COLUMNS) + "\n")
        cols = [self._cols[n] for n in TRACE_COLUMNS[1:]]
        for ts, *vals in zip(self.timestamps, *cols):
            parts = [ts.isoformat()]
            for name, v in zip(TRACE_COLUMNS[1:], vals):
                if name in ("heating_on", "occupants"):
                    parts.append(str(int(v)))
                else:
                    parts.append(repr(float(v)))
            buf.write(",".join(parts) + "\n")
        return buf.getvalue()


def initial_hydronics(model: BuildingModel) -> plant.HydronicState:
    if model.plant_kind == "boiler":
        t = plant.mixed_start(model.t_loop_init, model.t_tank_init, model.boiler)
        return plant.HydronicState(t_loop=t, t_tank=t)
    return plant.HydronicState(t_loop=model.t_loop_init)


def exogenous_inputs(model: BuildingModel, n: int, seed) -> dict[str, np.ndarray]:
    """All state-independent per-step inputs for ``n`` steps."""
    dt = model.dt
    start = model.start or model.weather.start
    offset = (start - model.weather.start).total_seconds()
    times = offset + np.arange(n) * dt
    w = model.weather.resample(times)
    lat = model.weather.location.lat
    azi = solar_azimuth(w["sol_tim"], w["clo_tim"], lat, w["sol_zen"])
    phi_sol = envelope.solar_gains_arrays(model.fabric, w["h_glo_hor"], w["h_dir_nor"], w["h_dif_hor"],
                                          w["sol_zen"], azi)

    steps_per_day = int(round(86400 / dt))
    midnight = datetime(start.year, start.month, start.day)
    first = int(round((start - midnight).total_seconds() / dt))
    days = math.ceil((first + n) / steps_per_day)
    cal = occupancy.calendar_for(midnight.date(), days)
    presence = occupancy.generate_presence(model.presence, cal, steps_per_day, seed)
    counts = np.asarray(presence.occupant_count[first:first + n])
    p_app = model.appliances.lookup(model.presence.household_size)[counts]
    phi_int = occupancy.internal_heat_gain(counts, p_app)

    hours = ((start - midnight).total_seconds() + np.arange(n) * dt) / 3600.0
    t_set = control.setpoint_hours(model.schedule, hours)
    p_pv = electrical.pv_power(w["h_glo_hor"], model.pv) if model.pv is not None else np.zeros(n)
    return {
        "t_ext": w["t_dry_bulb"],
        "phi_sol": phi_sol,
        "occupants": counts,
        "p_appliance": p_app,
        "phi_int": phi_int,
        "t_set": t_set,
        "p_pv": p_pv,
    }


def _emit(net, zone, rad, hyd, water_mass, t_ext, phi_int, phi_sol, t_set, t_air_prev, dt):
    """Radiator output coupled to the envelope step.

    The valve term is solved together with the air node to find the
    output; it is clamped to [0, emission cap] and the zone is then
    advanced with that output held constant, so the heat taken from the
    water equals the heat the zone receives.
    """
    gain = plant.valve_gain(hyd, t_air_prev, rad.max_flow, rad.band)
    phi = 0.0
    if gain > 0.0:
        _, t_air, _, phi = envelope.step_zone_valve(net, zone, t_ext, t_ext, phi_int, phi_sol, gain, t_set, dt)
        cap = plant.emission_cap(hyd, t_air, rad.max_flow, rad.ua, water_mass, dt)
        phi = min(max(phi, 0.0), cap)
    zone_new, t_air, t_sur = envelope.step_zone(net, zone, t_ext, t_ext, phi_int, phi_sol, phi, dt,
                                                rad.radiative_fraction)
    return zone_new, t_air, t_sur, phi


def simulate(model: BuildingModel, horizon: float, seed=None, warmup: float = 0.0) -> SimulationTrace:
    """Run one simulation over ``horizon`` seconds.

    Deterministic for a given model and seed.
    """
    dt = model.dt
    n = horizon / dt
    if n != int(n) or n < 1:
        raise ConfigError(f"horizon {horizon} s is not a positive multiple of dt={dt} s")
    n = int(n)
    code = model.code
    try:
        net = envelope.build_network(model.fabric)
        ex = exogenous_inputs(model, n, seed)
    except WeatherRangeError as exc:
        raise WeatherRangeError(f"scenario {code}: {exc}" if code else str(exc)) from exc
    except (ValueError, ArithmeticError) as exc:
        raise SimulationError(str(exc), code=code or None) from exc

    t_ext_a = ex["t_ext"].tolist()
    phi_int_a = ex["phi_int"].tolist()
    phi_sol_a = ex["phi_sol"].tolist()
    t_set_a = ex["t_set"].tolist()
    p_app_a = ex["p_appliance"].tolist()
    p_pv_a = ex["p_pv"].tolist()

    out = {name: np.empty(n) for name in ("t_air", "t_sur", "t_mas", "phi_hc", "p_electric_plant",
                                          "fuel_mass", "p_char", "p_disc", "p_feed", "soc")}
    heating = np.zeros(n, dtype=np.int8)

    zone = envelope.ZoneState(model.t_init, model.t_init, model.t_init)
    t_air_prev = model.t_init
    hyd = initial_hydronics(model)
    thermo = model.thermostat
    battery = model.battery
    rad = model.radiator
    water_mass = model.water_mass
    kind = model.plant_kind
    hp, bp, fuel_c = model.heat_pump, model.boiler, model.fuel

    rows = [out[k] for k in ("t_air", "t_sur", "t_mas", "phi_hc", "p_electric_plant", "fuel_mass",
                             "p_char", "p_disc", "p_feed", "soc")]
    r_air, r_sur, r_mas, r_phi, r_pel, r_fuel, r_char, r_disc, r_feed, r_soc = rows
    k = 0
    try:
        for k in range(n):
            heating_on, thermo = control.thermostat_step(thermo, t_air_prev)
            p_el = fuel = 0.0
            if kind == "heat_pump":
                _, p_el, hyd = plant.heat_pump_step(hp, hyd, heating_on, dt)
            elif kind == "boiler":
                _, fuel, hyd = plant.boiler_step(bp, hyd, dt, heating_on, fuel_c)

            t_ext = t_ext_a[k]
            zone, t_air, t_sur, phi = _emit(net, zone, rad, hyd, water_mass, t_ext, phi_int_a[k],
                                            phi_sol_a[k], t_set_a[k], t_air_prev, dt)
            hyd = plant.draw_heat(hyd, phi, dt, water_mass)

            d = electrical.dispatch(p_pv_a[k], p_app_a[k] + p_el, battery, dt)
            battery = d.battery

            r_air[k] = t_air
            r_sur[k] = t_sur
            r_mas[k] = zone.t_mas
            heating[k] = heating_on
            r_phi[k] = phi
            r_pel[k] = p_el
            r_fuel[k] = fuel
            r_char[k] = d.p_char
            r_disc[k] = d.p_disc
            r_feed[k] = d.p_feed
            r_soc[k] = battery.soc if battery is not None else 0.0
            t_air_prev = t_air
    except (ValueError, ArithmeticError) as exc:
        raise SimulationError(str(exc), code=code or None, step=k) from exc

    out.update(
        t_ext=ex["t_ext"],
        heating_on=heating,
        p_appliance=ex["p_appliance"],
        occupants=ex["occupants"],
        p_pv=ex["p_pv"],
    )
    start = model.start or model.weather.start
    return SimulationTrace(start, dt, out, code=code, warmup_steps=int(round(warmup / dt)))
