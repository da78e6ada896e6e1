"""Hydronic heat sources, radiator emission and fuel bookkeeping.

Two configurations share :class:`HydronicState`:

* ground-source heat pump heating the radiator loop water directly
  (``t_tank`` is ``None``);
* gas boiler charging a fully mixed buffer tank that feeds the radiators.
  The radiator loop water is lumped into the tank store, so ``t_loop``
  mirrors ``t_tank``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

CP_WATER = 4186.0  # J/(kg K)
RHO_WATER = 1000.0  # kg/m3
DEFAULT_LOOP_MASS = 150.0  # kg
COP_MIN, COP_MAX = 1.0, 8.0

#: Placeholder condensing-boiler part-load curve (PLR, HHV efficiency)
DEFAULT_EFFICIENCY_CURVE = ((0.1, 0.97), (0.3, 0.96), (0.5, 0.95), (0.75, 0.925), (1.0, 0.89))


@dataclass(frozen=True)
class HydronicState:
    t_loop: float  # K
    t_tank: float | None = None  # K, boiler configurations only
    plant_on: bool = False
    m_dot: float = 0.0  # kg/s

    def __post_init__(self):
        if not 273.15 < self.t_loop < 373.15:
            raise ValueError(f"loop temperature {self.t_loop} K outside (273.15, 373.15)")
        if self.t_tank is not None and not 273.15 < self.t_tank < 373.15:
            raise ValueError(f"tank temperature {self.t_tank} K outside (273.15, 373.15)")
        if self.m_dot < 0:
            raise ValueError("mass flow must be non-negative")

    @property
    def t_supply(self) -> float:
        """Temperature of the water that feeds the radiators."""
        return self.t_loop if self.t_tank is None else self.t_tank


@dataclass(frozen=True)
class HeatPumpParams:
    q_rated: float  # W
    eta_carnot: float = 0.45
    t_source: float = 283.15  # K, ground
    t_supply_set: float = 318.15  # K
    loop_mass: float = DEFAULT_LOOP_MASS

    def __post_init__(self):
        if not self.q_rated > 0:
            raise ValueError("heat pump q_rated must be positive")
        if not 0.0 < self.eta_carnot < 1.0:
            raise ValueError("eta_carnot must lie in (0, 1)")


@dataclass(frozen=True)
class BoilerParams:
    q_rated: float  # W
    efficiency_curve: tuple[tuple[float, float], ...] = DEFAULT_EFFICIENCY_CURVE
    tank_volume: float = 0.3  # m3
    tank_on_below: float = 328.15  # K
    tank_off_above: float = 338.15  # K
    min_plr: float = 0.2
    overshoot: float = 0.5  # K above tank_off_above targeted when modulating
    loop_mass: float = DEFAULT_LOOP_MASS

    def __post_init__(self):
        curve = tuple((float(p), float(e)) for p, e in self.efficiency_curve)
        object.__setattr__(self, "efficiency_curve", curve)
        if not self.q_rated > 0:
            raise ValueError("boiler q_rated must be positive")
        if not curve or any(not 0.0 < e <= 1.0 for _, e in curve):
            raise ValueError("boiler efficiencies must lie in (0, 1]")
        if any(b[0] <= a[0] for a, b in zip(curve, curve[1:])):
            raise ValueError("efficiency curve part-load ratios must be strictly increasing")
        if not self.tank_on_below < self.tank_off_above:
            raise ValueError("tank_on_below must be below tank_off_above")
        if not self.tank_volume > 0:
            raise ValueError("tank volume must be positive")

    @property
    def water_mass(self) -> float:
        """Tank plus radiator loop water, kg."""
        return self.tank_volume * RHO_WATER + self.loop_mass

    def efficiency(self, plr: float) -> float:
        """HHV efficiency at a part-load ratio (the curve scales with ``q_rated``)."""
        p, e = zip(*self.efficiency_curve)
        return float(np.interp(plr, p, e))


@dataclass(frozen=True)
class FuelConstants:
    hhv: float = 55.5e6  # J/kg
    co2_per_kg: float = 2.23  # kg CO2 per kg fuel
    density: float = 0.84  # kg/m3

    def __post_init__(self):
        if not (self.hhv > 0 and self.co2_per_kg > 0 and self.density > 0):
            raise ValueError("fuel constants must be positive")


@dataclass(frozen=True)
class RadiatorParams:
    ua: float  # W/K
    max_flow: float  # kg/s
    band: float = 2.0  # K, proportional band of the valve
    radiative_fraction: float = 0.0

    def __post_init__(self):
        if self.ua < 0 or self.max_flow < 0 or not self.band > 0:
            raise ValueError("radiator ua/max_flow must be >= 0 and band > 0")
        if not 0.0 <= self.radiative_fraction <= 1.0:
            raise ValueError("radiative_fraction must lie in [0, 1]")


def cop(t_source: float, t_sink: float, eta_carnot: float) -> float:
    """Carnot-fraction coefficient of performance, clamped to [1, 8]."""
    if t_sink <= t_source:
        raise ValueError(f"sink temperature {t_sink} K must exceed source temperature {t_source} K")
    raw = eta_carnot * t_sink / (t_sink - t_source)
    return min(max(raw, COP_MIN), COP_MAX)


def heat_pump_step(params: HeatPumpParams, state: HydronicState, demand_on: bool, dt: float):
    """One step of the heat pump charging the loop water.

    Returns ``(q_delivered, p_electric, state)``.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    cap = params.loop_mass * CP_WATER
    if not demand_on or state.t_loop >= params.t_supply_set:
        return 0.0, 0.0, replace(state, plant_on=bool(demand_on))
    q = min(params.q_rated, cap * (params.t_supply_set - state.t_loop) / dt)
    t_new = state.t_loop + q * dt / cap
    if t_new <= params.t_source:
        c = COP_MAX
    else:
        c = cop(params.t_source, t_new, params.eta_carnot)
    return q, q / c, replace(state, t_loop=t_new, plant_on=True)


def boiler_step(params: BoilerParams, state: HydronicState, dt: float, enabled: bool = True,
                fuel_constants: FuelConstants = FuelConstants()):
    """One step of the burner charging the buffer tank.

    The burner switches on below ``tank_on_below`` and off above
    ``tank_off_above``; between the two it keeps its previous state.
    ``enabled`` is the room thermostat signal; a disabled burner never
    fires and forgets its hysteresis state.

    Returns ``(q_delivered, fuel_mass, state)``.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    t_tank = state.t_tank
    if t_tank is None:
        raise ValueError("boiler configuration needs a tank temperature")
    if not enabled:
        return 0.0, 0.0, replace(state, plant_on=False)
    on = state.plant_on
    if t_tank < params.tank_on_below:
        on = True
    elif t_tank > params.tank_off_above:
        on = False
    if not on:
        return 0.0, 0.0, replace(state, plant_on=False)
    cap = params.water_mass * CP_WATER
    need = cap * (params.tank_off_above + params.overshoot - t_tank) / dt
    q = min(params.q_rated, max(need, params.min_plr * params.q_rated))
    plr = q / params.q_rated
    fuel = q / params.efficiency(plr) * dt / fuel_constants.hhv
    t_new = t_tank + q * dt / cap
    return q, fuel, replace(state, t_tank=t_new, t_loop=t_new, plant_on=True)


def radiator_step(state: HydronicState, t_air: float, t_set: float, max_flow: float, dt: float, *,
                  ua: float | None = None, water_mass: float = DEFAULT_LOOP_MASS, band: float = 2.0):
    """Emit heat from the supply water into the room.

    Valve flow is proportional to the setpoint error over ``band``; output
    is limited by flow, by ``ua`` and by the water's heat content above
    ``t_air``. The emitted energy is removed from the supply water.

    Returns ``(phi_hc, state)``.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    m_dot = max_flow * min(max((t_set - t_air) / band, 0.0), 1.0)
    dT = state.t_supply - t_air
    phi = min(m_dot * CP_WATER * dT, water_mass * CP_WATER * dT / dt)
    if ua is not None:
        phi = min(phi, ua * dT)
    phi = max(phi, 0.0)
    return phi, draw_heat(replace(state, m_dot=m_dot), phi, dt, water_mass)


def valve_gain(state: HydronicState, t_air_prev: float, max_flow: float, band: float = 2.0) -> float:
    """Linearised heat output per kelvin of setpoint error, W/K.

    ``max_flow*c_p*(t_supply - t_air_prev)/band``: the radiator law with the
    driving temperature difference frozen at the previous air temperature.
    """
    return max_flow * CP_WATER * max(state.t_supply - t_air_prev, 0.0) / band


def emission_cap(state: HydronicState, t_air: float, max_flow: float, ua: float, water_mass: float,
                 dt: float) -> float:
    """Largest radiator output at air temperature ``t_air`` (fully open valve)."""
    dT = state.t_supply - t_air
    return max(min(max_flow * CP_WATER * dT, ua * dT, water_mass * CP_WATER * dT / dt), 0.0)


def draw_heat(state: HydronicState, phi: float, dt: float, water_mass: float) -> HydronicState:
    """Remove ``phi*dt`` joules from the supply water."""
    t_new = state.t_supply - phi * dt / (water_mass * CP_WATER)
    if state.t_tank is None:
        return replace(state, t_loop=t_new)
    return replace(state, t_tank=t_new, t_loop=t_new)


def mixed_start(t_loop: float, t_tank: float, params: BoilerParams) -> float:
    """Temperature after mixing the loop water into the tank store."""
    m_tank = params.tank_volume * RHO_WATER
    return (m_tank * t_tank + params.loop_mass * t_loop) / (m_tank + params.loop_mass)


def gas_volume(fuel_energy: float | None = None, fuel_mass: float | None = None,
               constants: FuelConstants = FuelConstants()) -> float:
    """Natural-gas volume in m3 from fuel energy (J, HHV basis) or fuel mass (kg)."""
    if (fuel_energy is None) == (fuel_mass is None):
        raise ValueError("give exactly one of fuel_energy or fuel_mass")
    if fuel_mass is None:
        if fuel_energy < 0:
            raise ValueError("fuel energy must be non-negative")
        fuel_mass = fuel_energy / constants.hhv
    if fuel_mass < 0:
        raise ValueError("fuel mass must be non-negative")
    return fuel_mass / constants.density
