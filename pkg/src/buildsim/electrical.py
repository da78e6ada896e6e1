"""PV generation, battery storage and grid exchange.

Sign convention for grid exchange: positive ``p_feed`` is exported to the
grid, negative is drawn from it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

J_PER_KWH = 3.6e6


@dataclass(frozen=True)
class PvArray:
    area: float = 84.45  # m2
    efficiency: float = 0.16  # system level, incl. inverter

    def __post_init__(self):
        if not self.area > 0:
            raise ValueError("PV area must be positive")
        if not 0.0 < self.efficiency < 0.3:
            raise ValueError("PV efficiency must lie in (0, 0.3)")


@dataclass(frozen=True)
class BatteryState:
    soc: float  # kWh stored
    capacity: float = 10.0  # kWh
    p_char_max: float = 5000.0  # W
    p_disc_max: float = 5000.0  # W
    eta_char: float = 0.975
    eta_disc: float = 0.975

    def __post_init__(self):
        if not self.capacity > 0:
            raise ValueError("battery capacity must be positive")
        if not 0.0 <= self.soc <= self.capacity:
            raise ValueError(f"state of charge {self.soc} kWh outside [0, {self.capacity}]")
        if not (self.p_char_max > 0 and self.p_disc_max > 0):
            raise ValueError("battery power limits must be positive")
        if not (0.0 < self.eta_char <= 1.0 and 0.0 < self.eta_disc <= 1.0):
            raise ValueError("battery efficiencies must lie in (0, 1]")


class Dispatch(NamedTuple):
    p_char: float
    p_disc: float
    p_feed: float
    battery: BatteryState | None


def pv_power(sample, array: PvArray):
    """PV output in W from global horizontal irradiance (scalar sample or array of GHI)."""
    ghi = getattr(sample, "h_glo_hor", sample)
    out = np.maximum(array.efficiency * array.area * np.asarray(ghi, dtype=float), 0.0)
    return float(out) if out.ndim == 0 else out


def dispatch(p_pv: float, p_load: float, battery: BatteryState | None, dt: float) -> Dispatch:
    """Serve the load from PV first, then the battery, then the grid.

    Surplus charges the battery up to its power limit and headroom; the rest
    is exported. Deficit discharges the battery, the rest is imported.
    ``p_pv + p_disc - p_char - p_load == p_feed`` holds with the operations
    evaluated in that order.
    """
    if p_pv < 0 or p_load < 0:
        raise ValueError("PV power and load must be non-negative")
    if not dt > 0:
        raise ValueError("dt must be positive")
    p_char = p_disc = 0.0
    surplus = p_pv - p_load
    if battery is not None:
        if surplus > 0.0:
            headroom = (battery.capacity - battery.soc) * J_PER_KWH
            p_char = min(surplus, battery.p_char_max, headroom / dt / battery.eta_char)
            soc = battery.soc + p_char * dt * battery.eta_char / J_PER_KWH
        elif surplus < 0.0:
            p_disc = min(-surplus, battery.p_disc_max, battery.soc * J_PER_KWH * battery.eta_disc / dt)
            soc = battery.soc - p_disc * dt / battery.eta_disc / J_PER_KWH
        else:
            soc = battery.soc
        # rounding can leave soc a few ulp outside the bounds
        battery = replace(battery, soc=min(max(soc, 0.0), battery.capacity))
    p_feed = p_pv + p_disc - p_char - p_load
    return Dispatch(p_char, p_disc, p_feed, battery)
