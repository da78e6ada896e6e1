"""Room thermostat hysteresis and day/night setpoint schedule."""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, time

import numpy as np


@dataclass(frozen=True)
class ThermostatState:
    heating_on: bool = False
    on_below: float = 293.15
    off_above: float = 295.15

    def __post_init__(self):
        if not self.on_below < self.off_above:
            raise ValueError("on_below must be below off_above")


def thermostat_step(state: ThermostatState, t_air: float):
    """Switch on below ``on_below``, off above ``off_above``, otherwise hold."""
    on = state.heating_on
    if not on and t_air < state.on_below:
        on = True
    elif on and t_air > state.off_above:
        on = False
    if on == state.heating_on:
        return on, state
    return on, replace(state, heating_on=on)


@dataclass(frozen=True)
class SetpointSchedule:
    """Night and day setpoints with linear ramps across the gaps between windows.

    Hours are clock hours in local standard time. The night window runs
    from ``night_start`` over midnight to ``night_end``; the day window from
    ``day_start`` to ``day_end``. With ``ramp=False`` the gap hours keep the
    setpoint of the window that precedes them.
    """

    night_set: float = 293.15
    day_set: float = 295.15
    night_start: float = 23.0
    night_end: float = 6.0
    day_start: float = 7.0
    day_end: float = 22.0
    ramp: bool = True

    def __post_init__(self):
        if not (0 <= self.night_end <= self.day_start < self.day_end <= self.night_start <= 24):
            raise ValueError("schedule windows must satisfy night_end <= day_start < day_end <= night_start")


def _hour_of_day(local_time) -> float:
    if isinstance(local_time, datetime):
        local_time = local_time.time()
    if isinstance(local_time, time):
        return local_time.hour + local_time.minute / 60 + (local_time.second + local_time.microsecond / 1e6) / 3600
    return (float(local_time) / 3600.0) % 24.0


def setpoint_hours(schedule: SetpointSchedule, hours):
    """Vectorized setpoint for hour-of-day values in [0, 24)."""
    h = np.mod(np.asarray(hours, dtype=float), 24.0)
    s = schedule
    out = np.full(h.shape, s.night_set)
    out = np.where((h >= s.day_start) & (h <= s.day_end), s.day_set, out)
    morning = (h > s.night_end) & (h < s.day_start)
    evening = (h > s.day_end) & (h < s.night_start)
    if s.ramp:
        f_m = (h - s.night_end) / max(s.day_start - s.night_end, 1e-12)
        f_e = (h - s.day_end) / max(s.night_start - s.day_end, 1e-12)
        out = np.where(morning, s.night_set + f_m * (s.day_set - s.night_set), out)
        out = np.where(evening, s.day_set + f_e * (s.night_set - s.day_set), out)
    else:
        out = np.where(morning, s.night_set, out)
        out = np.where(evening, s.day_set, out)
    return out


def setpoint_at(schedule: SetpointSchedule, local_time) -> float:
    """Setpoint in K at a clock time (``datetime``, ``time`` or seconds since midnight)."""
    return float(setpoint_hours(schedule, _hour_of_day(local_time)))
