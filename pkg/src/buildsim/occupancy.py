"""Stochastic presence profiles, appliance load and internal heat gains.

Occupant count at each step is Binomial(household_size, p) where p is the
per-person presence probability of the profile slot covering that step.
Weekday and weekend days use separate probability curves.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Sequence

import numpy as np

#: Average household electricity demand by occupant count, W
DEFAULT_APPLIANCE_POWER = {1: 182.65, 2: 331.05, 3: 422.37, 4: 485.16}
DEFAULT_STANDBY_FRACTION = 0.15
METABOLIC_GAIN = 120.0  # W of sensible heat per person


class DayType(enum.Enum):
    WEEKDAY = "weekday"
    WEEKEND = "weekend"


def calendar_for(start: date, days: int) -> list[DayType]:
    """Day types for ``days`` consecutive days starting at ``start``."""
    return [
        DayType.WEEKEND if (start + timedelta(days=d)).weekday() >= 5 else DayType.WEEKDAY
        for d in range(days)
    ]


def _as_daytype(d) -> DayType:
    if isinstance(d, DayType):
        return d
    return DayType(str(d).lower())


@dataclass(frozen=True)
class PresenceProfile:
    weekday_probs: tuple[float, ...]
    weekend_probs: tuple[float, ...]
    household_size: int

    def __post_init__(self):
        wd = tuple(float(p) for p in self.weekday_probs)
        we = tuple(float(p) for p in self.weekend_probs)
        object.__setattr__(self, "weekday_probs", wd)
        object.__setattr__(self, "weekend_probs", we)
        if len(wd) == 0 or len(wd) != len(we):
            raise ValueError("weekday and weekend profiles must be non-empty and of equal length")
        if 24 * 3600 % len(wd):
            raise ValueError(f"{len(wd)} slots do not divide the day evenly")
        if not all(0.0 <= p <= 1.0 for p in wd + we):
            raise ValueError("presence probabilities must lie in [0, 1]")
        if not 1 <= int(self.household_size) <= 4:
            raise ValueError(f"household_size must be 1..4, got {self.household_size}")

    @property
    def slots(self) -> int:
        return len(self.weekday_probs)

    @classmethod
    def constant(cls, p: float, household_size: int, slots: int = 24) -> "PresenceProfile":
        """Flat profile, e.g. p=0 for an empty house or p=1 for a fully occupied one."""
        return cls((p,) * slots, (p,) * slots, household_size)

    def step_probabilities(self, calendar: Sequence, steps_per_day: int) -> np.ndarray:
        """Presence probability for every simulation step of ``calendar``."""
        if steps_per_day <= 0 or steps_per_day % self.slots:
            raise ValueError(
                f"steps_per_day={steps_per_day} is not a positive multiple of {self.slots} profile slots"
            )
        rep = steps_per_day // self.slots
        wd = np.repeat(np.asarray(self.weekday_probs), rep)
        we = np.repeat(np.asarray(self.weekend_probs), rep)
        return np.concatenate([we if _as_daytype(d) is DayType.WEEKEND else wd for d in calendar])


@dataclass(frozen=True)
class ProfileTable:
    """Reference presence curves for household sizes 1..4."""

    weekday: dict[int, tuple[float, ...]]
    weekend: dict[int, tuple[float, ...]]

    def profile(self, household_size: int) -> PresenceProfile:
        return PresenceProfile(self.weekday[household_size], self.weekend[household_size], household_size)


def parse_profile_table(text: str) -> ProfileTable:
    """Parse a profile CSV with columns ``slot_index, p_wd_1..p_wd_4, p_we_1..p_we_4``.

    Lines starting with ``#`` are comments.
    """
    body = "\n".join(line for line in text.splitlines() if not line.lstrip().startswith("#"))
    rows = list(csv.DictReader(io.StringIO(body), skipinitialspace=True))
    if not rows:
        raise ValueError("profile table is empty")
    need = ["slot_index"] + [f"p_wd_{k}" for k in range(1, 5)] + [f"p_we_{k}" for k in range(1, 5)]
    missing = [c for c in need if c not in rows[0]]
    if missing:
        raise ValueError(f"profile table missing column(s): {', '.join(missing)}")
    rows.sort(key=lambda r: int(r["slot_index"]))
    if [int(r["slot_index"]) for r in rows] != list(range(len(rows))):
        raise ValueError("slot_index must run 0..n-1 without gaps")
    wd = {k: tuple(float(r[f"p_wd_{k}"]) for r in rows) for k in range(1, 5)}
    we = {k: tuple(float(r[f"p_we_{k}"]) for r in rows) for k in range(1, 5)}
    return ProfileTable(wd, we)


def read_profile_table(path) -> ProfileTable:
    with open(path, encoding="utf-8") as fh:
        return parse_profile_table(fh.read())


@dataclass(frozen=True)
class PresenceSeries:
    occupant_count: np.ndarray
    household_size: int
    seed: int | None = None

    def __post_init__(self):
        counts = np.asarray(self.occupant_count, dtype=np.int64)
        if counts.size and (counts.min() < 0 or counts.max() > self.household_size):
            raise ValueError("occupant counts outside [0, household_size]")
        counts.setflags(write=False)
        object.__setattr__(self, "occupant_count", counts)

    def __len__(self) -> int:
        return len(self.occupant_count)

    def to_csv(self, timestamps) -> str:
        buf = io.StringIO()
        buf.write("timestamp,count\n")
        for ts, n in zip(timestamps, self.occupant_count):
            buf.write(f"{ts.isoformat()},{int(n)}\n")
        return buf.getvalue()


def generate_presence(profile: PresenceProfile, calendar: Sequence, steps_per_day: int,
                      seed: int | None) -> PresenceSeries:
    """Draw occupant counts per step by independent binomial sampling."""
    if len(calendar) == 0:
        raise ValueError("calendar must contain at least one day")
    p = profile.step_probabilities(calendar, steps_per_day)
    rng = np.random.default_rng(seed)
    counts = rng.binomial(profile.household_size, p)
    return PresenceSeries(counts, profile.household_size, seed)


def average_presence(series_set: Sequence[PresenceSeries]) -> np.ndarray:
    """Pointwise mean occupant count across realizations."""
    if len(series_set) == 0:
        raise ValueError("need at least one presence series")
    n = len(series_set[0])
    if any(len(s) != n for s in series_set):
        raise ValueError("presence series differ in length")
    return np.mean([s.occupant_count for s in series_set], axis=0)


@dataclass(frozen=True)
class ApplianceTable:
    avg_power_by_count: dict[int, float] = field(default_factory=lambda: dict(DEFAULT_APPLIANCE_POWER))
    standby_fraction: float = DEFAULT_STANDBY_FRACTION

    def __post_init__(self):
        powers = [self.avg_power_by_count[k] for k in sorted(self.avg_power_by_count)]
        if any(b <= a for a, b in zip(powers, powers[1:])) or powers[0] <= 0:
            raise ValueError("appliance powers must be positive and strictly increasing in occupant count")
        if not 0.0 < self.standby_fraction < 1.0:
            raise ValueError("standby_fraction must lie in (0, 1)")

    def lookup(self, household_size: int) -> np.ndarray:
        """Power indexed by occupant count 0..household_size."""
        return np.array([appliance_load(k, self, household_size) for k in range(household_size + 1)])


def appliance_load(count: int, table: ApplianceTable, household_size: int) -> float:
    """Electrical appliance power in W for ``count`` occupants present."""
    if count < 0 or count > household_size:
        raise ValueError(f"occupant count {count} outside 0..{household_size}")
    if count == 0:
        return table.standby_fraction * table.avg_power_by_count[household_size]
    return table.avg_power_by_count[count]


def internal_heat_gain(count, appliance_power):
    """Appliance heat plus sensible metabolic heat. Works on scalars and arrays."""
    return appliance_power + METABOLIC_GAIN * count


def expected_appliance_energy(p: np.ndarray, table: ApplianceTable, household_size: int,
                              dt: float) -> tuple[float, float]:
    """Mean and standard deviation (J) of total appliance energy for per-step probabilities ``p``.

    Steps are independent, so the variance is the sum of per-step variances.
    """
    from math import comb

    power = table.lookup(household_size)
    p = np.asarray(p, dtype=float)
    pmf = np.stack([comb(household_size, k) * p**k * (1 - p) ** (household_size - k)
                    for k in range(household_size + 1)], axis=1)
    mean = pmf @ power
    var = pmf @ power**2 - mean**2
    return float(mean.sum() * dt), float(np.sqrt(np.clip(var, 0, None).sum()) * dt)
