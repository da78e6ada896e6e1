"""Weather ingestion, per-step sampling and scenario transforms.

The canonical in-memory representation is columnar (one numpy array per
field). Three on-disk formats are understood:

``csv``
    Canonical format. Optional ``# key=value`` metadata lines (``lat``,
    ``lon``, ``alt``, ``tz``, ``name``) followed by a header row with the
    columns in :data:`CSV_COLUMNS` and one row per time step.
``epw``
    EnergyPlus weather file. Only dry bulb, relative humidity, pressure and
    the three irradiance columns are read.
``tmy3-mos``
    The Modelica table text format derived from TMY3 files (``#1`` /
    ``double tab1(rows,cols)`` header, time in seconds since January 1).

Solar time, clock time and solar zenith are derived from the timestamp and
the site location when the source format does not carry them.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, fields
from datetime import datetime, timedelta, timezone

import numpy as np

from .errors import (
    WeatherParseError,
    WeatherRangeError,
    WeatherSchemaError,
    WeatherValidationError,
)

CSV_COLUMNS = (
    "timestamp_iso8601",
    "t_dry_bulb_K",
    "h_glo_hor",
    "h_dir_nor",
    "h_dif_hor",
    "rel_hum",
    "p_atm",
    "sol_zen_rad",
)

ZERO_CELSIUS = 273.15
SECONDS_PER_DAY = 86400.0

# columns interpolated in time, in storage order
_FIELDS = (
    "t_base",
    "h_glo_hor",
    "h_dir_nor",
    "h_dif_hor",
    "rel_hum",
    "p_atm",
    "sol_zen",
    "sol_tim",
    "clo_tim",
)


@dataclass(frozen=True)
class Location:
    lat_deg: float = 0.0
    lon_deg: float = 0.0
    alt: float = 0.0
    tz_hours: float = 0.0
    name: str = ""

    @property
    def lat(self) -> float:
        """Latitude in radians."""
        return math.radians(self.lat_deg)


@dataclass(frozen=True)
class WeatherSample:
    t_dry_bulb: float  # K
    h_glo_hor: float  # W/m2
    h_dir_nor: float  # W/m2
    h_dif_hor: float  # W/m2
    rel_hum: float  # 0..1
    p_atm: float  # Pa
    sol_zen: float  # rad
    sol_tim: float  # s
    lat: float  # rad
    alt: float  # m
    clo_tim: float  # s since Jan 1 00:00, local standard time


# ---------------------------------------------------------------------------
# Solar geometry
# ---------------------------------------------------------------------------

def _year_angle(clo_tim):
    return 2.0 * np.pi * (np.asarray(clo_tim, dtype=float) / SECONDS_PER_DAY) / 365.0


def solar_declination(clo_tim):
    """Declination in rad (Spencer series) for clock time in s since Jan 1."""
    b = _year_angle(clo_tim)
    return (
        0.006918
        - 0.399912 * np.cos(b)
        + 0.070257 * np.sin(b)
        - 0.006758 * np.cos(2 * b)
        + 0.000907 * np.sin(2 * b)
        - 0.002697 * np.cos(3 * b)
        + 0.00148 * np.sin(3 * b)
    )


def equation_of_time(clo_tim):
    """Equation of time in seconds."""
    b = _year_angle(clo_tim)
    minutes = 229.18 * (
        0.000075
        + 0.001868 * np.cos(b)
        - 0.032077 * np.sin(b)
        - 0.014615 * np.cos(2 * b)
        - 0.040849 * np.sin(2 * b)
    )
    return minutes * 60.0


def solar_time(clo_tim, location: Location):
    """Apparent solar time in s; continuous across midnight."""
    lon_shift = 240.0 * (location.lon_deg - 15.0 * location.tz_hours)
    return np.asarray(clo_tim, dtype=float) + lon_shift + equation_of_time(clo_tim)


def hour_angle(sol_tim):
    sol_hour = np.mod(np.asarray(sol_tim, dtype=float), SECONDS_PER_DAY) / 3600.0
    return np.radians(15.0 * (sol_hour - 12.0))


def solar_zenith(sol_tim, clo_tim, lat):
    """Zenith angle in rad. ``lat`` in rad."""
    dec = solar_declination(clo_tim)
    cos_z = np.sin(lat) * np.sin(dec) + np.cos(lat) * np.cos(dec) * np.cos(hour_angle(sol_tim))
    return np.arccos(np.clip(cos_z, -1.0, 1.0))


def solar_azimuth(sol_tim, clo_tim, lat, sol_zen):
    """Solar azimuth in rad measured from south, positive towards west."""
    dec = solar_declination(clo_tim)
    omega = hour_angle(sol_tim)
    sin_z = np.sin(sol_zen)
    denom = np.where(np.abs(sin_z) < 1e-9, 1e-9, sin_z) * np.cos(lat)
    cos_az = (np.cos(sol_zen) * np.sin(lat) - np.sin(dec)) / denom
    return np.sign(omega) * np.arccos(np.clip(cos_az, -1.0, 1.0))


def clock_time(timestamps) -> np.ndarray:
    """Seconds since January 1 00:00 of each timestamp's own year."""
    return np.array(
        [(ts - datetime(ts.year, 1, 1)).total_seconds() for ts in timestamps], dtype=float
    )


# ---------------------------------------------------------------------------
# Series container
# ---------------------------------------------------------------------------

class WeatherSeries:
    """Immutable, uniformly spaced weather record.

    Parameters
    ----------
    start : datetime
        Naive timestamp of the first sample in local standard time.
    resolution : float
        Spacing between samples in seconds.
    columns : dict
        Arrays keyed by the names in ``_FIELDS``. ``t_base`` is dry-bulb
        temperature in K before any cold-wave offset.
    location : Location
    t_offset : float
        Accumulated temperature reduction in K.
    """

    def __init__(self, start: datetime, resolution: float, columns: dict, location: Location,
                 t_offset: float = 0.0):
        n = len(columns["t_base"])
        if n == 0:
            raise WeatherValidationError("weather series has no samples")
        if not resolution > 0:
            raise WeatherValidationError(f"resolution must be positive, got {resolution}")
        self.start = start
        self.resolution = float(resolution)
        self.location = location
        self.t_offset = float(t_offset)
        self._cols = {}
        for name in _FIELDS:
            arr = np.array(columns[name], dtype=float)
            if arr.shape != (n,):
                raise WeatherValidationError(f"column {name} has shape {arr.shape}, expected ({n},)")
            arr.setflags(write=False)
            self._cols[name] = arr
        t = self._cols["t_base"] - self.t_offset
        t.setflags(write=False)
        self._t_dry_bulb = t

    def __len__(self) -> int:
        return len(self._t_dry_bulb)

    def __getitem__(self, i: int) -> WeatherSample:
        return self._sample(i)

    def __iter__(self):
        for i in range(len(self)):
            yield self._sample(i)

    def __repr__(self) -> str:
        return (f"WeatherSeries(start={self.start.isoformat()}, resolution={self.resolution:g} s, "
                f"n={len(self)}, offset={self.t_offset:g} K)")

    @property
    def samples(self) -> list[WeatherSample]:
        return list(self)

    @property
    def t_dry_bulb(self) -> np.ndarray:
        return self._t_dry_bulb

    def column(self, name: str) -> np.ndarray:
        if name == "t_dry_bulb":
            return self._t_dry_bulb
        return self._cols[name]

    @property
    def times(self) -> np.ndarray:
        """Seconds since ``start`` for every sample."""
        return np.arange(len(self)) * self.resolution

    @property
    def timestamps(self) -> list[datetime]:
        return [self.start + timedelta(seconds=float(s)) for s in self.times]

    @property
    def horizon(self) -> float:
        """Last sample time in seconds since start."""
        return (len(self) - 1) * self.resolution

    @property
    def end(self) -> datetime:
        return self.start + timedelta(seconds=self.horizon)

    def _sample(self, i: int) -> WeatherSample:
        c = self._cols
        return WeatherSample(
            t_dry_bulb=float(self._t_dry_bulb[i]),
            h_glo_hor=float(c["h_glo_hor"][i]),
            h_dir_nor=float(c["h_dir_nor"][i]),
            h_dif_hor=float(c["h_dif_hor"][i]),
            rel_hum=float(c["rel_hum"][i]),
            p_atm=float(c["p_atm"][i]),
            sol_zen=float(c["sol_zen"][i]),
            sol_tim=float(c["sol_tim"][i]),
            lat=self.location.lat,
            alt=self.location.alt,
            clo_tim=float(c["clo_tim"][i]),
        )

    def with_offset(self, t_offset: float) -> "WeatherSeries":
        return WeatherSeries(self.start, self.resolution, self._cols, self.location, t_offset)

    def to_seconds(self, time) -> float:
        if isinstance(time, datetime):
            return (time - self.start).total_seconds()
        return float(time)

    def resample(self, times) -> dict[str, np.ndarray]:
        """Linearly interpolate every field at ``times`` (s since start).

        Raises :class:`WeatherRangeError` if any time is outside the horizon.
        """
        t = np.atleast_1d(np.asarray(times, dtype=float))
        if t.size and (t.min() < 0.0 or t.max() > self.horizon):
            raise WeatherRangeError(
                f"time range [{t.min():g}, {t.max():g}] s outside weather horizon [0, {self.horizon:g}] s"
            )
        pos = t / self.resolution
        idx = np.minimum(np.floor(pos).astype(int), len(self) - 1)
        frac = pos - idx
        nxt = np.minimum(idx + 1, len(self) - 1)
        out = {}
        for name in _FIELDS[1:]:
            col = self._cols[name]
            out[name] = col[idx] + frac * (col[nxt] - col[idx])
        tb = self._t_dry_bulb
        out["t_dry_bulb"] = tb[idx] + frac * (tb[nxt] - tb[idx])
        # exact node hits return the node value bit-for-bit
        on_node = frac == 0.0
        if on_node.any():
            for name in _FIELDS[1:]:
                out[name][on_node] = self._cols[name][idx[on_node]]
            out["t_dry_bulb"][on_node] = tb[idx[on_node]]
        return out


def sample_at(series: WeatherSeries, time) -> WeatherSample:
    """Weather at ``time`` (datetime or seconds since series start)."""
    arr = series.resample([series.to_seconds(time)])
    return WeatherSample(
        t_dry_bulb=float(arr["t_dry_bulb"][0]),
        h_glo_hor=float(arr["h_glo_hor"][0]),
        h_dir_nor=float(arr["h_dir_nor"][0]),
        h_dif_hor=float(arr["h_dif_hor"][0]),
        rel_hum=float(arr["rel_hum"][0]),
        p_atm=float(arr["p_atm"][0]),
        sol_zen=float(arr["sol_zen"][0]),
        sol_tim=float(arr["sol_tim"][0]),
        lat=series.location.lat,
        alt=series.location.alt,
        clo_tim=float(arr["clo_tim"][0]),
    )


def apply_cold_wave(series: WeatherSeries, delta: float) -> WeatherSeries:
    """Lower every dry-bulb temperature by ``delta`` K, leaving other fields untouched."""
    if not math.isfinite(delta):
        raise ValueError(f"cold-wave delta must be finite, got {delta}")
    return series.with_offset(series.t_offset + delta)


# ---------------------------------------------------------------------------
# Construction and validation
# ---------------------------------------------------------------------------

def _validate(timestamps: list[datetime], cols: dict) -> float:
    n = len(timestamps)
    if n == 0:
        raise WeatherValidationError("weather file contains no data rows")
    for name, arr in cols.items():
        bad = ~np.isfinite(arr)
        if bad.any():
            i = int(np.argmax(bad))
            raise WeatherValidationError(f"missing value in {name} at row {i + 1}")
    if n > 1:
        steps = np.array([(b - a).total_seconds() for a, b in zip(timestamps, timestamps[1:])])
        res = float(steps[0])
        if res <= 0 or np.any(steps != res):
            i = int(np.argmax(steps != res)) if res > 0 else 0
            raise WeatherValidationError(
                f"non-uniform time step between rows {i + 1} and {i + 2}"
            )
    else:
        res = 3600.0
    checks = (
        ("t_base", cols["t_base"] > 0.0, "dry-bulb temperature must be > 0 K"),
        ("h_glo_hor", cols["h_glo_hor"] >= 0.0, "irradiance must be >= 0"),
        ("h_dir_nor", cols["h_dir_nor"] >= 0.0, "irradiance must be >= 0"),
        ("h_dif_hor", cols["h_dif_hor"] >= 0.0, "irradiance must be >= 0"),
        ("rel_hum", (cols["rel_hum"] >= 0.0) & (cols["rel_hum"] <= 1.0), "relative humidity outside [0, 1]"),
        ("p_atm", cols["p_atm"] > 0.0, "pressure must be > 0 Pa"),
    )
    for name, ok, msg in checks:
        if not ok.all():
            i = int(np.argmin(ok))
            raise WeatherValidationError(f"{msg} ({name}={cols[name][i]!r} at row {i + 1})")
    return res


def build_series(timestamps: list[datetime], t_dry_bulb, h_glo_hor, h_dir_nor, h_dif_hor,
                 rel_hum, p_atm, location: Location, sol_zen=None) -> WeatherSeries:
    """Assemble and validate a series from per-row values (temperatures in K)."""
    cols = {
        "t_base": np.asarray(t_dry_bulb, dtype=float),
        "h_glo_hor": np.asarray(h_glo_hor, dtype=float),
        "h_dir_nor": np.asarray(h_dir_nor, dtype=float),
        "h_dif_hor": np.asarray(h_dif_hor, dtype=float),
        "rel_hum": np.asarray(rel_hum, dtype=float),
        "p_atm": np.asarray(p_atm, dtype=float),
    }
    res = _validate(timestamps, cols)
    clo = clock_time(timestamps)
    sol = solar_time(clo, location)
    if sol_zen is None:
        zen = solar_zenith(sol, clo, location.lat)
    else:
        zen = np.asarray(sol_zen, dtype=float)
        if not np.all(np.isfinite(zen)):
            raise WeatherValidationError("missing value in sol_zen_rad")
    cols.update(sol_zen=zen, sol_tim=sol, clo_tim=clo)
    return WeatherSeries(timestamps[0], res, cols, location)


# ---------------------------------------------------------------------------
# Parsers
# ---------------------------------------------------------------------------

_META_KEYS = {"lat": "lat_deg", "lon": "lon_deg", "alt": "alt", "tz": "tz_hours", "name": "name"}


def _to_text(data) -> str:
    if isinstance(data, (bytes, bytearray)):
        return data.decode("utf-8-sig")
    return str(data)


def _float(text: str, line: int, what: str) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        raise WeatherParseError(f"cannot parse {what} from {text!r}", line) from None


def _parse_timestamp(text: str, tz_hours: float, line: int) -> datetime:
    try:
        ts = datetime.fromisoformat(text.strip().replace("Z", "+00:00"))
    except ValueError:
        raise WeatherParseError(f"invalid ISO 8601 timestamp {text!r}", line) from None
    if ts.tzinfo is not None:
        local = timezone(timedelta(hours=tz_hours))
        ts = ts.astimezone(local).replace(tzinfo=None)
    return ts


def _parse_csv(text: str) -> WeatherSeries:
    meta = {}
    lines = text.splitlines()
    header_at = None
    for i, raw in enumerate(lines):
        s = raw.strip()
        if not s:
            continue
        if s.startswith("#"):
            for part in s[1:].split(","):
                if "=" in part:
                    k, v = (x.strip() for x in part.split("=", 1))
                    if k in _META_KEYS:
                        meta[_META_KEYS[k]] = v if k == "name" else _float(v, i + 1, k)
            continue
        header_at = i
        break
    if header_at is None:
        raise WeatherParseError("no header row found", len(lines) or 1)
    location = Location(**meta)
    header = [h.strip() for h in lines[header_at].split(",")]
    if not set(header) & set(CSV_COLUMNS):
        raise WeatherParseError(f"malformed header {lines[header_at]!r}", header_at + 1)
    missing = [c for c in CSV_COLUMNS if c not in header]
    if missing:
        raise WeatherSchemaError(f"missing mandatory column(s): {', '.join(missing)}")
    pos = {c: header.index(c) for c in CSV_COLUMNS}
    stamps, rows = [], []
    reader = csv.reader(lines[header_at + 1:])
    for offset, rec in enumerate(reader):
        lineno = header_at + 2 + offset
        if not rec or all(not x.strip() for x in rec):
            continue
        if len(rec) != len(header):
            raise WeatherParseError(f"expected {len(header)} fields, found {len(rec)}", lineno)
        stamps.append(_parse_timestamp(rec[pos["timestamp_iso8601"]], location.tz_hours, lineno))
        vals = []
        for c in CSV_COLUMNS[1:]:
            field = rec[pos[c]].strip()
            if field == "":
                raise WeatherValidationError(f"missing value in {c} at line {lineno}")
            vals.append(_float(field, lineno, c))
        rows.append(vals)
    arr = np.array(rows, dtype=float).reshape(-1, len(CSV_COLUMNS) - 1)
    return build_series(stamps, *arr[:, :6].T, location=location, sol_zen=arr[:, 6])


# EnergyPlus missing-value sentinels
_EPW_MISSING = {"t": 99.9, "rh": 999.0, "p": 999999.0, "rad": 9999.0}


def _parse_epw(text: str, year: int | None = None) -> WeatherSeries:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("LOCATION"):
        raise WeatherParseError("EPW file must start with a LOCATION record", 1)
    loc = lines[0].split(",")
    if len(loc) < 10:
        raise WeatherParseError("LOCATION record needs 10 fields", 1)
    location = Location(
        lat_deg=_float(loc[6], 1, "latitude"),
        lon_deg=_float(loc[7], 1, "longitude"),
        tz_hours=_float(loc[8], 1, "time zone"),
        alt=_float(loc[9], 1, "elevation"),
        name=loc[1].strip(),
    )
    data_start = 8
    for i, s in enumerate(lines[:8]):
        if s.startswith("DATA PERIODS"):
            data_start = i + 1
    stamps, t, rh, p, ghi, dni, dhi = [], [], [], [], [], [], []
    for i, raw in enumerate(lines[data_start:], start=data_start + 1):
        if not raw.strip():
            continue
        rec = raw.split(",")
        if len(rec) < 16:
            raise WeatherSchemaError(f"line {i}: EPW data row has {len(rec)} fields, need at least 16")
        y = int(_float(rec[0], i, "year"))
        if year is None:
            year = y
        month, day, hour = (int(_float(rec[k], i, n)) for k, n in ((1, "month"), (2, "day"), (3, "hour")))
        if not 1 <= hour <= 24:
            raise WeatherParseError(f"hour {hour} outside 1..24", i)
        try:
            stamps.append(datetime(year, month, day) + timedelta(hours=hour - 1))
        except ValueError as exc:
            raise WeatherParseError(str(exc), i) from None
        vals = [_float(rec[k], i, n) for k, n in
                ((6, "dry bulb"), (8, "relative humidity"), (9, "pressure"),
                 (13, "global horizontal"), (14, "direct normal"), (15, "diffuse horizontal"))]
        if (vals[0] >= _EPW_MISSING["t"] or vals[1] >= _EPW_MISSING["rh"]
                or vals[2] >= _EPW_MISSING["p"] or max(vals[3:]) >= _EPW_MISSING["rad"]):
            raise WeatherValidationError(f"missing-value sentinel at line {i}")
        t.append(vals[0] + ZERO_CELSIUS)
        rh.append(vals[1] / 100.0)
        p.append(vals[2])
        ghi.append(vals[3])
        dni.append(vals[4])
        dhi.append(vals[5])
    return build_series(stamps, t, ghi, dni, dhi, rh, p, location)


_MOS_TABLE = re.compile(r"^\s*double\s+\w+\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")


def _parse_mos(text: str, year: int | None = None) -> WeatherSeries:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "#1":
        raise WeatherParseError("expected '#1' as first line of a .mos table", 1)
    if len(lines) < 2 or not _MOS_TABLE.match(lines[1]):
        raise WeatherParseError(f"expected 'double name(rows,cols)', found {lines[1] if len(lines) > 1 else ''!r}", 2)
    ncols = int(_MOS_TABLE.match(lines[1]).group(2))
    if ncols < 11:
        raise WeatherSchemaError(f"table declares {ncols} columns, need at least 11")
    location = Location()
    year = 2023 if year is None else year
    base = datetime(year, 1, 1)
    stamps, t, rh, p, ghi, dni, dhi = [], [], [], [], [], [], []
    for i, raw in enumerate(lines[2:], start=3):
        s = raw.strip()
        if not s:
            continue
        if s.startswith("#"):
            if s[1:].startswith("LOCATION"):
                loc = s[1:].split(",")
                if len(loc) >= 10:
                    location = Location(
                        lat_deg=_float(loc[6], i, "latitude"),
                        lon_deg=_float(loc[7], i, "longitude"),
                        tz_hours=_float(loc[8], i, "time zone"),
                        alt=_float(loc[9], i, "elevation"),
                        name=loc[1].strip(),
                    )
            continue
        rec = [x for x in re.split(r"[\s,;]+", s) if x]
        if len(rec) < 11:
            raise WeatherSchemaError(f"line {i}: row has {len(rec)} columns, need at least 11")
        vals = [_float(x, i, "value") for x in rec[:11]]
        stamps.append(base + timedelta(seconds=vals[0]))
        t.append(vals[1] + ZERO_CELSIUS)
        rh.append(vals[3] / 100.0)
        p.append(vals[4])
        ghi.append(vals[8])
        dni.append(vals[9])
        dhi.append(vals[10])
    return build_series(stamps, t, ghi, dni, dhi, rh, p, location)


def parse_weather(data, format: str = "csv", *, year: int | None = None) -> WeatherSeries:
    """Parse raw weather file content.

    Parameters
    ----------
    data : bytes or str
        File content.
    format : {"csv", "epw", "tmy3-mos"}
    year : int, optional
        Calendar year assigned to EPW/MOS rows (TMY files mix years).
    """
    text = _to_text(data)
    fmt = format.lower()
    if fmt == "csv":
        return _parse_csv(text)
    if fmt == "epw":
        return _parse_epw(text, year)
    if fmt in ("tmy3-mos", "mos", "tmy3"):
        return _parse_mos(text, year)
    raise ValueError(f"unknown weather format {format!r}")


def read_weather(path, format: str | None = None, **kwargs) -> WeatherSeries:
    """Read a weather file, inferring the format from its suffix when not given."""
    path = str(path)
    if format is None:
        low = path.lower()
        format = "epw" if low.endswith(".epw") else "tmy3-mos" if low.endswith(".mos") else "csv"
    with open(path, "rb") as fh:
        return parse_weather(fh.read(), format, **kwargs)


def to_csv(series: WeatherSeries) -> str:
    """Serialize to the canonical CSV format (lossless for float64 values)."""
    loc = series.location
    buf = io.StringIO()
    buf.write(f"# lat={loc.lat_deg!r}, lon={loc.lon_deg!r}, alt={loc.alt!r}, tz={loc.tz_hours!r}\n")
    if loc.name:
        buf.write(f"# name={loc.name}\n")
    buf.write(",".join(CSV_COLUMNS) + "\n")
    cols = [series.t_dry_bulb] + [series.column(n) for n in
                                  ("h_glo_hor", "h_dir_nor", "h_dif_hor", "rel_hum", "p_atm", "sol_zen")]
    for ts, *vals in zip(series.timestamps, *cols):
        buf.write(ts.isoformat() + "," + ",".join(repr(float(v)) for v in vals) + "\n")
    return buf.getvalue()


def sample_fields() -> tuple[str, ...]:
    return tuple(f.name for f in fields(WeatherSample))
