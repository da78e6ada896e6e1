"""Run configuration: YAML loading, path resolution and validation.

A user config is deep-merged over the shipped ``default.yaml``. Paths are
relative to the config file that names them; ``builtin:NAME`` resolves to
a data file shipped inside the package.
"""

from __future__ import annotations

import copy
import fnmatch
import math
from dataclasses import dataclass, field
from datetime import datetime
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from . import control, electrical, envelope, occupancy, plant
from .errors import ConfigError
from .weather import WeatherSeries, apply_cold_wave, read_weather

BUILTIN_PREFIX = "builtin:"
DEFAULT_CONFIG = BUILTIN_PREFIX + "default.yaml"


def builtin_path(name: str) -> Path:
    """Filesystem path of a data file shipped with the package."""
    return Path(str(resources.files("buildsim") / "data" / name))


def resolve_path(ref: str, base_dir: Path | None) -> Path:
    ref = str(ref)
    if ref.startswith(BUILTIN_PREFIX):
        return builtin_path(ref[len(BUILTIN_PREFIX):])
    p = Path(ref).expanduser()
    if not p.is_absolute() and base_dir is not None:
        p = base_dir / p
    return p


def _load_yaml(path: Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return data


def deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = deep_merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def _rebase(section: dict, keys, base_dir: Path) -> None:
    # make relative paths of a user file independent of later merging
    for k in keys:
        v = section.get(k)
        if isinstance(v, str) and not v.startswith(BUILTIN_PREFIX):
            section[k] = str(resolve_path(v, base_dir))


@dataclass(frozen=True)
class RunConfig:
    """Merged configuration tree plus the top-level run settings."""

    data: dict = field(repr=False)
    seed: int = 0
    dt: float = 900.0
    horizon: float = 31 * 86400.0
    warmup: float = 86400.0
    filter: str = "*"
    jobs: int = 1
    output_dir: str = "results"
    start: datetime | None = None
    source: str = DEFAULT_CONFIG

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        n = self.horizon / self.dt
        if not (n >= 1 and math.isclose(n, round(n), rel_tol=0, abs_tol=1e-9)):
            raise ConfigError(f"horizon {self.horizon} s is not a positive multiple of dt={self.dt} s")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        if self.warmup < 0:
            raise ConfigError("warmup must be non-negative")

    @property
    def steps(self) -> int:
        return int(round(self.horizon / self.dt))

    def section(self, *keys) -> Any:
        node = self.data
        for k in keys:
            if not isinstance(node, dict) or k not in node:
                raise ConfigError(f"missing config key {'.'.join(keys)}")
            node = node[k]
        return node

    def with_overrides(self, **kw) -> "RunConfig":
        """Copy with top-level keys (``seed``, ``filter``, ``jobs``, ``output_dir``, ...) replaced.

        ``None`` values are ignored.
        """
        kw = {k: v for k, v in kw.items() if v is not None}
        data = copy.deepcopy(self.data)
        data.update(kw)
        return config_from_mapping(data, source=self.source)


def config_from_mapping(data: dict, source: str = "<mapping>") -> RunConfig:
    try:
        dt = float(data.get("dt", 900.0))
        if "horizon" in data:
            horizon = float(data["horizon"])
        else:
            horizon = float(data.get("horizon_days", 31)) * 86400.0
        start = data.get("start")
        if isinstance(start, str):
            start = datetime.fromisoformat(start)
        return RunConfig(
            data=data,
            seed=int(data.get("seed", 0)),
            dt=dt,
            horizon=horizon,
            warmup=float(data.get("warmup_hours", 24)) * 3600.0,
            filter=str(data.get("filter", "*")),
            jobs=int(data.get("jobs", 1)),
            output_dir=str(data.get("output_dir", "results")),
            start=start,
            source=source,
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{source}: {exc}") from exc


def load_config(path=None) -> RunConfig:
    """Load ``path`` merged over the shipped defaults (defaults only if ``None``)."""
    base = _load_yaml(builtin_path("default.yaml"))
    if path is None:
        return config_from_mapping(base, source=DEFAULT_CONFIG)
    path = Path(path)
    user = _load_yaml(path)
    base_dir = path.resolve().parent
    if isinstance(user.get("weather"), dict):
        _rebase(user["weather"], ("file",), base_dir)
    if isinstance(user.get("fabric"), dict):
        _rebase(user["fabric"], list(user["fabric"]), base_dir)
    if isinstance(user.get("occupancy"), dict):
        _rebase(user["occupancy"], ("profile",), base_dir)
    return config_from_mapping(deep_merge(base, user), source=str(path))


# ---------------------------------------------------------------------------
# Resolution into model objects
# ---------------------------------------------------------------------------

def _build(cls, params: dict, where: str, **extra):
    if not isinstance(params, dict):
        raise ConfigError(f"{where} must be a mapping")
    try:
        return cls(**params, **extra)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def load_fabric(path: Path) -> envelope.BuildingFabric:
    data = _load_yaml(path)
    windows = data.pop("windows", None)
    if not isinstance(windows, list) or not windows:
        raise ConfigError(f"{path}: fabric needs a non-empty 'windows' list")
    wins = tuple(_build(envelope.Window, w, f"{path}: window {i}") for i, w in enumerate(windows))
    return _build(envelope.BuildingFabric, data, str(path), windows=wins)


@dataclass(frozen=True)
class ResolvedInputs:
    """Everything needed to build any scenario model, loaded once per run."""

    weather: WeatherSeries
    cold_wave_delta: float
    fabrics: dict
    profile_table: occupancy.ProfileTable
    household_size: int
    appliances: occupancy.ApplianceTable
    heat_pump: dict
    boiler: dict
    radiator: dict
    sizing: dict
    fuel: plant.FuelConstants
    pv: electrical.PvArray
    battery: electrical.BatteryState
    thermostat: control.ThermostatState
    schedule: control.SetpointSchedule
    initial: dict
    tariffs: dict

    def weather_for(self, variant: str) -> WeatherSeries:
        return apply_cold_wave(self.weather, self.cold_wave_delta) if variant == "W2" else self.weather


def resolve(config: RunConfig) -> ResolvedInputs:
    """Load referenced files and construct parameter objects.

    Raises :class:`ConfigError` for missing files and invariant violations.
    """
    base = Path(config.source).resolve().parent if not config.source.startswith(("<", BUILTIN_PREFIX)) else None
    wcfg = config.section("weather")
    wpath = resolve_path(wcfg["file"], base)
    if not wpath.is_file():
        raise ConfigError(f"weather file not found: {wpath}")
    try:
        weather = read_weather(wpath, wcfg.get("format"))
    except ValueError as exc:
        raise ConfigError(f"weather file {wpath}: {exc}") from exc

    fabrics = {}
    for name, ref in config.section("fabric").items():
        fpath = resolve_path(ref, base)
        if not fpath.is_file():
            raise ConfigError(f"fabric preset {name!r} not found: {fpath}")
        fabrics[name] = load_fabric(fpath)

    ocfg = config.section("occupancy")
    ppath = resolve_path(ocfg["profile"], base)
    if not ppath.is_file():
        raise ConfigError(f"occupancy profile not found: {ppath}")
    try:
        table = occupancy.read_profile_table(ppath)
        size = int(ocfg.get("household_size", 4))
        table.profile(size)
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"occupancy profile {ppath}: {exc}") from exc
    appliances = _build(occupancy.ApplianceTable, {
        "avg_power_by_count": {int(k): float(v) for k, v in ocfg.get("appliance_power", {}).items()},
        "standby_fraction": float(ocfg.get("standby_fraction", occupancy.DEFAULT_STANDBY_FRACTION)),
    }, "occupancy.appliance_power")
    if sorted(appliances.avg_power_by_count) != [1, 2, 3, 4]:
        raise ConfigError("occupancy.appliance_power needs entries for 1..4 occupants")

    pcfg = config.section("plant")
    hp = dict(pcfg.get("heat_pump", {}))
    bo = dict(pcfg.get("boiler", {}))
    if "efficiency_curve" in bo:
        bo["efficiency_curve"] = tuple(tuple(x) for x in bo["efficiency_curve"])
    # probe the invariants now with a nominal rating
    _build(plant.HeatPumpParams, hp, "plant.heat_pump", q_rated=1.0)
    _build(plant.BoilerParams, bo, "plant.boiler", q_rated=1.0)
    sizing = dict(pcfg.get("sizing", {}))
    if not float(sizing.get("margin", 1.2)) > 0:
        raise ConfigError("plant.sizing.margin must be positive")
    radiator = dict(pcfg.get("radiator", {}))

    ecfg = config.section("electrical")
    bat = dict(ecfg.get("battery", {}))
    soc_frac = float(bat.pop("initial_soc", 0.5))
    if not 0.0 <= soc_frac <= 1.0:
        raise ConfigError("electrical.battery.initial_soc must lie in [0, 1]")
    cap = float(bat.get("capacity", 10.0))
    battery = _build(electrical.BatteryState, bat, "electrical.battery", soc=soc_frac * cap)

    tariffs = dict(config.section("tariffs"))
    for k, v in tariffs.items():
        if not float(v) >= 0:
            raise ConfigError(f"tariffs.{k} must be non-negative")

    delta = float(wcfg.get("cold_wave_delta", 4.0))
    if not math.isfinite(delta):
        raise ConfigError("weather.cold_wave_delta must be finite")
    return ResolvedInputs(
        weather=weather,
        cold_wave_delta=delta,
        fabrics=fabrics,
        profile_table=table,
        household_size=size,
        appliances=appliances,
        heat_pump=hp,
        boiler=bo,
        radiator=radiator,
        sizing=sizing,
        fuel=_build(plant.FuelConstants, dict(pcfg.get("fuel", {})), "plant.fuel"),
        pv=_build(electrical.PvArray, dict(ecfg.get("pv", {})), "electrical.pv"),
        battery=battery,
        thermostat=_build(control.ThermostatState, dict(config.section("control").get("thermostat", {})),
                          "control.thermostat"),
        schedule=_build(control.SetpointSchedule, dict(config.section("control").get("schedule", {})),
                        "control.schedule"),
        initial=dict(config.data.get("initial", {})),
        tariffs=tariffs,
    )


# ---------------------------------------------------------------------------
# Validation report
# ---------------------------------------------------------------------------

@dataclass
class ValidationReport:
    valid: bool
    errors: list[str]
    scenarios: list[str]
    effective: dict

    def render(self) -> str:
        lines = ["valid" if self.valid else "invalid"]
        lines += [f"  error: {e}" for e in self.errors]
        if self.effective:
            lines.append("resolved:")
            lines += [f"  {k}: {v}" for k, v in self.effective.items()]
        if self.scenarios:
            lines.append(f"scenarios ({len(self.scenarios)}):")
            lines += [f"  {c}" for c in self.scenarios]
        return "\n".join(lines)


def validate_config(config_or_path=None) -> ValidationReport:
    """Dry-run the configuration: load, resolve, size plants and expand the filter.

    Problems are collected in the report, never raised.
    """
    from . import scenario

    errors: list[str] = []
    try:
        cfg = config_or_path if isinstance(config_or_path, RunConfig) else load_config(config_or_path)
    except ConfigError as exc:
        return ValidationReport(False, [str(exc)], [], {})
    effective: dict = {
        "config": cfg.source,
        "seed": cfg.seed,
        "dt_s": cfg.dt,
        "horizon_s": cfg.horizon,
        "filter": cfg.filter,
    }
    codes: list[str] = []
    try:
        res = resolve(cfg)
        specs = scenario.build_matrix(cfg, resolved=res)
        codes = [s.code for s in specs]
        effective["weather"] = f"{res.weather.start.isoformat()} .. {res.weather.end.isoformat()}"
        if res.weather.horizon < (cfg.steps - 1) * cfg.dt:
            errors.append(f"weather covers {res.weather.horizon:.0f} s, horizon needs {(cfg.steps - 1) * cfg.dt:.0f} s")
        for name, fab in sorted(res.fabrics.items()):
            q = scenario.plant_rating(fab, res)
            effective[f"fabric.{name}"] = f"u_op={fab.u_op}, u_win={fab.u_win}, a_f={fab.a_f}, q_rated={q:.0f} W"
        for spec in specs[:1]:
            scenario.model_for(spec, res, cfg)
    except ConfigError as exc:
        errors.append(str(exc))
    return ValidationReport(not errors, errors, codes, effective)


def filter_codes(codes, pattern: str) -> list[str]:
    return [c for c in codes if fnmatch.fnmatchcase(c, pattern)]
