import csv
import subprocess
import sys

import pytest
import yaml

from buildsim import cli
from buildsim.config import RunConfig, deep_merge, load_config, resolve, validate_config
from buildsim.errors import ConfigError


def write_cfg(tmp_path, data, name="run.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(data))
    return p


def test_default_config_values(default_config):
    c = default_config
    assert c.dt == 900 and c.horizon == 31 * 86400 and c.steps == 2976
    assert c.seed == 2023 and c.filter == "*" and c.jobs == 1


def test_deep_merge():
    base = {"a": 1, "b": {"c": 2, "d": 3}}
    assert deep_merge(base, {"b": {"c": 5}, "e": 6}) == {"a": 1, "b": {"c": 5, "d": 3}, "e": 6}
    assert base == {"a": 1, "b": {"c": 2, "d": 3}}


def test_runconfig_invariants(default_config):
    with pytest.raises(ConfigError):
        default_config.with_overrides(dt=0)
    with pytest.raises(ConfigError):
        default_config.with_overrides(horizon=1000.0, horizon_days=None)
    with pytest.raises(ConfigError):
        default_config.with_overrides(jobs=0)


def test_user_config_merges_over_defaults(tmp_path):
    p = write_cfg(tmp_path, {"seed": 5, "plant": {"boiler": {"tank_volume": 0.5}}})
    c = load_config(p)
    assert c.seed == 5
    assert c.section("plant", "boiler", "tank_volume") == 0.5
    assert c.section("plant", "boiler", "tank_on_below") == 328.15


def test_relative_paths_resolve_against_config_dir(tmp_path, resolved):
    sub = tmp_path / "cfg"
    sub.mkdir()
    (sub / "fab.yaml").write_text(yaml.safe_dump({
        "a_f": 100.0, "u_op": 1.0, "a_op": 200.0, "u_win": 2.0, "volume": 250.0,
        "windows": [{"area": 10.0, "azimuth": 0.0}]}))
    p = write_cfg(sub, {"fabric": {"worse": "fab.yaml"}})
    res = resolve(load_config(p))
    assert res.fabrics["worse"].a_f == 100.0
    assert res.fabrics["better"] == resolved.fabrics["better"]


def test_validate_default():
    rep = validate_config()
    assert rep.valid and len(rep.scenarios) == 36
    text = rep.render()
    assert text.splitlines()[0] == "valid"
    assert "B1O1W1" in text and "B6O3W2" in text


def test_validate_reports_boiler_efficiency(tmp_path):
    p = write_cfg(tmp_path, {"plant": {"boiler": {"efficiency_curve": [[0.5, 1.2], [1.0, 0.9]]}}})
    rep = validate_config(p)
    assert not rep.valid
    assert any("efficienc" in e for e in rep.errors)
    assert rep.render().startswith("invalid")


def test_validate_reports_missing_profile(tmp_path):
    p = write_cfg(tmp_path, {"occupancy": {"profile": "nope.csv"}})
    rep = validate_config(p)
    assert not rep.valid and any("nope.csv" in e for e in rep.errors)


def test_validate_reports_empty_filter(tmp_path):
    rep = validate_config(load_config().with_overrides(filter="X*"))
    assert not rep.valid


def test_validate_never_raises_on_bad_yaml(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("seed: [1, 2\n")
    rep = validate_config(p)
    assert not rep.valid


def test_cli_validate(capsys):
    assert cli.main(["--validate"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("valid") and "scenarios (36)" in out


def test_cli_single_scenario(tmp_path, capsys):
    out = tmp_path / "out"
    assert cli.main(["--filter", "B1O1W1", "--out", str(out)]) == 0
    assert sorted(p.name for p in out.glob("trace_*.csv")) == ["trace_B1O1W1.csv"]
    rows = list(csv.reader((out / "results.csv").open()))
    assert rows[0] == ["scenario_code", "v_gas_m3", "e_load_kwh", "e_gen_kwh", "e_feed_kwh", "co2_t", "cost_eur"]
    assert len(rows) == 2 and rows[1][0] == "B1O1W1"
    with (out / "trace_B1O1W1.csv").open() as fh:
        assert sum(1 for _ in fh) == 2977
    assert "B1O1W1" in capsys.readouterr().out
    assert not list(out.glob(".*tmp"))


def test_cli_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["--filter", "B[25]O2W*", "--out", str(a), "-q"]) == 0
    assert cli.main(["--filter", "B[25]O2W*", "--out", str(b), "-q", "--jobs", "2"]) == 0
    for name in ("results.csv", "gas.svg", "cost.svg", "temperature.svg", "trace_B5O2W2.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_cli_invalid_weather_path(tmp_path, capsys):
    p = write_cfg(tmp_path, {"weather": {"file": "missing.csv"}})
    out = tmp_path / "out"
    assert cli.main(["--config", str(p), "--out", str(out)]) == cli.EXIT_CONFIG
    assert not (out / "results.csv").exists()
    assert "missing.csv" in capsys.readouterr().err


def test_cli_short_weather_is_runtime_error(tmp_path, capsys):
    p = write_cfg(tmp_path, {"horizon_days": 40, "filter": "B2O1W1"})
    out = tmp_path / "out"
    assert cli.main(["--config", str(p), "--out", str(out)]) == cli.EXIT_RUNTIME
    assert not (out / "results.csv").exists()
    assert "B2O1W1" in capsys.readouterr().err


def test_cli_empty_filter_is_config_error(tmp_path):
    assert cli.main(["--filter", "Z*", "--out", str(tmp_path)]) == cli.EXIT_CONFIG


def test_cli_out_env(tmp_path, monkeypatch):
    monkeypatch.setenv("BUILDSIM_OUT", str(tmp_path / "env"))
    cfg = cli.effective_config(cli.build_parser().parse_args(["--seed", "3"]))
    assert isinstance(cfg, RunConfig)
    assert cfg.output_dir == str(tmp_path / "env") and cfg.seed == 3
    cfg = cli.effective_config(cli.build_parser().parse_args(["--out", "x"]))
    assert cfg.output_dir == "x"


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "buildsim", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("buildsim ")
