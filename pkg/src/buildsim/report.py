"""Results table and charts for a set of scenario results."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np

from . import plotting
from .scenario import RESULT_COLUMNS, ScenarioResult

# decimals per results.csv column
_DECIMALS = {"v_gas_m3": 3, "e_load_kwh": 3, "e_gen_kwh": 3, "e_feed_kwh": 3, "co2_t": 4, "cost_eur": 3}

# at most this many indoor-temperature traces are overlaid in one chart
MAX_TRACE_LINES = 6


def _fmt(x: float, decimals: int) -> str:
    s = f"{x:.{decimals}f}"
    return s[1:] if s.startswith("-") and float(s) == 0.0 else s


def results_csv(results) -> str:
    lines = [",".join(RESULT_COLUMNS)]
    for r in results:
        vals = r.row()
        lines.append(",".join([vals[0]] + [_fmt(v, _DECIMALS[c]) for c, v in zip(RESULT_COLUMNS[1:], vals[1:])]))
    return "\n".join(lines) + "\n"


def write_atomic(path, text: str) -> Path:
    """Write ``text`` to a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def render_report(results: list[ScenarioResult], out_dir, traces=None) -> list[Path]:
    """Write ``results.csv`` and SVG charts to ``out_dir``.

    Charts: gas volume, grid electricity, CO2 and cost per scenario; with
    ``traces`` (code -> SimulationTrace) also the indoor temperature of the
    first few scenarios. Returns the written paths, CSV first.
    """
    if not results:
        raise ValueError("render_report needs at least one result")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    codes = [r.code for r in results]
    charts = [
        plotting.bar_chart(codes, [r.v_gas for r in results], "natural gas [m³]", "Gas consumption",
                           out / "gas.svg"),
        plotting.bar_chart(codes, [r.e_feed for r in results], "grid exchange [kWh]",
                           "Net grid exchange (negative = drawn)", out / "electricity.svg"),
        plotting.bar_chart(codes, [r.co2 for r in results], "CO₂ [t]", "CO₂ emissions", out / "co2.svg"),
        plotting.bar_chart(codes, [r.cost for r in results], "cost [€]", "Heating cost", out / "cost.svg"),
    ]
    if traces:
        series = {}
        for code in list(traces)[:MAX_TRACE_LINES]:
            tr = traces[code]
            days = np.arange(len(tr)) * tr.dt / 86400.0
            series[code] = (days, np.asarray(tr.t_air) - 273.15)
        first = traces[next(iter(traces))]
        series["outdoor"] = (np.arange(len(first)) * first.dt / 86400.0, np.asarray(first.t_ext) - 273.15)
        charts.append(plotting.line_chart(series, "temperature [°C]", "Indoor and outdoor temperature",
                                          out / "temperature.svg"))
    csv_path = write_atomic(out / "results.csv", results_csv(results))
    return [csv_path] + charts
