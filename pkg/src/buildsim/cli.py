"""Command-line entry point: ``buildsim [--config PATH] [--filter GLOB] ...``.

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

from . import __version__
from .config import RunConfig, load_config, resolve, validate_config
from .errors import BuildSimError, ConfigError
from .report import render_report, write_atomic
from .scenario import build_matrix, comfort_fraction, run_matrix

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2
OUT_ENV = "BUILDSIM_OUT"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="buildsim",
        description="Simulate the January scenario matrix of a heated single-family house.",
    )
    ap.add_argument("--config", metavar="PATH", help="YAML run configuration (merged over the shipped defaults)")
    ap.add_argument("--filter", metavar="GLOB", help="scenario code pattern, e.g. 'B1*' or 'B?O1W1'")
    ap.add_argument("--seed", type=int, metavar="N", help="occupancy random seed")
    ap.add_argument("--out", metavar="DIR", help=f"output directory (default: ${OUT_ENV} or the config value)")
    ap.add_argument("--jobs", type=int, metavar="N", help="worker processes")
    ap.add_argument("--validate", action="store_true", help="check the configuration and exit")
    ap.add_argument("--no-traces", action="store_true", help="skip the per-scenario trace CSV files")
    ap.add_argument("-q", "--quiet", action="store_true", help="do not print the summary table")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return ap


def effective_config(args) -> RunConfig:
    cfg = load_config(args.config)
    out = args.out or os.environ.get(OUT_ENV) or None
    return cfg.with_overrides(seed=args.seed, filter=args.filter, output_dir=out, jobs=args.jobs)


def summary_table(runs) -> str:
    head = f"{'scenario':<8} {'V_gas m3':>9} {'E_load kWh':>11} {'E_gen kWh':>10} {'E_feed kWh':>11} " \
           f"{'CO2 t':>7} {'cost EUR':>9} {'comfort':>8}"
    lines = [head, "-" * len(head)]
    for run in runs:
        r = run.result
        lines.append(f"{r.code:<8} {r.v_gas:9.1f} {r.e_load:11.1f} {r.e_gen:10.1f} {r.e_feed:11.1f} "
                     f"{r.co2:7.3f} {r.cost:9.2f} {comfort_fraction(run.trace):8.1%}")
    return "\n".join(lines)


def run(config: RunConfig, traces: bool = True, quiet: bool = False) -> int:
    """Simulate all selected scenarios and write the artifacts. Returns an exit status."""
    try:
        res = resolve(config)
        specs = build_matrix(config, resolved=res)
    except ConfigError as exc:
        print(f"buildsim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    t0 = time.perf_counter()
    try:
        runs = run_matrix(config, specs, resolved=res)
    except ConfigError as exc:
        print(f"buildsim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BuildSimError as exc:
        print(f"buildsim: simulation failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    elapsed = time.perf_counter() - t0

    out = Path(config.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if traces:
            for r in runs:
                write_atomic(out / f"trace_{r.spec.code}.csv", r.trace.to_csv())
        # results.csv is written last by render_report
        render_report([r.result for r in runs], out, traces={r.spec.code: r.trace for r in runs})
    except OSError as exc:
        print(f"buildsim: cannot write output: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if not quiet:
        print(summary_table(runs))
        print(f"\n{len(runs)} scenario(s) in {elapsed:.2f} s, results in {out / 'results.csv'}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = effective_config(args)
    except ConfigError as exc:
        if args.validate:
            print(f"invalid\n  error: {exc}")
        else:
            print(f"buildsim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.validate:
        report = validate_config(cfg)
        print(report.render())
        return EXIT_OK if report.valid else EXIT_CONFIG
    return run(cfg, traces=not args.no_traces, quiet=args.quiet)


if __name__ == "__main__":
    sys.exit(main())
