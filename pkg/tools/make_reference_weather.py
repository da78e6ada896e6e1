"""Generate the shipped reference January weather file.

The measured site data behind the original study is not public, so the
package ships a synthetic but physically consistent January for a site in
the Upper Rhine plain: Haurwitz clear-sky irradiance scaled by a random
daily clearness index, Erbs diffuse split, and an AR(1) daily-mean
temperature with a sinusoidal diurnal swing. Run from the repository root:

    python tools/make_reference_weather.py src/buildsim/data/weather_reference_january.csv
"""

from __future__ import annotations

import argparse
from datetime import datetime, timedelta

import numpy as np

from buildsim.weather import Location, build_series, to_csv, ZERO_CELSIUS

LOCATION = Location(lat_deg=49.09, lon_deg=8.43, alt=110.0, tz_hours=1.0, name="Upper Rhine plain (synthetic)")
START = datetime(2023, 1, 1)
HOURS = 31 * 24 + 1  # closes the month so every 15 min step can be interpolated
TARGET_GHI_KWH = 30.0  # monthly global horizontal irradiation, kWh/m2
MEAN_T, SD_T, PHI_T, MIN_T = 1.5, 3.5, 0.7, -8.0  # degC
DIURNAL_AMP = 2.5  # K, peak at 14:00


def erbs_diffuse_fraction(kt):
    kt = np.asarray(kt, dtype=float)
    mid = 0.9511 - 0.1604 * kt + 4.388 * kt**2 - 16.638 * kt**3 + 12.336 * kt**4
    return np.where(kt <= 0.22, 1.0 - 0.09 * kt, np.where(kt <= 0.8, mid, 0.165))


def generate(seed: int = 20230101):
    rng = np.random.default_rng(seed)
    stamps = [START + timedelta(hours=h) for h in range(HOURS)]
    probe = build_series(stamps, np.full(HOURS, 273.15), *np.zeros((3, HOURS)),
                         np.full(HOURS, 0.8), np.full(HOURS, 101325.0), LOCATION)
    zen = probe.column("sol_zen")
    cosz = np.clip(np.cos(zen), 0.0, None)
    clear = np.where(cosz > 0.01, 1098.0 * cosz * np.exp(-0.057 / np.maximum(cosz, 0.01)), 0.0)

    days = HOURS // 24 + 1
    kt_day = rng.beta(2.0, 2.6, size=days)
    kt = np.repeat(kt_day, 24)[:HOURS]
    ghi = clear * kt
    ghi *= TARGET_GHI_KWH * 1000.0 / ghi.sum()
    extra = 1367.0 * cosz
    kt_h = np.where(extra > 1.0, np.clip(ghi / np.maximum(extra, 1.0), 0.0, 1.0), 0.0)
    dhi = ghi * erbs_diffuse_fraction(kt_h)
    dni = np.where(cosz > 0.05, (ghi - dhi) / np.maximum(cosz, 0.05), 0.0)
    dhi = np.where(cosz > 0.05, dhi, ghi)

    daily = np.empty(days)
    daily[0] = MEAN_T
    for d in range(1, days):
        daily[d] = MEAN_T + PHI_T * (daily[d - 1] - MEAN_T) + SD_T * np.sqrt(1 - PHI_T**2) * rng.standard_normal()
    # cloudy days are mild, clear days cold
    daily -= 3.0 * (kt_day - kt_day.mean())
    daily += MEAN_T - daily[:31].mean()
    hours = np.arange(HOURS)
    t_day = np.interp(hours, np.arange(days) * 24 + 12, daily)
    t_c = t_day + DIURNAL_AMP * np.cos(2 * np.pi * ((hours % 24) - 14) / 24)
    t_c = np.maximum(t_c, MIN_T)
    rh = np.clip(88.0 - 2.0 * (t_c - t_c.mean()) + 3.0 * rng.standard_normal(HOURS), 50.0, 100.0)
    p = 101325.0 * np.exp(-LOCATION.alt / 8434.0) + 800.0 * np.sin(2 * np.pi * hours / (24 * 6.5))

    return build_series(stamps, np.round(t_c + ZERO_CELSIUS, 2), np.round(ghi, 1), np.round(dni, 1),
                        np.round(dhi, 1), np.round(rh / 100.0, 3), np.round(p, 0), LOCATION)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out")
    ap.add_argument("--seed", type=int, default=20230101)
    args = ap.parse_args(argv)
    series = generate(args.seed)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(to_csv(series))
    t = series.t_dry_bulb - ZERO_CELSIUS
    print(f"{len(series)} rows, mean {t[:-1].mean():.2f} C, min {t.min():.2f} C, "
          f"GHI {series.column('h_glo_hor')[:-1].sum() / 1000:.1f} kWh/m2")


if __name__ == "__main__":
    main()
