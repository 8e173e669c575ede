#!/usr/bin/env python3
"""Regenerate the bundled synthetic storage-study dataset.

The dataset imitates the shape of a GB-style adequacy study: annual hourly
demand traces (one column per year), hourly wind output traces for a 10 GW
fleet (one column per year), a diverse conventional thermal portfolio and a
27-unit storage fleet. Everything is synthetic and seeded, so the output is
reproducible bit for bit with the same numpy version.

Usage: python3 tools/data/make_storage_data.py [--check]
"""
import argparse
import math
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parents[2] / "data" / "storage"
HOURS = 8760
DEMAND_YEARS = list(range(2006, 2016))
WIND_YEARS = list(range(1995, 2015))
WIND_CAPACITY_MW = 10_000.0

# Weekday hourly shape (fraction of daily peak), winter and summer variants.
WINTER_SHAPE = np.array([0.66, 0.62, 0.60, 0.59, 0.59, 0.61, 0.68, 0.79, 0.88, 0.90, 0.90, 0.89,
                         0.88, 0.87, 0.86, 0.87, 0.93, 1.00, 0.99, 0.95, 0.90, 0.84, 0.77, 0.70])
SUMMER_SHAPE = np.array([0.67, 0.63, 0.61, 0.60, 0.60, 0.62, 0.70, 0.81, 0.90, 0.94, 0.96, 0.97,
                         0.97, 0.97, 0.96, 0.95, 0.95, 0.96, 0.95, 0.93, 0.92, 0.90, 0.82, 0.73])


def demand_year(rng, year):
    day = np.arange(HOURS) // 24
    hour = np.arange(HOURS) % 24
    # Jan 1 falls on a different weekday each year
    weekday = (day + (year * 365 + year // 4)) % 7
    season = np.cos(2.0 * math.pi * (day - 15) / 365.0)  # +1 mid January
    winter_weight = 0.5 * (1.0 + season)
    shape = winter_weight * WINTER_SHAPE[hour] + (1.0 - winter_weight) * SUMMER_SHAPE[hour]
    weekend = np.where(weekday >= 5, 0.87, 1.0)

    # daily temperature anomaly, AR(1); cold spells matter more in winter
    anomaly = np.zeros(365)
    for i in range(1, 365):
        anomaly[i] = 0.85 * anomaly[i - 1] + rng.normal(0.0, 0.022)
    heating = 1.0 + anomaly[day] * (0.6 + 0.8 * winter_weight)

    level = 40_500.0 * (1.0 + 0.19 * season) * (1.0 + rng.normal(0.0, 0.012))
    noise = 1.0 + rng.normal(0.0, 0.008, HOURS)
    return level * shape * weekend * heating * noise


def wind_year(rng):
    # latent normalised wind speed with strong hourly persistence and a winter bias
    day = np.arange(HOURS) // 24
    season = np.cos(2.0 * math.pi * (day - 15) / 365.0)
    z = np.zeros(HOURS)
    z[0] = rng.normal()
    for t in range(1, HOURS):
        z[t] = 0.985 * z[t - 1] + rng.normal(0.0, math.sqrt(1.0 - 0.985 ** 2))
    speed = np.maximum(0.0, 7.5 + 1.2 * season + 3.4 * z)
    # generic turbine power curve: cut-in 3.5 m/s, rated 13 m/s, cut-out 25 m/s
    frac = np.clip((speed ** 3 - 3.5 ** 3) / (13.0 ** 3 - 3.5 ** 3), 0.0, 1.0)
    frac[speed >= 25.0] = 0.0
    return WIND_CAPACITY_MW * 0.92 * frac


# (name, count, capacity MW, MTTF h, MTTR h)
PORTFOLIO = [
    ("nuclear", 8, 1150, 2200, 120),
    ("coal", 10, 500, 1000, 60),
    ("ccgt_large", 30, 820, 1200, 48),
    ("ccgt_small", 16, 430, 1100, 40),
    ("biomass", 4, 630, 900, 60),
    ("ocgt", 30, 95, 500, 30),
    ("engine", 40, 20, 800, 24),
    ("hydro", 12, 90, 2000, 20),
]

# (name, power MW, energy MWh)
FLEET = [
    ("phs_a", 1600, 8600), ("phs_b", 420, 6800), ("phs_c", 330, 1300), ("phs_d", 290, 5800),
    ("bess_01", 50, 50), ("bess_02", 49, 49), ("bess_03", 40, 20), ("bess_04", 35, 35),
    ("bess_05", 30, 60), ("bess_06", 25, 25), ("bess_07", 50, 25), ("bess_08", 20, 40),
    ("bess_09", 45, 45), ("bess_10", 10, 20), ("bess_11", 49, 98), ("bess_12", 20, 10),
    ("bess_13", 35, 17), ("bess_14", 40, 80), ("bess_15", 15, 15), ("bess_16", 25, 50),
    ("bess_17", 30, 30), ("bess_18", 49, 24), ("bess_19", 12, 24), ("bess_20", 40, 40),
    ("bess_21", 20, 20), ("bess_22", 33, 66), ("bess_23", 45, 22),
]


def availability(mttf, mttr):
    pf = -math.expm1(-1.0 / mttf)
    pr = -math.expm1(-1.0 / mttr)
    return pr / (pf + pr)


def copt():
    total = sum(n * c for _, n, c, _, _ in PORTFOLIO)
    p = np.zeros(total + 1)
    p[0] = 1.0
    for _, n, c, mttf, mttr in PORTFOLIO:
        a = availability(mttf, mttr)
        for _ in range(n):
            q = p * (1.0 - a)
            q[c:] += p[:-c] * a
            p = q
    return p


def check(demand, wind):
    p = copt()
    cdf = np.cumsum(p)
    grid = np.arange(len(p))
    partial = np.cumsum(grid * p)
    lole = eens = 0.0
    for d in demand.T:
        for w in wind.T:
            r = d - w
            k = np.clip(np.ceil(r).astype(int) - 1, -1, len(p) - 1)
            prob = np.where(k >= 0, cdf[np.maximum(k, 0)], 0.0)
            part = np.where(k >= 0, partial[np.maximum(k, 0)], 0.0)
            lole += prob.sum()
            eens += (r * prob - part).sum()
    pairs = demand.shape[1] * wind.shape[1]
    print(f"installed conventional {len(p) - 1} MW, expected available {np.dot(grid, p):.0f} MW")
    print(f"peak demand {demand.max():.0f} MW, mean {demand.mean():.0f} MW, wind CF {wind.mean() / WIND_CAPACITY_MW:.3f}")
    print(f"no-storage LOLE {lole / pairs:.3f} h/y, EENS {eens / pairs:.1f} MWh/y")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--check", action="store_true")
    args = parser.parse_args()
    rng = np.random.default_rng(20191104)
    demand = np.column_stack([demand_year(rng, y) for y in DEMAND_YEARS])
    wind = np.column_stack([wind_year(rng) for _ in WIND_YEARS])
    if args.check:
        check(demand, wind)
        return
    OUT.mkdir(parents=True, exist_ok=True)
    header = ",".join(f"d{y}" for y in DEMAND_YEARS)
    np.savetxt(OUT / "demand_years.csv", demand, fmt="%.1f", delimiter=",", header=header, comments="")
    header = ",".join(f"w{y}" for y in WIND_YEARS)
    np.savetxt(OUT / "wind_years.csv", wind, fmt="%.1f", delimiter=",", header=header, comments="")
    with open(OUT / "conventional_portfolio.csv", "w") as f:
        f.write("name,capacity_mw,mttf_h,mttr_h\n")
        for name, n, c, mttf, mttr in PORTFOLIO:
            for i in range(n):
                f.write(f"{name}_{i + 1:02d},{c},{mttf},{mttr}\n")
    with open(OUT / "storage_fleet.csv", "w") as f:
        f.write("name,power_mw,energy_mwh\n")
        for name, p, e in FLEET:
            f.write(f"{name},{p},{e}\n")


if __name__ == "__main__":
    main()
