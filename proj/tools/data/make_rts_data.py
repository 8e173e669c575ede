#!/usr/bin/env python3
"""Regenerate the bundled single-area IEEE Reliability Test System files.

Writes data/rts/rts24.net (network description) and data/rts/rts_load.csv
(hourly system demand, 52 weeks x 7 days x 24 h = 8736 h, year starting on a
Monday). Values are transcribed from the 1979 IEEE RTS tables; the 1996
single-area update uses the same generation, branch and load-profile data.
"""
import pathlib

ROOT = pathlib.Path(__file__).resolve().parents[2] / "data" / "rts"

PEAK_MW = 2850.0

WEEKLY_PEAK = [
    86.2, 90.0, 87.8, 83.4, 88.0, 84.1, 83.2, 80.6, 74.0, 73.7, 71.5, 72.7, 70.4,
    75.0, 72.1, 80.0, 75.4, 83.7, 87.0, 88.0, 85.6, 81.1, 90.0, 88.7, 89.6, 86.1,
    75.5, 81.6, 80.1, 88.0, 72.2, 77.6, 80.0, 72.9, 72.6, 70.5, 78.0, 69.5, 72.4,
    72.4, 74.3, 74.4, 80.0, 88.1, 88.5, 90.9, 94.0, 89.0, 94.2, 97.0, 100.0, 95.2,
]
# Monday .. Sunday
DAILY_PEAK = [93, 100, 98, 96, 94, 77, 75]

# (weekday, weekend) hourly percentages of the daily peak, hour 0 = midnight-1am
WINTER = [(67, 78), (63, 72), (60, 68), (59, 66), (59, 64), (60, 65), (74, 66), (86, 70),
          (95, 80), (96, 88), (96, 90), (95, 91), (95, 90), (95, 88), (93, 87), (94, 87),
          (99, 91), (100, 100), (100, 99), (96, 97), (91, 94), (83, 92), (73, 87), (63, 81)]
SUMMER = [(64, 74), (60, 70), (58, 66), (56, 65), (56, 64), (58, 62), (64, 62), (76, 66),
          (87, 81), (95, 86), (99, 91), (100, 93), (99, 93), (100, 92), (100, 91), (97, 91),
          (96, 92), (96, 94), (93, 95), (92, 95), (92, 100), (93, 93), (87, 88), (72, 80)]
SPRING_FALL = [(63, 75), (62, 73), (60, 69), (58, 66), (59, 65), (65, 65), (72, 68), (85, 74),
               (95, 83), (99, 89), (100, 92), (99, 94), (93, 91), (92, 90), (90, 90), (88, 86),
               (90, 85), (92, 88), (96, 92), (98, 100), (96, 97), (90, 95), (80, 90), (70, 85)]

# bus: peak load MW
BUS_LOAD = {1: 108, 2: 97, 3: 180, 4: 74, 5: 71, 6: 136, 7: 125, 8: 171, 9: 175, 10: 195,
            11: 0, 12: 0, 13: 265, 14: 194, 15: 317, 16: 100, 17: 0, 18: 333, 19: 181,
            20: 128, 21: 0, 22: 0, 23: 0, 24: 0}

# (capacity MW, MTTF h, MTTR h)
UNIT_TYPES = {
    "U12": (12, 2940, 60), "U20": (20, 450, 50), "U50": (50, 1980, 20),
    "U76": (76, 1960, 40), "U100": (100, 1200, 50), "U155": (155, 960, 40),
    "U197": (197, 950, 50), "U350": (350, 1150, 100), "U400": (400, 1100, 150),
}
BUS_UNITS = {
    1: ["U20", "U20", "U76", "U76"], 2: ["U20", "U20", "U76", "U76"],
    7: ["U100"] * 3, 13: ["U197"] * 3, 15: ["U12"] * 5 + ["U155"], 16: ["U155"],
    18: ["U400"], 21: ["U400"], 22: ["U50"] * 6, 23: ["U155", "U155", "U350"],
}

# (from, to, outage rate 1/yr, outage duration h, reactance pu, continuous rating MW)
LINES = [
    (1, 2, 0.24, 16, 0.0139, 175), (1, 3, 0.51, 10, 0.2112, 175), (1, 5, 0.33, 10, 0.0845, 175),
    (2, 4, 0.39, 10, 0.1267, 175), (2, 6, 0.48, 10, 0.1920, 175), (3, 9, 0.38, 10, 0.1190, 175),
    (3, 24, 0.02, 768, 0.0839, 400), (4, 9, 0.36, 10, 0.1037, 175), (5, 10, 0.34, 10, 0.0883, 175),
    (6, 10, 0.33, 35, 0.0605, 175), (7, 8, 0.30, 10, 0.0614, 175), (8, 9, 0.44, 10, 0.1651, 175),
    (8, 10, 0.44, 10, 0.1651, 175), (9, 11, 0.02, 768, 0.0839, 400), (9, 12, 0.02, 768, 0.0839, 400),
    (10, 11, 0.02, 768, 0.0839, 400), (10, 12, 0.02, 768, 0.0839, 400), (11, 13, 0.40, 11, 0.0476, 500),
    (11, 14, 0.39, 11, 0.0418, 500), (12, 13, 0.40, 11, 0.0476, 500), (12, 23, 0.52, 11, 0.0966, 500),
    (13, 23, 0.49, 11, 0.0865, 500), (14, 16, 0.38, 11, 0.0389, 500), (15, 16, 0.33, 11, 0.0173, 500),
    (15, 21, 0.41, 11, 0.0490, 500), (15, 21, 0.41, 11, 0.0490, 500), (15, 24, 0.41, 11, 0.0519, 500),
    (16, 17, 0.35, 11, 0.0259, 500), (16, 19, 0.34, 11, 0.0231, 500), (17, 18, 0.32, 11, 0.0144, 500),
    (17, 22, 0.54, 11, 0.1053, 500), (18, 21, 0.35, 11, 0.0259, 500), (18, 21, 0.35, 11, 0.0259, 500),
    (19, 20, 0.38, 11, 0.0396, 500), (19, 20, 0.38, 11, 0.0396, 500), (20, 23, 0.34, 11, 0.0216, 500),
    (20, 23, 0.34, 11, 0.0216, 500), (21, 22, 0.45, 11, 0.0678, 500),
]


def hourly_demand():
    out = []
    for week, wpk in enumerate(WEEKLY_PEAK, start=1):
        if week <= 8 or week >= 44:
            profile = WINTER
        elif 18 <= week <= 30:
            profile = SUMMER
        else:
            profile = SPRING_FALL
        for day, dpk in enumerate(DAILY_PEAK):
            weekend = day >= 5
            for hour in range(24):
                pct = profile[hour][1 if weekend else 0]
                out.append(PEAK_MW * wpk / 100.0 * dpk / 100.0 * pct / 100.0)
    return out


def main():
    ROOT.mkdir(parents=True, exist_ok=True)
    demand = hourly_demand()
    with open(ROOT / "rts_load.csv", "w") as f:
        f.write("demand_mw\n")
        for d in demand:
            f.write(f"{d:.6f}\n")

    total = float(sum(BUS_LOAD.values()))
    with open(ROOT / "rts24.net", "w") as f:
        f.write("# Single-area IEEE Reliability Test System (24 buses, 32 units, 38 branches).\n")
        f.write("# Generated by tools/data/make_rts_data.py; see data/rts/README.md.\n")
        f.write("schema_version,1\n")
        f.write("name,IEEE-RTS-24\n")
        f.write("demand_trace,rts_load.csv\n\n")
        f.write("[nodes]\nid,weight\n")
        for bus in sorted(BUS_LOAD):
            f.write(f"{bus},{BUS_LOAD[bus] / total:.10f}\n")
        f.write("\n[generators]\nnode,capacity_mw,availability\n")
        for bus in sorted(BUS_UNITS):
            for u in BUS_UNITS[bus]:
                cap, mttf, mttr = UNIT_TYPES[u]
                f.write(f"{bus},{cap},{mttf / (mttf + mttr):.12f}\n")
        f.write("\n[lines]\nfrom,to,reactance_pu,rating_mw,availability\n")
        for frm, to, rate, dur, x, rating in LINES:
            unavail = rate * dur / (8760.0 + rate * dur)
            f.write(f"{frm},{to},{x},{rating},{1.0 - unavail:.12f}\n")


if __name__ == "__main__":
    main()
