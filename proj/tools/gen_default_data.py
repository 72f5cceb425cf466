#!/usr/bin/env python3
"""Regenerate the shipped default data files under data/.

OCV tables for the single-particle model, the ECM OCV table derived from the
SPM equilibrium curve, and a synthetic hourly desk price file.
"""
import argparse
import datetime as dt
import pathlib

import numpy as np
from scipy.optimize import brentq


def ocv_pos(y):
    return (-0.8090 * y + 4.4875 - 0.0428 * np.tanh(18.5138 * (y - 0.5542))
            - 17.7326 * np.tanh(15.7890 * (y - 0.3117))
            + 17.5842 * np.tanh(15.9308 * (y - 0.3120)))


def ocv_neg(x):
    return (1.9793 * np.exp(-39.3631 * x) + 0.2482
            - 0.0909 * np.tanh(29.8538 * (x - 0.1234))
            - 0.04478 * np.tanh(14.9159 * (x - 0.2769))
            - 0.0205 * np.tanh(30.4444 * (x - 0.6103)))


Q_POS_AH = 4.35
Q_NEG_AH = 3.5
LITHIUM_AH = 4.04


def stoich_window():
    def cell_v(y):
        x = (LITHIUM_AH - y * Q_POS_AH) / Q_NEG_AH
        return ocv_pos(y) - ocv_neg(x)
    lo = max(0.0, (LITHIUM_AH - Q_NEG_AH) / Q_POS_AH) + 1e-9
    hi = min(1.0, LITHIUM_AH / Q_POS_AH) - 1e-9
    y100 = brentq(lambda y: cell_v(y) - 4.2, lo, hi)
    y0 = brentq(lambda y: cell_v(y) - 2.7, lo, hi)
    return y100, y0


def write_table(path, header, xs, ys):
    with open(path, "w") as f:
        f.write(header + "\n")
        for x, y in zip(xs, ys):
            f.write(f"{x:.6f},{y:.9f}\n")


def price_profile(n_days, seed):
    rng = np.random.default_rng(seed)
    hours = np.arange(24)
    morning = np.exp(-0.5 * ((hours - 8.5) / 1.5) ** 2)
    evening = np.exp(-0.5 * ((hours - 19.0) / 2.0) ** 2)
    night = np.exp(-0.5 * ((hours - 3.5) / 2.5) ** 2)
    prices = []
    for d in range(n_days):
        weekend = (d % 7) in (5, 6)
        base = 38.0 if weekend else 46.0
        day = (base + (14.0 if weekend else 24.0) * morning
               + (20.0 if weekend else 30.0) * evening - 16.0 * night)
        day = day + rng.normal(0.0, 3.0, 24) + rng.normal(0.0, 4.0)
        if weekend and d % 7 == 6:
            day[3] = -4.5
        prices.extend(np.round(day, 2))
    return prices


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("--days", type=int, default=21)
    ap.add_argument("--seed", type=int, default=2014)
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    (out / "params").mkdir(parents=True, exist_ok=True)
    (out / "prices").mkdir(parents=True, exist_ok=True)

    s = np.linspace(0.0, 1.0, 401)
    write_table(out / "params" / "ocv_pos.csv", "stoichiometry,ocv_v", s, ocv_pos(s))
    write_table(out / "params" / "ocv_neg.csv", "stoichiometry,ocv_v", s, ocv_neg(s))

    y100, y0 = stoich_window()
    z = np.linspace(0.0, 1.0, 101)
    y = y0 + z * (y100 - y0)
    x = (LITHIUM_AH - y * Q_POS_AH) / Q_NEG_AH
    write_table(out / "params" / "ecm_ocv.csv", "soc,ocv_v", z, ocv_pos(y) - ocv_neg(x))

    start = dt.datetime(2014, 3, 3)
    with open(out / "prices" / "desk_prices.csv", "w") as f:
        f.write("timestamp,price_eur_mwh\n")
        for i, p in enumerate(price_profile(args.days, args.seed)):
            t = start + dt.timedelta(hours=i)
            f.write(f"{t.strftime('%Y-%m-%dT%H:%M:%SZ')},{p:.2f}\n")
    print(f"window y100={y100:.4f} y0={y0:.4f} capacity={(y0 - y100) * Q_POS_AH:.4f} Ah")


if __name__ == "__main__":
    main()
