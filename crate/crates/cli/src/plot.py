"""Plots whatever fso-acq CSVs are present in this directory.

Usage: python plot.py [DIR]   (needs matplotlib)
"""
import csv
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def curves(data, group, x, y):
    out = defaultdict(lambda: ([], []))
    for r in data:
        xs, ys = out[r[group]]
        xs.append(float(r[x]))
        ys.append(float(r[y]))
    return out


def line_plot(data, group, x, y, xlabel, ylabel, name, logy=False):
    fig, ax = plt.subplots()
    for key, (xs, ys) in curves(data, group, x, y).items():
        ax.plot(xs, ys, label=f"{group}={key}")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if logy:
        ax.set_yscale("log")
    ax.legend()
    fig.savefig(name, dpi=150, bbox_inches="tight")
    print("wrote", name)


def main():
    d = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent
    if (d / "sweep_alpha.csv").exists():
        line_plot(rows(d / "sweep_alpha.csv"), "n0", "alpha", "expected_time_s",
                  "alpha", "E[T] (s)", d / "sweep_alpha.png", logy=True)
    if (d / "sweep_n0.csv").exists():
        line_plot(rows(d / "sweep_n0.csv"), "alpha", "n0", "expected_time_s",
                  "N0", "E[T] (s)", d / "sweep_n0.png", logy=True)
    if (d / "cdf.csv").exists():
        data = rows(d / "cdf.csv")
        for r in data:
            r["curve"] = f"{r['n0']}@{float(r['t_s']):g}s"
        line_plot(data, "curve", "alpha", "cdf", "alpha", "P(T <= t)", d / "cdf.png")
    if (d / "simulate_cdf.csv").exists():
        line_plot(rows(d / "simulate_cdf.csv"), "alpha", "t_s", "cdf",
                  "t (s)", "empirical P(T <= t)", d / "simulate_cdf.png")
    if (d / "validate.csv").exists():
        data = [r for r in rows(d / "validate.csv") if r["quantity"] == "cdf"]
        if data:
            line_plot(data, "alpha", "t_s", "z", "t (s)", "z", d / "validate_z.png")


if __name__ == "__main__":
    main()
