#!/usr/bin/env python3
"""Plot RMSE against the bounds and mean GOSPA from an ekphd output directory."""
import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("outdir", type=Path)
    ap.add_argument("--los", type=Path, help="output directory of a los-only run")
    args = ap.parse_args()

    rmse = pd.read_csv(args.outdir / "rmse.csv")
    agg = rmse[rmse.run == -1]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.semilogy(agg.step, agg.position, label="position RMSE (SLAM)")
    if args.los:
        los = pd.read_csv(args.los / "rmse.csv")
        los = los[los.run == -1]
        ax.semilogy(los.step, los.position, label="position RMSE (LOS only)")
    bounds_file = args.outdir / "bounds.csv"
    if bounds_file.exists():
        b = pd.read_csv(bounds_file)
        b = b[b.step > 0]
        ax.semilogy(b.step, b.peb_full_slam, "--", label="PEB")
        ax.semilogy(b.step, b.peb_known_map, ":", label="PEB w/ map")
    ax.set_xlabel("step")
    ax.set_ylabel("m")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.outdir / "position.png", dpi=150)

    gospa_file = args.outdir / "gospa.csv"
    if gospa_file.exists():
        g = pd.read_csv(gospa_file)
        g = g[g.run == -1]
        fig, ax = plt.subplots(figsize=(7, 4))
        for col in ["total", "localization", "missed", "false_alarm"]:
            ax.plot(g.step, g[col], label=col)
        ax.set_xlabel("step")
        ax.set_ylabel("mean GOSPA (m)")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.outdir / "gospa.png", dpi=150)


if __name__ == "__main__":
    main()
