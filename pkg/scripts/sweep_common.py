"""Shared driver for the figure scripts: run a preset sweep, write CSVs, plot."""

from __future__ import annotations

import argparse
import logging
import os

from robust_swipt import harness

LABELS = {"alg1": "SDR (Alg. 1)", "alg2": "SOCP (Alg. 2)", "alg3": "CCCP (Alg. 3)",
          "nonrobust": "non-robust", "sdr_bound": "SDR bound"}
XLABELS = {"eta": "error radius eta", "gamma_db": "SINR target (dB)", "psi_dbm": "EH target (dBm)", "K": "users K"}


def parse_args(description):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--trials", type=int, help="trials per grid point (default: preset)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="results")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--full", action="store_true", help="1000 trials per point")
    p.add_argument("--no-plot", action="store_true")
    return p.parse_args()


def run(fig, metric, ylabel, description):
    args = parse_args(description)
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    cfg = harness.figure_preset(fig, full=args.full, n_trials=args.trials, seed=args.seed,
                                out=args.out, workers=args.workers)
    records = harness.run_sweep(cfg, progress=lambda recs: logging.info(
        "%s=%s trial %d done", cfg.sweep, recs[0].value, recs[0].trial))
    rows = harness.aggregate(records, cfg)
    print(f"{cfg.sweep:>9} {'algorithm':>10} {metric:>20}")
    for r in rows:
        print(f"{r['value']:>9g} {r['algorithm']:>10} {r[metric]:>20.4f}")
    if not args.no_plot:
        plot(rows, cfg, metric, ylabel, os.path.join(args.out, f"fig{fig}.png"))
    return rows


def plot(rows, cfg, metric, ylabel, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.6))
    for alg in cfg.algorithms:
        pts = [(r["value"], r[metric]) for r in rows if r["algorithm"] == alg]
        ax.plot(*zip(*pts), marker="o", label=LABELS.get(alg, alg))
    ax.set_xlabel(XLABELS.get(cfg.sweep, cfg.sweep))
    ax.set_ylabel(ylabel)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    print(f"wrote {path}")
