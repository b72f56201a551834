"""Command line interface: ``solve``, ``verify``, ``sweep`` and ``bench``.

Exit codes: 0 success, 2 infeasible scenario (or a solution failing
verification), 1 any other error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

import numpy as np

from . import harness
from .model import Infeasible, InvalidInput
from .serialize import load_scenario, load_solution, solution_to_dict

log = logging.getLogger("robust_swipt")

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2


def _report(rep, params):
    return {
        "ok": rep.ok,
        "n_errors": rep.n_errors,
        "worst_sinr_db": (10 * np.log10(np.maximum(rep.worst_sinr, 1e-300))).tolist(),
        "worst_eh_dbm": (10 * np.log10(np.maximum(rep.worst_eh, 1e-300))).tolist(),
        "gamma_db": (10 * np.log10(params.gamma)).tolist(),
        "psi_dbm": (10 * np.log10(params.psi)).tolist(),
    }


def _emit(obj, out):
    text = json.dumps(obj, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_solve(args):
    params, est = load_scenario(args.config)
    try:
        sol, _ = harness.run_design(args.alg, est, params, rho_mode=args.rho_mode)
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    rep = harness.verify_robust(sol, est, params, args.error_samples, args.seed)
    _emit({**solution_to_dict(sol), "verification": _report(rep, params)}, args.out)
    return EXIT_OK


def cmd_verify(args):
    params, est = load_scenario(args.config)
    sol = load_solution(args.solution)
    if sol.K != params.K:
        raise InvalidInput("solution and scenario have different K")
    rep = harness.verify_robust(sol, est, params, args.error_samples, args.seed)
    _emit(_report(rep, params), args.out)
    return EXIT_OK if rep.ok else EXIT_INFEASIBLE


def _sweep_config(args):
    overrides = dict(
        n_trials=args.trials,
        seed=args.seed,
        n_error_samples=args.error_samples,
        rho_mode=args.rho_mode,
        out=args.out,
        workers=args.workers,
        algorithms=tuple(args.alg.split(",")) if args.alg else None,
    )
    if args.fig is not None:
        return harness.figure_preset(args.fig, full=args.full, **overrides)
    if not args.config:
        raise InvalidInput("sweep needs --fig or --config")
    with open(args.config) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"config is not valid JSON: {exc}") from None
    return harness.with_overrides(harness.ExperimentConfig.from_dict(d), **overrides)


def cmd_sweep(args):
    cfg = _sweep_config(args)
    if not cfg.out:
        cfg = harness.with_overrides(cfg, out="results")
    done = [0]
    total = len(cfg.grid) * cfg.n_trials

    def progress(recs):
        done[0] += 1
        log.info("cell %d/%d (%s=%s, trial %d)", done[0], total, cfg.sweep, recs[0].value, recs[0].trial)

    records = harness.run_sweep(cfg, progress=progress)
    rows = harness.aggregate(records, cfg)
    for r in rows:
        print(
            f"{cfg.sweep}={r['value']:g} {r['algorithm']:>9}: feasible {r['feasibility_pct']:5.1f}% "
            f"verified {r['verify_pct']:5.1f}% power {r['mean_power_dbm']:.3f} dBm "
            f"time {r['mean_solve_seconds']:.3f} s"
        )
    return EXIT_OK


def cmd_bench(args):
    Ks = tuple(int(k) for k in args.Ks.split(","))
    algs = tuple(args.alg.split(",")) if args.alg else ("alg1", "alg2", "alg3", "nonrobust")
    times = harness.bench(Ks, args.N, args.trials, args.seed, algs)
    rows = []
    for a in algs:
        for K in Ks:
            ts = times[a][K]
            rows.append({"algorithm": a, "K": K, "N": args.N, "mean_seconds": float(np.mean(ts)),
                         "median_seconds": float(np.median(ts)), "n": len(ts)})
            print(f"K={K} {a:>9}: mean {np.mean(ts):.4f} s  median {np.median(ts):.4f} s")
    if args.out:
        os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
        with open(args.out, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="robust-swipt", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="design beamformers for one scenario")
    s.add_argument("--config", required=True, help="scenario JSON")
    s.add_argument("--alg", default="alg1", choices=["alg1", "alg2", "alg3", "nonrobust"])
    s.add_argument("--out", help="write solution JSON here instead of stdout")
    s.add_argument("--error-samples", type=int, default=100)
    s.add_argument("--seed", type=int, default=0, help="seed for sampled verification errors")
    s.add_argument("--rho-mode", choices=["reopt", "fixed"], default="reopt")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a solution against worst-case and sampled errors")
    v.add_argument("--config", required=True, help="scenario JSON")
    v.add_argument("--solution", required=True, help="solution JSON")
    v.add_argument("--out")
    v.add_argument("--error-samples", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("sweep", help="Monte Carlo sweep writing raw and aggregate CSVs")
    w.add_argument("--fig", type=int, choices=range(2, 8))
    w.add_argument("--config", help="experiment config JSON (ExperimentConfig fields)")
    w.add_argument("--alg", help="comma separated algorithms")
    w.add_argument("--trials", type=int)
    w.add_argument("--seed", type=int)
    w.add_argument("--out", help="output directory")
    w.add_argument("--error-samples", type=int)
    w.add_argument("--rho-mode", choices=["reopt", "fixed"])
    w.add_argument("--workers", type=int)
    w.add_argument("--full", action="store_true", help="large grids and 1000 trials per point")
    w.set_defaults(func=cmd_sweep)

    b = sub.add_parser("bench", help="execution time versus K")
    b.add_argument("--Ks", default="2,3,4")
    b.add_argument("--N", type=int, default=8)
    b.add_argument("--trials", type=int, default=10)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--alg", help="comma separated algorithms")
    b.add_argument("--out", help="CSV path")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (InvalidInput, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
