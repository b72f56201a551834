"""Verification, the non-robust baseline and the Monte Carlo experiment runner.

Raw CSV columns (schema version ``RAW_SCHEMA``), one row per
(grid point, trial, algorithm):

``schema``, ``sweep``, ``grid_index``, ``value``, ``trial``, ``algorithm``,
``feasible`` (design returned a point), ``status``, ``objective_mw``,
``objective_dbm``, ``worst_sinr_db`` (min over users and verification errors),
``worst_eh_dbm``, ``verify_ok``, ``rank_one``, ``cccp_iters``,
``solve_seconds`` (wall clock, excluded from determinism checks).

Aggregate CSV columns, one row per (grid point, algorithm): ``sweep``,
``value``, ``algorithm``, ``n_trials``, ``feasibility_pct``,
``verify_pct`` (share of all trials whose design passed verification),
``mean_power_mw`` (over trials where every robust algorithm is feasible),
``mean_power_dbm``, ``n_common``, ``mean_worst_sinr_db``, ``mean_worst_eh_dbm``
(means of linear values over the algorithm's feasible trials),
``mean_solve_seconds``.
"""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from .cccp import algorithm3
from .model import (
    Infeasible,
    InvalidInput,
    SystemParams,
    all_harvested,
    all_sinr,
    generate_channels,
    mw_to_dbm,
    sample_error,
)
from .sdr import algorithm1, solve_sdr
from .socp import algorithm2
from .worst_case import coefficients

__all__ = [
    "VerifyReport",
    "verify_robust",
    "nonrobust_baseline",
    "ExperimentConfig",
    "TrialRecord",
    "run_design",
    "run_trial",
    "run_sweep",
    "aggregate",
    "write_raw_csv",
    "write_aggregate_csv",
    "figure_preset",
    "bench",
    "ALGORITHMS",
    "ROBUST",
    "RAW_SCHEMA",
    "RAW_COLUMNS",
    "TIMING_COLUMNS",
    "VERIFY_TOL",
    "config_dict",
    "with_overrides",
    "channel_rng",
]

VERIFY_TOL = 1e-6
ALGORITHMS = ("alg1", "alg2", "alg3", "nonrobust", "sdr_bound")
ROBUST = ("alg1", "alg2", "alg3")
RAW_SCHEMA = 1
RAW_COLUMNS = [
    "schema", "sweep", "grid_index", "value", "trial", "algorithm", "feasible", "status",
    "objective_mw", "objective_dbm", "worst_sinr_db", "worst_eh_dbm", "verify_ok",
    "rank_one", "cccp_iters", "solve_seconds",
]
TIMING_COLUMNS = ("solve_seconds",)
AGG_COLUMNS = [
    "sweep", "value", "algorithm", "n_trials", "feasibility_pct", "verify_pct",
    "mean_power_mw", "mean_power_dbm", "n_common", "mean_worst_sinr_db",
    "mean_worst_eh_dbm", "mean_solve_seconds",
]


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    worst_sinr: np.ndarray
    worst_eh: np.ndarray
    n_errors: int = 0


def verify_robust(sol, est, params, n_samples=100, seed=0):
    """Check SINR and EH targets at the worst-case and sampled errors.

    The error sets are the closed-form SINR-minimising errors, the EH
    minimising errors and ``n_samples`` uniform draws from the balls.
    """
    coeffs = coefficients(sol.f, est, params)
    errors = [coeffs.sinr_errors(), coeffs.eh_errors()]
    rng = np.random.default_rng(seed)
    errors += [sample_error(rng, est) for _ in range(int(n_samples))]
    worst_sinr = np.full(params.K, np.inf)
    worst_eh = np.full(params.K, np.inf)
    for err in errors:
        worst_sinr = np.minimum(worst_sinr, all_sinr(sol, est, err, params))
        worst_eh = np.minimum(worst_eh, all_harvested(sol, est, err, params))
    ok = bool(
        np.all(worst_sinr >= params.gamma * (1 - VERIFY_TOL)) and np.all(worst_eh >= params.psi * (1 - VERIFY_TOL))
    )
    return VerifyReport(ok, worst_sinr, worst_eh, len(errors))


def nonrobust_baseline(est, params, **kwargs):
    """Perfect-CSI design: the SDR algorithm with every error radius set to 0."""
    zero = np.zeros((params.K, params.K))
    sol = algorithm1(est.with_eta(zero), params.with_eta(zero), **kwargs)
    sol.meta["algorithm"] = "nonrobust"
    return sol


@dataclass(frozen=True)
class ExperimentConfig:
    """Scenario defaults plus one swept variable."""

    K: int = 3
    N: int = 4
    gamma_db: float = 10.0
    psi_dbm: float = 5.0
    xi: float = 1.0
    sigma2_dbm: float = -30.0
    omega2_dbm: float = -20.0
    eta: float = 0.1
    sweep: str = "gamma_db"
    grid: tuple = (10.0,)
    n_trials: int = 50
    n_error_samples: int = 100
    seed: int = 0
    algorithms: tuple = ("alg1", "alg2", "alg3", "nonrobust")
    rho_mode: str = "reopt"
    out: str = ""
    workers: int = 1
    name: str = ""

    SWEEPS = ("eta", "gamma_db", "psi_dbm", "K", "N")

    def __post_init__(self):
        if self.sweep not in self.SWEEPS:
            raise InvalidInput(f"sweep must be one of {self.SWEEPS}")
        if len(self.grid) == 0:
            raise InvalidInput("sweep grid is empty")
        if self.n_trials < 1:
            raise InvalidInput("n_trials must be at least 1")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise InvalidInput(f"unknown algorithms {sorted(unknown)}")
        object.__setattr__(self, "grid", tuple(self.grid))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))

    def scenario(self, value=None):
        cfg = {
            "K": self.K, "N": self.N, "gamma_db": self.gamma_db, "psi_dbm": self.psi_dbm, "xi": self.xi,
            "sigma2_dbm": self.sigma2_dbm, "omega2_dbm": self.omega2_dbm, "eta": self.eta,
        }
        if value is not None:
            cfg[self.sweep] = int(value) if self.sweep in ("K", "N") else float(value)
        return cfg

    def params(self, value=None):
        return SystemParams.from_config(self.scenario(value))

    @classmethod
    def from_dict(cls, d):
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise InvalidInput(f"unknown config fields {sorted(extra)}")
        return cls(**d)


@dataclass
class TrialRecord:
    """Outcome of one algorithm on one (grid point, trial) cell."""

    sweep: str
    grid_index: int
    value: float
    trial: int
    algorithm: str
    feasible: bool
    status: str = "ok"
    objective_mw: float = math.nan
    worst_sinr: float = math.nan
    worst_eh: float = math.nan
    verify_ok: bool = False
    rank_one: bool = False
    cccp_iters: int = 0
    solve_seconds: float = 0.0

    def row(self):
        def dbm(x):
            return mw_to_dbm(x) if np.isfinite(x) and x > 0 else math.nan

        return {
            "schema": RAW_SCHEMA,
            "sweep": self.sweep,
            "grid_index": self.grid_index,
            "value": repr(float(self.value)),
            "trial": self.trial,
            "algorithm": self.algorithm,
            "feasible": int(self.feasible),
            "status": self.status,
            "objective_mw": _fmt(self.objective_mw),
            "objective_dbm": _fmt(dbm(self.objective_mw)),
            "worst_sinr_db": _fmt(dbm(self.worst_sinr)),
            "worst_eh_dbm": _fmt(dbm(self.worst_eh)),
            "verify_ok": int(self.verify_ok),
            "rank_one": int(self.rank_one),
            "cccp_iters": self.cccp_iters,
            "solve_seconds": f"{self.solve_seconds:.6f}",
        }


def _fmt(x):
    return "" if not np.isfinite(x) else f"{x:.10g}"


def run_design(name, est, params, rho_mode="reopt"):
    """Run one robust design (or the baseline); returns ``(Solution, extra)``."""
    if name == "alg1":
        sol = algorithm1(est, params)
        return sol, {"rank_one": sol.meta["rank_one"]}
    if name == "alg2":
        return algorithm2(est, params), {}
    if name == "alg3":
        sol, trace = algorithm3(est, params, rho_mode=rho_mode)
        return sol, {"cccp_iters": trace.n_iter}
    if name == "nonrobust":
        sol = nonrobust_baseline(est, params)
        return sol, {"rank_one": sol.meta["rank_one"]}
    raise InvalidInput(f"unknown algorithm {name!r}")


def channel_rng(master, trial, grid_index=None):
    """Channel draws shared across the grid unless the grid changes dimensions."""
    key = [int(master), int(trial)] if grid_index is None else [int(master), int(trial), int(grid_index)]
    return np.random.default_rng(np.random.SeedSequence(key))


def run_trial(cfg, grid_index, trial):
    """All requested algorithms on one (grid point, trial) cell."""
    value = cfg.grid[grid_index]
    params = cfg.params(value)
    dims_vary = cfg.sweep in ("K", "N")
    est = generate_channels(channel_rng(cfg.seed, trial, grid_index if dims_vary else None), params)
    verify_seed = np.random.SeedSequence([int(cfg.seed), int(trial), int(grid_index), 1])
    records = []
    sdr_cache = None
    for name in cfg.algorithms:
        rec = TrialRecord(cfg.sweep, grid_index, float(value), trial, name, feasible=False)
        t0 = time.perf_counter()
        try:
            if name == "sdr_bound":
                out = solve_sdr(est, params) if sdr_cache is None else sdr_cache
                rec.objective_mw = out if isinstance(out, float) else out.objective
                rec.feasible = True
            else:
                sol, extra = run_design(name, est, params, cfg.rho_mode)
                if name == "alg1":
                    sdr_cache = float(sol.meta["sdr_objective"])
                rec.feasible = True
                rec.objective_mw = sol.objective
                rec.rank_one = bool(extra.get("rank_one", False))
                rec.cccp_iters = int(extra.get("cccp_iters", 0))
                rep = verify_robust(sol, est, params, cfg.n_error_samples, verify_seed)
                rec.verify_ok = rep.ok
                rec.worst_sinr = float(rep.worst_sinr.min())
                rec.worst_eh = float(rep.worst_eh.min())
        except Infeasible as exc:
            rec.status = exc.status
        rec.solve_seconds = time.perf_counter() - t0
        records.append(rec)
    return records


def _cell(args):
    cfg, g, t = args
    return run_trial(cfg, g, t)


def run_sweep(cfg, progress=None):
    """Run every (grid point, trial) cell; returns records ordered by grid, trial."""
    cells = [(cfg, g, t) for g in range(len(cfg.grid)) for t in range(cfg.n_trials)]
    records = []
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for recs in pool.map(_cell, cells, chunksize=1):
                records.extend(recs)
                if progress:
                    progress(recs)
    else:
        for c in cells:
            recs = _cell(c)
            records.extend(recs)
            if progress:
                progress(recs)
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        stem = cfg.name or f"sweep_{cfg.sweep}"
        write_raw_csv(records, os.path.join(cfg.out, f"{stem}_raw.csv"))
        write_aggregate_csv(aggregate(records, cfg), os.path.join(cfg.out, f"{stem}_aggregate.csv"))
    return records


def _mean(xs):
    xs = [x for x in xs if np.isfinite(x)]
    return float(np.mean(xs)) if xs else math.nan


def aggregate(records, cfg):
    """Per (grid point, algorithm) summary rows in grid order."""
    robust = [a for a in cfg.algorithms if a in ROBUST]
    rows = []
    for g, value in enumerate(cfg.grid):
        cell = [r for r in records if r.grid_index == g]
        by_trial = {}
        for r in cell:
            by_trial.setdefault(r.trial, {})[r.algorithm] = r
        common = [t for t, d in by_trial.items() if all(d[a].feasible for a in (robust or cfg.algorithms) if a in d)]
        for alg in cfg.algorithms:
            mine = [r for r in cell if r.algorithm == alg]
            feas = [r for r in mine if r.feasible]
            powers = [by_trial[t][alg].objective_mw for t in common if by_trial[t][alg].feasible]
            mp = _mean(powers)
            ms = _mean([r.worst_sinr for r in feas])
            me = _mean([r.worst_eh for r in feas])
            rows.append({
                "sweep": cfg.sweep,
                "value": float(value),
                "algorithm": alg,
                "n_trials": len(mine),
                "feasibility_pct": 100.0 * len(feas) / max(len(mine), 1),
                "verify_pct": 100.0 * sum(r.verify_ok for r in mine) / max(len(mine), 1),
                "mean_power_mw": mp,
                "mean_power_dbm": mw_to_dbm(mp) if np.isfinite(mp) and mp > 0 else math.nan,
                "n_common": len(powers),
                "mean_worst_sinr_db": mw_to_dbm(ms) if np.isfinite(ms) and ms > 0 else math.nan,
                "mean_worst_eh_dbm": mw_to_dbm(me) if np.isfinite(me) and me > 0 else math.nan,
                "mean_solve_seconds": _mean([r.solve_seconds for r in mine]),
                "mean_worst_sinr": ms,
                "mean_worst_eh": me,
            })
    return rows


def write_raw_csv(records, path):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=RAW_COLUMNS)
        w.writeheader()
        for r in records:
            w.writerow(r.row())


def write_aggregate_csv(rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=AGG_COLUMNS, extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow({k: (_fmt(v) if isinstance(v, float) else v) for k, v in r.items()})


GAMMA_GRID = tuple(float(g) for g in range(4, 17, 2))
# error radii for the feasibility-vs-eta sweep
ETA_GRID = tuple(round(0.02 * i, 2) for i in range(1, 8))
PSI_GRID = tuple(float(p) for p in range(0, 11, 2))


def figure_preset(fig, full=False, **overrides):
    """Desk-scale configuration for one of the figures 2-7."""
    fig = int(fig)
    robust_and_baseline = ("alg1", "alg2", "alg3", "nonrobust")
    presets = {
        2: dict(sweep="eta", grid=ETA_GRID, algorithms=robust_and_baseline + ("sdr_bound",)),
        3: dict(sweep="gamma_db", grid=GAMMA_GRID, algorithms=robust_and_baseline + ("sdr_bound",)),
        4: dict(sweep="gamma_db", grid=GAMMA_GRID, algorithms=robust_and_baseline + ("sdr_bound",)),
        5: dict(sweep="gamma_db", grid=GAMMA_GRID, algorithms=robust_and_baseline),
        6: dict(sweep="psi_dbm", grid=PSI_GRID, algorithms=robust_and_baseline + ("sdr_bound",)),
        7: dict(sweep="K", grid=(2, 3, 4, 5, 6) if full else (2, 3, 4), N=18 if full else 8,
                n_trials=20 if full else 10, n_error_samples=0, algorithms=robust_and_baseline),
    }
    if fig not in presets:
        raise InvalidInput("figure presets exist for 2..7")
    kw = dict(n_trials=1000 if full else 50, name=f"fig{fig}")
    kw.update(presets[fig])
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**kw)


def bench(Ks=(2, 3, 4), N=8, n_trials=10, seed=0, algorithms=("alg1", "alg2", "alg3", "nonrobust")):
    """Wall-clock time per algorithm and K; returns ``{alg: {K: [seconds]}}``."""
    cfg = ExperimentConfig(sweep="K", grid=tuple(Ks), N=N, n_trials=n_trials, seed=seed,
                           n_error_samples=0, algorithms=tuple(algorithms))
    times = {a: {int(K): [] for K in Ks} for a in algorithms}
    for g, K in enumerate(Ks):
        params = cfg.params(K)
        for t in range(n_trials):
            est = generate_channels(channel_rng(seed, t, g), params)
            for a in algorithms:
                t0 = time.perf_counter()
                try:
                    run_design(a, est, params)
                except Infeasible:
                    pass
                times[a][int(K)].append(time.perf_counter() - t0)
    return times


def config_dict(cfg):
    d = asdict(cfg)
    d["grid"] = list(d["grid"])
    d["algorithms"] = list(d["algorithms"])
    return d


def with_overrides(cfg, **kw):
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})

