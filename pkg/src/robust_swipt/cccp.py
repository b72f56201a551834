"""Concave-convex procedure for the rank-constrained robust design.

The rank-one requirement ``F_k = f_k f_k^H`` is written as ``f_k f_k^H >= F_k``
(together with ``Tr F_k >= ||f_k||^2`` implied at the optimum). The left side
is convex in ``f_k``, so it is replaced by its linearisation around the
current iterate ``f_k^i``::

    f^i f^H + f f^{iH} - f^i f^{iH} >= F_k

which is an inner approximation (the gap is ``(f - f^i)(f - f^i)^H >= 0``).
Each subproblem is therefore a restriction of the robust design and the
iterates stay feasible with non-increasing power.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from . import conic
from .model import Infeasible, Solution
from .recovery import polish_scaling
from .sdr import add_sdr_constraints, principal_component, unpack_sdr
from .socp import solve_socp
from .worst_case import coefficients

__all__ = [
    "CccpIterate",
    "CccpTrace",
    "cccp_initialize",
    "build_cccp_subproblem",
    "algorithm3",
    "linearized_gap",
    "DESCENT_SLACK",
]

DESCENT_SLACK = 1e-7
RHO_MODES = ("reopt", "fixed")


@dataclass
class CccpIterate:
    f: tuple
    objective: float
    status: str
    rank_ratio: float = 0.0
    solve_time: float = 0.0
    F: tuple | None = None
    rho: np.ndarray | None = None


@dataclass
class CccpTrace:
    """Objective history ``P(f^i)``; entry 0 is the initial point."""

    iterates: list = field(default_factory=list)
    converged: bool = False
    stop_reason: str = ""
    delta: float = 1e-4
    n_max: int = 20
    failure_status: str = ""

    @property
    def objectives(self):
        return np.array([it.objective for it in self.iterates])

    @property
    def n_iter(self):
        return max(len(self.iterates) - 1, 0)

    def is_monotone(self, slack=DESCENT_SLACK):
        obj = self.objectives
        return bool(np.all(np.diff(obj) <= slack * np.maximum(1.0, obj[:-1])))

    def rows(self):
        return [
            {
                "iteration": i,
                "objective": it.objective,
                "max_rank_ratio": it.rank_ratio,
                "solve_seconds": it.solve_time,
                "status": it.status,
            }
            for i, it in enumerate(self.iterates)
        ]

    def to_csv(self, path):
        rows = self.rows()
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]) if rows else ["iteration"])
            w.writeheader()
            w.writerows(rows)


def cccp_initialize(est, params, tol=None, backend=None):
    """Feasible starting point: SOCP directions scaled up for worst-case EH.

    The SOCP relaxation keeps the robust SINR constraint, which only gets
    easier under a common up-scaling, so a single factor fixing the worst-case
    harvested power gives a robust-feasible point.
    """
    out = solve_socp(est, params, tol, backend)
    rho = out.rho
    coeffs = coefficients(out.f, est, params)
    received = coeffs.u.sum(axis=1)
    if np.any(received <= 0):
        raise Infeasible("init_failure", "worst-case received power is zero")
    need = params.psi / (params.xi * (1.0 - rho)) - params.sigma2
    phi = max(1.0, float(np.max(need / received)))
    phis = np.full(params.K, phi)
    try:
        phis, rho = polish_scaling(phis, rho, coeffs, params)
    except Infeasible:
        raise Infeasible("init_failure", "scaled SOCP point is not robust feasible") from None
    sol = Solution(out.f, np.ones(params.K)).scaled(phis, rho)
    return Solution(sol.f, sol.rho, meta={"phi": float(phis.max()), "socp_objective": out.objective})


def _outer(f_expr, g):
    """``f g^H`` for a vector expression ``f`` and constant ``g``."""
    n = g.size
    return f_expr.reshape(n, 1) @ np.conj(g).reshape(1, n)


def build_cccp_subproblem(f_prev, est, params, rho=None):
    """Convex restriction around ``f_prev``; objective is ``t >= ||f||``.

    With ``rho`` given the PS ratios are frozen at those values instead of
    being re-optimised.
    """
    est.check(params)
    K, N = params.K, params.N
    prog = conic.ConeProgram("cccp_subproblem")
    v = add_sdr_constraints(prog, est, params)
    f = [prog.complex_vector(f"f{k}", N[k]) for k in range(K)]
    t = prog.variable("t", ())
    for k in range(K):
        fi = np.asarray(f_prev[k], dtype=complex)
        lin = _outer(f[k], fi) + _outer(f[k], fi).H - np.outer(fi, fi.conj())
        prog.lmi(lin - v["F"][k], tag="linearized")
    prog.soc(t, conic.concat(*f), tag="power")
    if rho is not None:
        rho = np.asarray(rho, dtype=float)
        prog.zero(conic.concat(v["alpha"] - 1.0 / rho, v["beta"] - 1.0 / (1.0 - rho)), tag="fixed_rho")
    prog.minimize(t)
    return prog


def linearized_gap(f, F):
    """Smallest eigenvalue of ``f f^H - F`` (nonnegative for subproblem points)."""
    f = np.asarray(f, dtype=complex)
    M = np.outer(f, f.conj()) - np.asarray(F)
    return float(np.linalg.eigvalsh(0.5 * (M + M.conj().T))[0])


def _finalize(F, rho, est, params):
    f = [principal_component(Fk)[0] for Fk in F]
    coeffs = coefficients(f, est, params)
    phi, rho = polish_scaling(np.ones(params.K), rho, coeffs, params)
    return Solution(f, np.ones(params.K)).scaled(phi, rho)


def algorithm3(est, params, delta=1e-4, n_max=20, rho_mode="reopt", tol=None, backend=None, init=None):
    """CCCP-based robust design; returns ``(Solution, CccpTrace)``.

    Stops when consecutive objectives differ by less than ``delta`` or after
    ``n_max`` subproblems. The returned beamformers are the principal
    components of the last ``F_k`` (equal to ``f_k`` up to the rank-one
    residual), rescaled if needed to absorb solver round-off.
    """
    if delta <= 0 or n_max < 1:
        raise ValueError("delta must be positive and n_max at least 1")
    if rho_mode not in RHO_MODES:
        raise ValueError(f"rho_mode must be one of {RHO_MODES}")
    t0 = time.perf_counter()
    start = init if init is not None else cccp_initialize(est, params, tol, backend)
    trace = CccpTrace(delta=delta, n_max=n_max)
    trace.iterates.append(CccpIterate(start.f, start.objective, "init", rho=start.rho))
    f_cur, rho_cur = start.f, start.rho
    last = None
    for _ in range(n_max):
        prog = build_cccp_subproblem(f_cur, est, params, rho_cur if rho_mode == "fixed" else None)
        res = conic.solve(prog, tol, backend)
        if not res.optimal:
            trace.stop_reason = "failure"
            trace.failure_status = res.status
            break
        out = unpack_sdr(res, prog, params)
        f_new = tuple(np.asarray(res.primal[f"f{k}"]) for k in range(params.K))
        obj = float(res.primal["t"]) ** 2
        rho_new = np.clip(1.0 / out.alpha, 0.0, 1.0)
        prev_obj = trace.iterates[-1].objective
        trace.iterates.append(
            CccpIterate(f_new, obj, res.status, float(out.rank_ratio.max()), res.solve_time, out.F, rho_new)
        )
        last = out
        f_cur, rho_cur = f_new, rho_new
        if abs(prev_obj - obj) < delta:
            trace.stop_reason = "delta"
            trace.converged = True
            break
    else:
        trace.stop_reason = "max_iter"
    if last is None:
        sol = start
    else:
        sol = _finalize(last.F, 1.0 / last.alpha, est, params)
    meta = {
        "algorithm": "alg3",
        "cccp_iters": trace.n_iter,
        "stop_reason": trace.stop_reason,
        "rho_mode": rho_mode,
        "monotone": trace.is_monotone(),
        "final_rank_ratio": float(last.rank_ratio.max()) if last is not None else 0.0,
        "solve_seconds": time.perf_counter() - t0,
    }
    return Solution(sol.f, sol.rho, meta=meta), trace
