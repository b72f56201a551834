"""S-procedure SDP relaxation of the robust design and the SDR-based algorithm.

Every worst-case quadratic constraint over a ball ``||e|| <= eta`` becomes one
Hermitian LMI of size ``N + 1``. With ``A = [I, h]`` the quadratic form
``(h + e)^H F (h + e)`` equals ``[e; 1]^H (A^H F A) [e; 1]``, so each LMI is
``A^H (+-F) A`` plus a diagonal block holding the multiplier and the scalar
terms.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import conic
from .model import Infeasible, Solution
from .recovery import polish_scaling, rank_one_recovery_socp
from .worst_case import coefficients

__all__ = [
    "SdrOutput",
    "build_robust_sdp",
    "solve_sdr",
    "principal_component",
    "algorithm1",
    "add_sdr_constraints",
    "ALPHA_CAP",
]

ALPHA_CAP = 1e6


@dataclass(frozen=True, eq=False)
class SdrOutput:
    """Optimal point of the SDP relaxation.

    ``p[k, j]`` / ``q[k, j]`` (j != k) bound the worst-case interference and
    worst-case harvested power from link j -> k; diagonals are zero.
    """

    F: tuple
    alpha: np.ndarray
    beta: np.ndarray
    p: np.ndarray
    q: np.ndarray
    lam: np.ndarray
    mu: np.ndarray
    objective: float
    rank_ratio: np.ndarray
    solve_time: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def rho(self):
        return 1.0 / self.alpha


def _lift(hhat):
    """``[I, h]`` so that ``A^H F A = [[F, F h], [h^H F, h^H F h]]``."""
    n = hhat.size
    return np.hstack([np.eye(n), hhat.reshape(n, 1)])


def _lmi(prog, F, hhat, sign, lam, scalar, eta, tag):
    n = hhat.size
    if eta == 0:
        # zero-radius ball: the robust constraint is the nominal scalar one
        prog.zero(lam.reshape(1), tag=f"{tag}_multiplier")
        quad = F.congruence(hhat.reshape(n, 1)).real.reshape(1)
        return prog.nonneg(quad * sign + scalar.reshape(1), tag=tag)
    corner = scalar - lam * eta**2
    D = conic.bmat([[lam.times(np.eye(n)), np.zeros((n, 1))], [np.zeros((1, n)), corner.reshape(1, 1)]])
    return prog.lmi(F.congruence(_lift(hhat)) * sign + D, tag=tag)


def add_sdr_constraints(prog, est, params):
    """Add the relaxed robust constraints to ``prog``; return the variable dict.

    Shared by the SDP relaxation and the per-iteration CCCP subproblem.
    """
    K = params.K
    N = params.N
    F = [prog.hermitian(f"F{k}", N[k]) for k in range(K)]
    alpha = prog.variable("alpha", (K,))
    beta = prog.variable("beta", (K,))
    s = prog.variable("s", (K,))
    t = prog.variable("t_inv", (K,))
    lam = prog.variable("lam", (K, K))
    mu = prog.variable("mu", (K, K))
    pairs = [(k, j) for k in range(K) for j in range(K) if j != k]
    p = prog.variable("p", (len(pairs),)) if pairs else None
    q = prog.variable("q", (len(pairs),)) if pairs else None
    index = {kj: i for i, kj in enumerate(pairs)}
    eta = est.eta
    for k in range(K):
        h = est.hhat[k]
        p_sum = sum((p[index[k, j]] for j in range(K) if j != k), start=conic.Expr.constant(0.0))
        q_sum = sum((q[index[k, j]] for j in range(K) if j != k), start=conic.Expr.constant(0.0))
        g = params.gamma[k]
        # worst-case desired signal over the interference-plus-noise budget
        _lmi(prog, F[k] / g, h[k], 1.0, lam[k, k],
             -p_sum - params.sigma2[k] - params.omega2[k] * alpha[k], eta[k, k], "U")
        # worst-case received power covers the EH requirement
        _lmi(prog, F[k], h[k], 1.0, mu[k, k],
             q_sum - (params.psi[k] / params.xi[k]) * beta[k] + params.sigma2[k], eta[k, k], "X")
        for j in range(K):
            if j == k:
                continue
            i = index[k, j]
            _lmi(prog, F[j], h[j], -1.0, lam[k, j], p[i], eta[k, j], "V")
            _lmi(prog, F[j], h[j], 1.0, mu[k, j], -q[i], eta[k, j], "Y")
    for k in range(K):
        prog.lmi(F[k], tag="F")
    for k in range(K):
        prog.hyperbolic(s[k], alpha[k], 1.0, tag="inv_alpha")
        prog.hyperbolic(t[k], beta[k], 1.0, tag="inv_beta")
    prog.nonneg(1.0 - s - t, tag="split")
    prog.nonneg(conic.concat(alpha - 1.0, beta - 1.0, ALPHA_CAP - alpha, ALPHA_CAP - beta), tag="alpha_box")
    nonneg = [s, t, lam, mu] + ([p, q] if pairs else [])
    prog.nonneg(conic.concat(*nonneg), tag="sign")
    return {"F": F, "alpha": alpha, "beta": beta, "lam": lam, "mu": mu, "p": p, "q": q, "pairs": pairs}


def build_robust_sdp(est, params):
    """SDP relaxation minimising ``sum_k Tr F_k`` under the robust LMIs."""
    est.check(params)
    prog = conic.ConeProgram("robust_sdp")
    v = add_sdr_constraints(prog, est, params)
    prog.minimize(sum((F.trace() for F in v["F"]), start=conic.Expr.constant(0.0)).real)
    return prog


def principal_component(F):
    """Scaled principal eigenvector ``sqrt(l1) v1`` and ratio ``l2 / l1``."""
    F = np.asarray(F, dtype=complex)
    F = 0.5 * (F + F.conj().T)
    w, V = np.linalg.eigh(F)
    w = np.clip(w, 0.0, None)
    l1 = w[-1]
    if l1 <= 0:
        return np.zeros(F.shape[0], complex), 0.0
    ratio = float(w[-2] / l1) if w.size > 1 else 0.0
    return np.sqrt(l1) * V[:, -1], ratio


def _pair_matrix(values, pairs, K):
    M = np.zeros((K, K))
    for i, (k, j) in enumerate(pairs):
        M[k, j] = values[i]
    return M


def unpack_sdr(res, prog, params):
    """Turn a solved program carrying the SDR variables into an SdrOutput."""
    K = params.K
    x = res.x
    v = prog.variables
    F = []
    ratios = []
    for k in range(K):
        Fk = v[f"F{k}"].value(x)
        Fk = 0.5 * (Fk + Fk.conj().T)
        w, V = np.linalg.eigh(Fk)
        Fk = (V * np.clip(w, 0.0, None)) @ V.conj().T
        F.append(Fk)
        ratios.append(principal_component(Fk)[1])
    pairs = [(k, j) for k in range(K) for j in range(K) if j != k]
    p = _pair_matrix(v["p"].value(x), pairs, K) if pairs else np.zeros((K, K))
    q = _pair_matrix(v["q"].value(x), pairs, K) if pairs else np.zeros((K, K))
    return SdrOutput(
        F=tuple(F),
        alpha=np.maximum(v["alpha"].value(x), 1.0),
        beta=np.maximum(v["beta"].value(x), 1.0),
        p=p,
        q=q,
        lam=v["lam"].value(x),
        mu=v["mu"].value(x),
        objective=float(sum(np.trace(Fk).real for Fk in F)),
        rank_ratio=np.array(ratios),
        solve_time=res.solve_time,
        meta={"max_violation": res.max_violation},
    )


def solve_sdr(est, params, tol=None, backend=None):
    """Solve the SDP relaxation; raises :class:`Infeasible` unless optimal."""
    prog = build_robust_sdp(est, params)
    res = conic.solve(prog, tol, backend)
    if not res.optimal:
        raise Infeasible(res.status, "robust SDP relaxation")
    return unpack_sdr(res, prog, params)


def algorithm1(est, params, rank_tol=1e-6, tol=None, backend=None):
    """SDR-based robust design.

    Rank-one relaxations give the beamformers directly; otherwise the
    principal components are rescaled per user by the recovery SOCP.
    """
    t0 = time.perf_counter()
    out = solve_sdr(est, params, tol, backend)
    f = [principal_component(Fk)[0] for Fk in out.F]
    coeffs = coefficients(f, est, params)
    rank_one = bool(np.all(out.rank_ratio <= rank_tol))
    if rank_one:
        # the relaxation is tight; only absorb solver round-off
        phi, rho = polish_scaling(np.ones(params.K), 1.0 / out.alpha, coeffs, params)
    else:
        rec = rank_one_recovery_socp(f, coeffs, params, tol, backend)
        phi, rho = rec.phi, rec.rho
    sol = Solution(f, np.ones(params.K)).scaled(phi, rho)
    meta = {
        "algorithm": "alg1",
        "rank_one": rank_one,
        "sdr_objective": out.objective,
        "rank_ratio": out.rank_ratio.tolist(),
        "solve_seconds": time.perf_counter() - t0,
    }
    return Solution(sol.f, sol.rho, meta=meta)
