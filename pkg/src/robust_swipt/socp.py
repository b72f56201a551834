"""SOCP relaxation of the robust design and the SOCP-based algorithm.

The EH constraint is replaced by the sum of the SINR and EH constraints,
which makes the problem representable with second-order cones once each
worst-case link amplitude is bounded by the triangle inequality
``|h^H f| - eta ||f|| <= |(h + e)^H f| <= |h^H f| + eta ||f||``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import conic
from .model import Infeasible, Solution
from .recovery import closed_form_recovery
from .worst_case import coefficients

__all__ = ["SocpOutput", "build_robust_socp", "solve_socp", "algorithm2", "RHO_CLIP"]

RHO_CLIP = 1e-6


@dataclass(frozen=True, eq=False)
class SocpOutput:
    """Optimal point of the SOCP relaxation (``rho = a^2``, power ``t^2``)."""

    f: tuple
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    beta: np.ndarray
    e_aux: np.ndarray
    t: float
    objective: float
    solve_time: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def rho(self):
        return np.clip(self.a**2, RHO_CLIP, 1.0 - RHO_CLIP)


def build_robust_socp(est, params):
    """Second-order cone program with the relaxed (summed) EH constraint."""
    est.check(params)
    K, N = params.K, params.N
    prog = conic.ConeProgram("robust_socp")
    f = [prog.complex_vector(f"f{k}", N[k]) for k in range(K)]
    a = prog.variable("a", (K,))
    b = prog.variable("b", (K,))
    c = prog.variable("c", (K,))
    d = prog.variable("d", (K,))
    beta = prog.variable("beta", (K, K))
    pairs = [(k, j) for k in range(K) for j in range(K) if j != k]
    e = prog.variable("e_aux", (len(pairs),)) if pairs else None
    t = prog.variable("t", ())
    index = {kj: i for i, kj in enumerate(pairs)}
    eta = est.eta

    prog.soc(t, conic.concat(*f), tag="power")
    for k in range(K):
        g = params.gamma[k]
        J = [beta[k, j] for j in range(K) if j != k]
        prog.soc(beta[k, k] / np.sqrt(g), conic.concat(*J, np.sqrt(params.sigma2[k]), c[k]), tag="sinr")
        for j in range(K):
            amp = est.hhat[k][j].conj() @ f[j]
            if j == k:
                prog.soc(amp.real - beta[k, k], eta[k, k] * f[k], tag="link_self")
                prog.zero(amp.imag, tag="phase")
            else:
                i = index[k, j]
                prog.soc(beta[k, j] - e[i], eta[k, j] * f[j], tag="link_cross")
                prog.soc(e[i], amp, tag="modulus")
    for k in range(K):
        prog.soc(np.sqrt(1.0 + 1.0 / params.gamma[k]) * beta[k, k], conic.concat(c[k], d[k]), tag="sum")
        prog.hyperbolic(d[k], b[k], (params.psi[k] / params.xi[k]) ** 0.25, tag="eh_split")
        prog.hyperbolic(c[k], a[k], params.omega2[k] ** 0.25, tag="sinr_split")
        prog.soc(1.0, conic.concat(a[k], b[k]), tag="ps")
    prog.nonneg(conic.concat(a, b, beta), tag="sign")
    prog.minimize(t)
    return prog


def solve_socp(est, params, tol=None, backend=None):
    """Solve the SOCP relaxation; raises :class:`Infeasible` unless optimal."""
    prog = build_robust_socp(est, params)
    res = conic.solve(prog, tol, backend)
    if not res.optimal:
        raise Infeasible(res.status, "robust SOCP relaxation")
    v = res.primal
    K = params.K
    f = []
    for k in range(K):
        fk = np.asarray(v[f"f{k}"], dtype=complex)
        # rotate so the nominal direct amplitude is real and nonnegative
        amp = np.vdot(est.hhat[k][k], fk)
        if abs(amp) > 0:
            fk = fk * (abs(amp) / amp)
        f.append(fk)
    e_aux = np.zeros((K, K))
    pairs = [(k, j) for k in range(K) for j in range(K) if j != k]
    for i, (k, j) in enumerate(pairs):
        e_aux[k, j] = v["e_aux"][i]
    t = float(v["t"])
    return SocpOutput(
        f=tuple(f),
        a=v["a"],
        b=v["b"],
        c=v["c"],
        d=v["d"],
        beta=v["beta"],
        e_aux=e_aux,
        t=t,
        objective=t * t,
        solve_time=res.solve_time,
        meta={"max_violation": res.max_violation},
    )


def algorithm2(est, params, tol=None, backend=None):
    """SOCP-based robust design with closed-form common-factor recovery."""
    t0 = time.perf_counter()
    out = solve_socp(est, params, tol, backend)
    coeffs = coefficients(out.f, est, params)
    rec = closed_form_recovery(out.f, coeffs, params)
    sol = Solution(out.f, np.ones(params.K)).scaled(rec.phi, rec.rho)
    meta = {
        "algorithm": "alg2",
        "socp_objective": out.objective,
        "phi": float(rec.phi[0]),
        "solve_seconds": time.perf_counter() - t0,
    }
    return Solution(sol.f, sol.rho, meta=meta)
