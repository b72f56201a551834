"""Robust solution recovery by scaling relaxed beamformers.

Both procedures keep the beamforming directions ``f_k*`` and pick scaling
factors plus PS ratios so that the worst-case SINR and harvested-power
constraints hold at the closed-form worst errors of
:func:`robust_swipt.worst_case.coefficients`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import conic
from .model import Infeasible

__all__ = [
    "ScalingSolution",
    "rank_one_recovery_socp",
    "closed_form_recovery",
    "closed_form_quadratic",
    "largest_root",
    "g_function",
    "polish_scaling",
]


@dataclass(frozen=True, eq=False)
class ScalingSolution:
    """Scales ``phi`` (per user, or one common value repeated) and PS ratios.

    ``x``/``y`` are the SINR and EH slack terms of the recovery problem
    evaluated at ``phi``; ``objective`` is the resulting total power.
    """

    phi: np.ndarray
    rho: np.ndarray
    x: np.ndarray
    y: np.ndarray
    objective: float
    common: bool = False


def _xy(phi, coeffs, params):
    """Per-user SINR slack ``x_k`` and received-power term ``y_k`` at scales ``phi``."""
    u, ut = coeffs.u, coeffs.u_tilde
    x = phi * np.diag(u) / params.gamma - (ut @ phi - np.diag(ut) * phi) - params.sigma2
    y = u @ phi + params.sigma2
    return x, y


def _rho_interval(phi, coeffs, params):
    x, y = _xy(phi, coeffs, params)
    with np.errstate(divide="ignore", invalid="ignore"):
        lo = np.where(x > 0, params.omega2 / x, np.inf)
        hi = 1.0 - params.psi / (params.xi * y)
    return lo, hi, x, y


def polish_scaling(phi, rho, coeffs, params, max_boost=1e-3):
    """Make ``(phi, rho)`` exactly feasible for the worst-case constraints.

    Solver output satisfies the cones only up to its tolerance; a common
    up-scaling by at most ``1 + max_boost`` absorbs that slack.
    """
    lo, hi, _, _ = _rho_interval(phi, coeffs, params)
    if np.all(lo <= hi):
        return phi, np.clip(rho, lo, hi)
    if _rho_feasible(phi * (1 + max_boost), coeffs, params):
        a, b = 1.0, 1.0 + max_boost
        for _ in range(60):
            m = 0.5 * (a + b)
            if _rho_feasible(phi * m, coeffs, params):
                b = m
            else:
                a = m
        phi = phi * b
        lo, hi, _, _ = _rho_interval(phi, coeffs, params)
        return phi, np.clip(rho, lo, hi)
    raise Infeasible("numerical_failure", "recovery point could not be made feasible")


def _rho_feasible(phi, coeffs, params):
    lo, hi, _, _ = _rho_interval(phi, coeffs, params)
    return bool(np.all(lo <= hi))


def rank_one_recovery_socp(f_star, coeffs, params, tol=None, backend=None):
    """Jointly optimal per-user scales ``phi_k`` and PS ratios for fixed directions.

    Minimises ``sum_k phi_k ||f_k*||^2`` subject to the worst-case SINR and
    EH constraints written as hyperbolic second-order cones.
    """
    K = params.K
    norms2 = np.array([np.vdot(f, f).real for f in f_star])
    u, ut = coeffs.u, coeffs.u_tilde
    prog = conic.ConeProgram("rank_one_recovery")
    phi = prog.variable("phi", (K,))
    rho = prog.variable("rho", (K,))
    for k in range(K):
        others = [j for j in range(K) if j != k]
        x_k = phi[k] * (u[k, k] / params.gamma[k]) - params.sigma2[k]
        for j in others:
            x_k = x_k - phi[j] * ut[k, j]
        y_k = params.sigma2[k]
        for j in range(K):
            y_k = phi[j] * u[k, j] + y_k
        prog.hyperbolic(x_k, rho[k], np.sqrt(params.omega2[k]), tag="sinr")
        prog.hyperbolic(y_k, 1.0 - rho[k], np.sqrt(params.psi[k] / params.xi[k]), tag="eh")
        prog.nonneg(conic.concat(x_k, y_k), tag="sign")
    prog.nonneg(conic.concat(phi, rho, 1.0 - rho), tag="box")
    prog.minimize(phi @ norms2)
    res = conic.solve(prog, tol, backend)
    if not res.optimal:
        raise Infeasible(res.status, "rank-one recovery SOCP")
    phi_v = np.maximum(res.primal["phi"], 0.0)
    rho_v = np.clip(res.primal["rho"], 0.0, 1.0)
    phi_v, rho_v = polish_scaling(phi_v, rho_v, coeffs, params)
    x, y = _xy(phi_v, coeffs, params)
    if np.any(x <= 0):
        raise Infeasible("x<=0", "recovered SINR slack is not positive")
    return ScalingSolution(phi_v, rho_v, x, y, float(phi_v @ norms2))


def g_function(phi, x_t, y_t, params, k):
    """``omega^2/(phi x~ - sigma^2) + psi/(xi (phi y~ + sigma^2))`` for user k."""
    return params.omega2[k] / (phi * x_t - params.sigma2[k]) + params.psi[k] / (
        params.xi[k] * (phi * y_t + params.sigma2[k])
    )


def closed_form_quadratic(x_t, y_t, sigma2, omega2, psi, xi):
    """Coefficients ``(a, b, c)`` of ``a phi^2 + b phi + c = 0`` equivalent to ``g(phi) = 1``.

    Obtained by clearing denominators:
    ``xi omega2 (phi y + s) + psi (phi x - s) = xi (phi x - s)(phi y + s)``.
    """
    a = xi * x_t * y_t
    b = xi * (x_t * sigma2 - y_t * sigma2) - xi * omega2 * y_t - psi * x_t
    c = -xi * sigma2**2 - xi * omega2 * sigma2 + psi * sigma2
    return a, b, c


def largest_root(a, b, c):
    """Largest real root of ``a t^2 + b t + c`` (``a > 0``) or None."""
    disc = b * b - 4 * a * c
    if disc < 0:
        return None
    sq = np.sqrt(disc)
    q = -0.5 * (b + np.copysign(sq, b))
    roots = [q / a]
    if q != 0:
        roots.append(c / q)
    return max(roots)


def _bisect_root(gfun, lo, hi=1e9, iters=200):
    if gfun(hi) > 1.0:
        return None
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if gfun(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return hi


def closed_form_recovery(f_star, coeffs, params):
    """Common scaling ``phi*`` and PS ratios in closed form.

    Raises :class:`Infeasible` with status ``"x_tilde<=0"`` when some user
    cannot reach its SINR target at any common scaling.
    """
    K = params.K
    u, ut = coeffs.u, coeffs.u_tilde
    x_t = np.diag(u) / params.gamma - (ut.sum(axis=1) - np.diag(ut))
    y_t = u.sum(axis=1)
    if np.any(x_t <= 0):
        raise Infeasible("x_tilde<=0", f"x_tilde = {x_t}")
    phi_k = np.ones(K)
    for k in range(K):
        s2 = params.sigma2[k]
        if x_t[k] - s2 > 0 and g_function(1.0, x_t[k], y_t[k], params, k) <= 1.0:
            continue
        pole = s2 / x_t[k]
        root = None
        if y_t[k] > 0:
            a, b, c = closed_form_quadratic(x_t[k], y_t[k], s2, params.omega2[k], params.psi[k], params.xi[k])
            if b * b - 4 * a * c > 1e-12 * max(b * b, 1e-300):
                root = largest_root(a, b, c)
        if root is None or root <= pole:
            root = _bisect_root(lambda p: g_function(p, x_t[k], y_t[k], params, k), pole * (1 + 1e-12) + 1e-300)
        if root is None:
            raise Infeasible("no_root", f"g_{k}(phi) = 1 has no root above the pole")
        phi_k[k] = root
    phi = max(phi_k.max(), 1.0)
    denom = phi * x_t - params.sigma2
    rho = params.omega2 / denom
    # guard the last ulp so both constraints hold in floating point
    for _ in range(8):
        gk = np.array([g_function(phi, x_t[k], y_t[k], params, k) for k in range(K)])
        if np.all(gk <= 1.0):
            break
        phi = np.nextafter(phi, np.inf) * (1 + 1e-15)
        rho = params.omega2 / (phi * x_t - params.sigma2)
    norms2 = np.array([np.vdot(f, f).real for f in f_star])
    phis = np.full(K, phi)
    x, y = _xy(phis, coeffs, params)
    return ScalingSolution(phis, rho, x, y, float(phi * norms2.sum()), common=True)
