"""Worst-case CSI errors for fixed beamformers.

For one link with nominal channel ``h`` and beamformer ``f`` the received
amplitude ``|(h + e)^H f|`` over the ball ``||e|| <= eta`` is extremised by an
error collinear with ``f``. The closed forms live here, together with a
sampling + projected-gradient oracle used to cross-check them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ErrorRealization, InvalidInput

__all__ = [
    "WorstCaseCoefficients",
    "worst_error_min",
    "worst_error_max",
    "lagrange_worst_eh",
    "brute_force_worst",
    "coefficients",
]


def _check(hhat, f, eta):
    hhat = np.asarray(hhat, dtype=complex)
    f = np.asarray(f, dtype=complex)
    if eta < 0:
        raise InvalidInput("error radius must be nonnegative")
    if hhat.shape != f.shape:
        raise InvalidInput("channel and beamformer dimensions differ")
    return hhat, f


def worst_error_min(hhat, f, eta):
    """Error minimising ``|(h + e)^H f|``; returns ``(e, min amplitude)``.

    When ``|h^H f| <= eta ||f||`` the ball contains an error nulling the
    link, so the minimum is 0 and ``e`` is that nulling error.
    """
    hhat, f = _check(hhat, f, eta)
    nf = np.linalg.norm(f)
    if nf == 0:
        return np.zeros_like(f), 0.0
    c = np.vdot(hhat, f)
    if abs(c) > eta * nf:
        beta = np.conj(-eta * c / (nf * abs(c)))
        return beta * f, float(abs(c) - eta * nf)
    return -f * np.conj(c) / nf**2, 0.0


def worst_error_max(hhat, f, eta):
    """Error maximising ``|(h + e)^H f|``; returns ``(e, max amplitude)``."""
    hhat, f = _check(hhat, f, eta)
    nf = np.linalg.norm(f)
    if nf == 0:
        return np.zeros_like(f), 0.0
    c = np.vdot(hhat, f)
    beta = np.conj(eta * c / (nf * abs(c))) if c != 0 else eta / nf
    return beta * f, float(abs(c) + eta * nf)


def lagrange_worst_eh(hhat, f, eta):
    """Stationary point of the Lagrangian for the minimum received power.

    Returns ``(e, tau, power)`` where ``power = |(h + e)^H f|^2`` and ``tau``
    is the multiplier of the norm constraint (0 when it is inactive, inf
    when ``eta == 0``). The minimising branch ``e = -eta g / ||g||`` with
    ``g = f f^H h`` is used.
    """
    hhat, f = _check(hhat, f, eta)
    nf2 = float(np.vdot(f, f).real)
    c = np.vdot(hhat, f)
    g = f * np.conj(c)
    ng = np.linalg.norm(g)
    if ng == 0:
        return np.zeros_like(f), 0.0, 0.0
    if eta == 0:
        return np.zeros_like(f), np.inf, float(abs(c) ** 2)
    if abs(c) <= eta * np.sqrt(nf2):
        e, _ = worst_error_min(hhat, f, eta)
        return e, 0.0, 0.0
    tau = ng / eta - nf2
    e = -g / (tau + nf2)
    return e, float(tau), float(abs(np.vdot(hhat + e, f)) ** 2)


def brute_force_worst(hhat, f, eta, mode="min", budget=2000, seed=0, steps=500):
    """Oracle for the extreme amplitude ``|(h + e)^H f|`` over the ball.

    Uniform ball samples, then projected gradient ascent/descent on
    ``|(h + e)^H f|^2`` (step ``1 / (2 ||f||^2)``) from the best 10 samples
    plus the collinear seeds ``+-eta f/||f||`` at both candidate phases.
    """
    if mode not in ("min", "max"):
        raise InvalidInput("mode must be 'min' or 'max'")
    hhat, f = _check(hhat, f, eta)
    budget = max(int(budget), 1000)
    n = f.size
    c = np.vdot(hhat, f)
    nf = np.linalg.norm(f)
    if eta == 0 or nf == 0:
        return float(abs(c))
    rng = np.random.default_rng(seed)
    d = rng.standard_normal((budget, n)) + 1j * rng.standard_normal((budget, n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    r = eta * rng.random(budget) ** (1.0 / (2 * n))
    E = d * r[:, None]
    vals = np.abs(c + E.conj() @ f)
    sign = 1.0 if mode == "min" else -1.0
    best_idx = np.argsort(sign * vals)[:10]
    phase = c / abs(c) if c != 0 else 1.0
    seeds = [s * eta * f / nf for s in (phase, -phase, np.conj(phase), -np.conj(phase))]
    starts = [E[i] for i in best_idx] + seeds
    step = 1.0 / (2.0 * nf**2)
    best = vals[best_idx[0]]
    for e in starts:
        e = e.copy()
        for _ in range(steps):
            z = c + np.vdot(e, f)
            grad = 2.0 * f * np.conj(z)
            e = e - sign * step * grad
            ne = np.linalg.norm(e)
            if ne > eta:
                e *= eta / ne
        v = abs(c + np.vdot(e, f))
        best = min(best, v) if mode == "min" else max(best, v)
    return float(best)


@dataclass(frozen=True, eq=False)
class WorstCaseCoefficients:
    """Extreme link powers for fixed beamformers.

    ``u[k, j]`` is the minimum power ``|(h_kj + e~_kj)^H f_j|^2`` (energy
    harvesting worst case, and the desired-signal worst case on the
    diagonal); ``u_tilde[k, j]`` (j != k) the maximum interference power.
    """

    u: np.ndarray
    u_tilde: np.ndarray
    e_bar: tuple
    e_tilde: tuple
    tau: np.ndarray
    g: tuple

    def sinr_errors(self):
        """Error set minimising every SINR: min on direct links, max on cross links."""
        return ErrorRealization(self.e_bar)

    def eh_errors(self):
        """Error set minimising every harvested power."""
        return ErrorRealization(self.e_tilde)


def coefficients(f, est, params=None):
    """Worst-case coefficients for beamformers ``f`` on every link."""
    K = est.K
    u = np.zeros((K, K))
    u_tilde = np.zeros((K, K))
    tau = np.zeros((K, K))
    e_bar = [[None] * K for _ in range(K)]
    e_tilde = [[None] * K for _ in range(K)]
    g = [[None] * K for _ in range(K)]
    for k in range(K):
        for j in range(K):
            h, fj, eta = est.hhat[k][j], np.asarray(f[j], dtype=complex), est.eta[k, j]
            nominal = abs(np.vdot(h, fj)) ** 2
            g[k][j] = fj * np.vdot(fj, h)
            if j == k:
                e, amp = worst_error_min(h, fj, eta)
                e_bar[k][k] = e_tilde[k][k] = e
                u[k, k] = min(amp**2, nominal)
                _, tau[k, k], _ = lagrange_worst_eh(h, fj, eta)
                continue
            e_t, tau[k, j], p_min = lagrange_worst_eh(h, fj, eta)
            e_tilde[k][j] = e_t
            u[k, j] = min(p_min, nominal)
            e_b, amp = worst_error_max(h, fj, eta)
            e_bar[k][j] = e_b
            u_tilde[k, j] = max(amp**2, nominal)
    return WorstCaseCoefficients(u, u_tilde, tuple(map(tuple, e_bar)), tuple(map(tuple, e_tilde)), tau, tuple(map(tuple, g)))
