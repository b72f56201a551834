"""System model: parameters, channels, CSI errors, SINR and harvested power.

All powers are linear milliwatts internally; dB/dBm only appear in the
conversion helpers and in :meth:`SystemParams.from_config`.

Channel ``hhat[k][j]`` links transmitter ``j`` to receiver ``k`` and lives on
transmitter ``j``'s antennas, so its length is ``N[j]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "InvalidInput",
    "Infeasible",
    "SystemParams",
    "ChannelEstimate",
    "ErrorRealization",
    "Solution",
    "sinr",
    "harvested_power",
    "all_sinr",
    "all_harvested",
    "link_powers",
    "generate_channels",
    "sample_error",
    "dbm_to_mw",
    "mw_to_dbm",
    "db_to_linear",
]


class InvalidInput(ValueError):
    """Inconsistent dimensions or out-of-range model parameters."""


class Infeasible(RuntimeError):
    """A design step found no feasible point.

    ``status`` is the solver status (``"infeasible"``, ``"numerical_failure"``,
    ...) or a short reason such as ``"x_tilde<=0"`` for closed-form failures.
    """

    def __init__(self, status, message=""):
        super().__init__(f"{status}: {message}" if message else status)
        self.status = status


def dbm_to_mw(x):
    return 10.0 ** (np.asarray(x, dtype=float) / 10.0) if np.ndim(x) else 10.0 ** (float(x) / 10.0)


def mw_to_dbm(x):
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0):
        raise InvalidInput("power in mW must be positive to convert to dBm")
    out = 10.0 * np.log10(arr)
    return out if np.ndim(x) else float(out)


db_to_linear = dbm_to_mw


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


def _per_user(value, K, name):
    arr = np.broadcast_to(np.asarray(value, dtype=float), (K,)) if np.ndim(value) == 0 else np.asarray(value, dtype=float)
    if arr.shape != (K,):
        raise InvalidInput(f"{name} must have length K={K}")
    return arr


@dataclass(frozen=True, eq=False)
class SystemParams:
    """Per-user targets, noise powers and CSI error radii (linear units).

    Attributes
    ----------
    K : number of transmitter/receiver pairs
    N : antennas per transmitter
    gamma : SINR targets (linear)
    psi : harvested-power targets (mW)
    xi : energy conversion efficiencies in (0, 1]
    sigma2, omega2 : antenna and circuit noise powers (mW)
    eta : K x K error radii, ``eta[k, j]`` bounds the error on link j -> k
    """

    K: int
    N: tuple
    gamma: np.ndarray
    psi: np.ndarray
    xi: np.ndarray
    sigma2: np.ndarray
    omega2: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        K = int(self.K)
        if K < 1:
            raise InvalidInput("K must be a positive integer")
        N = (int(self.N),) * K if np.ndim(self.N) == 0 else tuple(int(n) for n in self.N)
        if len(N) != K or min(N) < 1:
            raise InvalidInput("N must list K positive antenna counts")
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "N", N)
        for name in ("gamma", "psi", "xi", "sigma2", "omega2"):
            object.__setattr__(self, name, _frozen(_per_user(getattr(self, name), K, name)))
        eta = np.asarray(self.eta, dtype=float)
        if eta.ndim == 0:
            eta = np.full((K, K), float(eta))
        if eta.shape != (K, K):
            raise InvalidInput("eta must be a scalar or a K x K matrix")
        object.__setattr__(self, "eta", _frozen(eta))
        if np.any(self.eta < 0):
            raise InvalidInput("error radii must be nonnegative")
        for name in ("gamma", "psi", "sigma2", "omega2"):
            if np.any(getattr(self, name) <= 0):
                raise InvalidInput(f"{name} must be positive")
        if np.any(self.xi <= 0) or np.any(self.xi > 1):
            raise InvalidInput("xi must lie in (0, 1]")

    @classmethod
    def from_config(cls, cfg):
        """Build from a scenario mapping with dB/dBm fields (see README)."""
        try:
            K = int(cfg["K"])
            return cls(
                K=K,
                N=cfg.get("N", 4),
                gamma=db_to_linear(np.asarray(cfg.get("gamma_db", 10.0), dtype=float)),
                psi=dbm_to_mw(np.asarray(cfg.get("psi_dbm", 5.0), dtype=float)),
                xi=cfg.get("xi", 1.0),
                sigma2=dbm_to_mw(np.asarray(cfg.get("sigma2_dbm", -30.0), dtype=float)),
                omega2=dbm_to_mw(np.asarray(cfg.get("omega2_dbm", -20.0), dtype=float)),
                eta=cfg.get("eta", 0.1),
            )
        except KeyError as exc:
            raise InvalidInput(f"missing scenario field {exc}") from None

    def replace(self, **changes):
        kw = {name: getattr(self, name) for name in ("K", "N", "gamma", "psi", "xi", "sigma2", "omega2", "eta")}
        kw.update(changes)
        return SystemParams(**kw)

    def with_eta(self, eta):
        return self.replace(eta=eta)


@dataclass(frozen=True, eq=False)
class ChannelEstimate:
    hhat: tuple
    eta: np.ndarray

    def __post_init__(self):
        hh = tuple(tuple(_frozen(h, complex) for h in row) for row in self.hhat)
        K = len(hh)
        if any(len(row) != K for row in hh):
            raise InvalidInput("hhat must be K x K")
        for j in range(K):
            if len({hh[k][j].shape for k in range(K)}) != 1 or hh[0][j].ndim != 1:
                raise InvalidInput("channels from one transmitter must share its antenna count")
        object.__setattr__(self, "hhat", hh)
        eta = np.asarray(self.eta, dtype=float)
        if eta.ndim == 0:
            eta = np.full((K, K), float(eta))
        if eta.shape != (K, K) or np.any(eta < 0):
            raise InvalidInput("eta must be a nonnegative K x K matrix")
        object.__setattr__(self, "eta", _frozen(eta))

    @property
    def K(self):
        return len(self.hhat)

    @property
    def N(self):
        return tuple(self.hhat[0][j].size for j in range(self.K))

    def with_eta(self, eta):
        return ChannelEstimate(self.hhat, eta)

    def check(self, params):
        if self.K != params.K or self.N != params.N:
            raise InvalidInput("channel estimate does not match system parameters")


@dataclass(frozen=True, eq=False)
class ErrorRealization:
    e: tuple

    def __post_init__(self):
        object.__setattr__(self, "e", tuple(tuple(_frozen(v, complex) for v in row) for row in self.e))

    @classmethod
    def zeros(cls, est):
        return cls([[np.zeros(est.N[j], complex) for j in range(est.K)] for _ in range(est.K)])

    def norms(self):
        return np.array([[np.linalg.norm(v) for v in row] for row in self.e])


@dataclass(frozen=True, eq=False)
class Solution:
    """Beamformers ``f[k]`` and PS ratios ``rho[k]``; objective is total power."""

    f: tuple
    rho: np.ndarray
    objective: float = float("nan")
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        f = tuple(_frozen(v, complex) for v in self.f)
        rho = _frozen(self.rho)
        if rho.shape != (len(f),):
            raise InvalidInput("rho must have one entry per beamformer")
        if np.any(rho < 0) or np.any(rho > 1):
            raise InvalidInput("PS ratios must lie in [0, 1]")
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "objective", float(sum(np.vdot(v, v).real for v in f)))

    @property
    def K(self):
        return len(self.f)

    def scaled(self, factors, rho=None, **meta):
        """Scale each beamformer by ``sqrt(factors[k])``."""
        factors = np.broadcast_to(np.asarray(factors, dtype=float), (self.K,))
        f = [np.sqrt(c) * v for c, v in zip(factors, self.f)]
        return Solution(f, self.rho if rho is None else rho, meta={**self.meta, **meta})


def link_powers(sol, est, err=None):
    """Matrix ``P[k, j] = |h_kj^H f_j|^2`` at the realized channels."""
    K = est.K
    if sol.K != K:
        raise InvalidInput("solution and channel have different K")
    P = np.empty((K, K))
    for k in range(K):
        for j in range(K):
            h = est.hhat[k][j] if err is None else est.hhat[k][j] + err.e[k][j]
            if h.shape != sol.f[j].shape:
                raise InvalidInput(f"dimension mismatch on link ({k}, {j})")
            P[k, j] = abs(np.vdot(h, sol.f[j])) ** 2
    return P


def sinr(sol, est, err, params, k):
    P = link_powers(sol, est, err)
    rho = sol.rho[k]
    interference = P[k].sum() - P[k, k]
    return rho * P[k, k] / (rho * (interference + params.sigma2[k]) + params.omega2[k])


def harvested_power(sol, est, err, params, k):
    P = link_powers(sol, est, err)
    return params.xi[k] * (1.0 - sol.rho[k]) * (P[k].sum() + params.sigma2[k])


def all_sinr(sol, est, err, params):
    P = link_powers(sol, est, err)
    d = np.diag(P)
    interference = P.sum(axis=1) - d
    return sol.rho * d / (sol.rho * (interference + params.sigma2) + params.omega2)


def all_harvested(sol, est, err, params):
    P = link_powers(sol, est, err)
    return params.xi * (1.0 - sol.rho) * (P.sum(axis=1) + params.sigma2)


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _cgauss(rng, n):
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)


def generate_channels(seed, params):
    """I.i.d. unit-power Rayleigh nominal channels, deterministic per seed."""
    rng = _rng(seed)
    K = params.K
    hhat = [[_cgauss(rng, params.N[j]) for j in range(K)] for _ in range(K)]
    return ChannelEstimate(hhat, params.eta)


def sample_error(seed, est):
    """Errors uniform on each complex ball ``||e_kj|| <= eta_kj``."""
    rng = _rng(seed)
    K = est.K
    out = []
    for k in range(K):
        row = []
        for j in range(K):
            n = est.N[j]
            eta = est.eta[k, j]
            d = _cgauss(rng, n)
            u = rng.random()
            if eta == 0:
                row.append(np.zeros(n, complex))
                continue
            r = eta * u ** (1.0 / (2 * n))
            row.append(r * d / np.linalg.norm(d))
        out.append(row)
    return ErrorRealization(out)
