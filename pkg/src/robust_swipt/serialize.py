"""JSON formats for scenarios and solutions.

Complex vectors are stored as lists of ``[re, im]`` pairs.

Scenario fields: ``K``, ``N`` (int or per-user list), ``gamma_db``,
``psi_dbm``, ``xi``, ``sigma2_dbm``, ``omega2_dbm``, ``eta`` (scalar or K x K),
``seed`` (channel seed) and optionally ``hhat`` (K x K nested lists of
complex vectors) to pin the nominal channels.
"""

from __future__ import annotations

import json

import numpy as np

from .model import ChannelEstimate, InvalidInput, Solution, SystemParams, generate_channels, mw_to_dbm

__all__ = [
    "complex_to_json",
    "complex_from_json",
    "load_scenario",
    "scenario_from_dict",
    "solution_to_dict",
    "solution_from_dict",
    "save_solution",
    "load_solution",
]


def complex_to_json(v):
    v = np.asarray(v, dtype=complex).ravel()
    return [[float(z.real), float(z.imag)] for z in v]


def complex_from_json(pairs):
    a = np.asarray(pairs, dtype=float)
    if a.ndim != 2 or a.shape[1] != 2:
        raise InvalidInput("complex vectors must be lists of [re, im] pairs")
    return a[:, 0] + 1j * a[:, 1]


def scenario_from_dict(d):
    """``(SystemParams, ChannelEstimate)`` from a scenario mapping."""
    if not isinstance(d, dict):
        raise InvalidInput("scenario must be a JSON object")
    params = SystemParams.from_config(d)
    if "hhat" in d:
        hhat = [[complex_from_json(v) for v in row] for row in d["hhat"]]
        est = ChannelEstimate(hhat, params.eta)
    else:
        est = generate_channels(int(d.get("seed", 0)), params)
    est.check(params)
    return params, est


def load_scenario(path):
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"scenario is not valid JSON: {exc}") from None
    return scenario_from_dict(d)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    return x


def solution_to_dict(sol):
    return {
        "f": [complex_to_json(v) for v in sol.f],
        "rho": [float(r) for r in sol.rho],
        "objective_mw": sol.objective,
        "objective_dbm": mw_to_dbm(sol.objective) if sol.objective > 0 else None,
        "meta": _jsonable(sol.meta),
    }


def solution_from_dict(d):
    try:
        return Solution([complex_from_json(v) for v in d["f"]], d["rho"], meta=d.get("meta", {}))
    except KeyError as exc:
        raise InvalidInput(f"solution missing field {exc}") from None


def save_solution(sol, path, **extra):
    with open(path, "w") as fh:
        json.dump({**solution_to_dict(sol), **_jsonable(extra)}, fh, indent=2)


def load_solution(path):
    with open(path) as fh:
        return solution_from_dict(json.load(fh))
