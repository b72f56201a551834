import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from robust_swipt.model import SystemParams, generate_channels

settings.register_profile(
    "repo", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


@pytest.fixture
def default_params():
    return SystemParams.from_config({"K": 3})


def feasible_instance(params, start=0, limit=50):
    """First seed >= start whose SDP relaxation is feasible."""
    from robust_swipt.model import Infeasible
    from robust_swipt.sdr import solve_sdr

    for seed in range(start, start + limit):
        est = generate_channels(seed, params)
        try:
            return seed, est, solve_sdr(est, params)
        except Infeasible:
            continue
    raise RuntimeError("no feasible instance found")


def crandn(rng, n):
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)


def sdr_constraint_violation(out, est, err, params):
    """Largest violation (mW) of the relaxed quadratic constraints at ``hhat + e``.

    Checks the desired-signal, interference-bound, received-power and
    per-link received-power constraints that the LMIs make robust.
    """
    K = params.K
    h = [[est.hhat[k][j] + err.e[k][j] for j in range(K)] for k in range(K)]
    quad = np.array([[np.vdot(h[k][j], out.F[j] @ h[k][j]).real for j in range(K)] for k in range(K)])
    worst = 0.0
    for k in range(K):
        sinr = quad[k, k] / params.gamma[k] - out.p[k].sum() - params.sigma2[k] - params.omega2[k] * out.alpha[k]
        eh = quad[k, k] + out.q[k].sum() + params.sigma2[k] - params.psi[k] / params.xi[k] * out.beta[k]
        worst = max(worst, -sinr, -eh)
        for j in range(K):
            if j != k:
                worst = max(worst, quad[k, j] - out.p[k, j], out.q[k, j] - quad[k, j])
    return worst


ACCEPTANCE_LINES = []


def report_criterion(number, title, ok, detail=""):
    """Record and print one PASS/FAIL line for an acceptance criterion."""
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}" + (f": {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
