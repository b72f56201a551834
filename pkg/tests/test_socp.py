import numpy as np
import pytest
from scipy.optimize import brentq

from robust_swipt.conic import Tolerance
from robust_swipt.harness import verify_robust
from robust_swipt.model import Infeasible, Solution, SystemParams, generate_channels, link_powers
from robust_swipt.socp import algorithm2, build_robust_socp, solve_socp
from robust_swipt.worst_case import coefficients

TIGHT = Tolerance(feas=1e-10, gap=1e-10)


def relaxed_perfect_csi(est, params, unit=1e-5):
    """SINR plus summed SINR+EH constraints with exact channels, built in cvxpy."""
    import cvxpy as cp

    K = params.K
    s2, w2, psi = params.sigma2 / unit, params.omega2 / unit, params.psi / unit
    f = [cp.Variable(params.N[k], complex=True) for k in range(K)]
    rho = cp.Variable(K)
    c = cp.Variable(K)
    d = cp.Variable(K)
    cons = [rho >= 0, rho <= 1]
    for k in range(K):
        h = est.hhat[k]
        direct = h[k].conj() @ f[k]
        cons.append(cp.imag(direct) == 0)
        interf = [h[j].conj() @ f[j] for j in range(K) if j != k]
        amps = cp.hstack(interf + [np.sqrt(s2[k]), c[k]])
        cons.append(cp.real(direct) / np.sqrt(params.gamma[k]) >= cp.norm(amps))
        cons.append(c[k] >= np.sqrt(w2[k]) * cp.power(rho[k], -0.5))
        cons.append(d[k] >= np.sqrt(psi[k] / params.xi[k]) * cp.power(1 - rho[k], -0.5))
        cons.append(np.sqrt(1 + 1 / params.gamma[k]) * cp.real(direct) >= cp.norm(cp.hstack([c[k], d[k]])))
    prob = cp.Problem(cp.Minimize(sum(cp.sum_squares(fk) for fk in f)), cons)
    prob.solve(solver="CLARABEL")
    return prob.value * unit, prob.status


def test_census_default():
    p = SystemParams.from_config({"K": 3})
    prog = build_robust_socp(generate_channels(0, p), p)
    c = prog.census()
    assert c[("soc", 13)] == 1
    assert c[("soc", 5)] == 3 + 9
    assert c[("soc", 3)] == 12
    assert c[("soc", 2)] == 6
    assert prog.count("soc") == 2 * 9 + 4 * 3 + 1
    assert prog.count("zero", "phase") == 3


def test_solution_invariants(default_params):
    for seed in range(4):
        est = generate_channels(seed, default_params)
        try:
            out = solve_socp(est, default_params, tol=TIGHT)
        except Infeasible:
            continue
        np.testing.assert_allclose(out.a**2 + out.b**2, 1.0, atol=1e-7)
        assert np.all(out.beta >= -1e-9)
        for k in range(3):
            amp = np.vdot(est.hhat[k][k], out.f[k])
            assert abs(amp.imag) <= 1e-9 * max(1.0, abs(amp)) and amp.real >= 0
        assert out.objective == pytest.approx(sum(np.vdot(v, v).real for v in out.f), rel=1e-6)


def test_zero_error_matches_relaxed_perfect_csi():
    p = SystemParams.from_config({"K": 3, "eta": 0.0})
    for seed in range(3):
        est = generate_channels(seed, p)
        ours = solve_socp(est, p).objective
        ref, status = relaxed_perfect_csi(est, p)
        assert status == "optimal"
        assert ours == pytest.approx(ref, rel=1e-6)


def test_phase_rotation_leaves_values_unchanged(default_params):
    est = generate_channels(0, default_params)
    out = solve_socp(est, default_params)
    rot = [v * np.exp(1j * th) for v, th in zip(out.f, (0.3, -1.1, 2.5))]
    ones = np.ones(3)
    np.testing.assert_allclose(link_powers(Solution(rot, ones), est), link_powers(Solution(out.f, ones), est), rtol=1e-12, atol=1e-15)
    a, b = coefficients(out.f, est, default_params), coefficients(rot, est, default_params)
    np.testing.assert_allclose(b.u, a.u, rtol=1e-9, atol=1e-15)
    np.testing.assert_allclose(b.u_tilde, a.u_tilde, rtol=1e-9, atol=1e-15)
    assert sum(np.vdot(v, v).real for v in rot) == pytest.approx(out.objective)


def test_recovery_needed_for_robustness(default_params):
    found = None
    for seed in range(20):
        est = generate_channels(seed, default_params)
        try:
            out = solve_socp(est, default_params)
            sol = algorithm2(est, default_params)
        except Infeasible:
            continue
        if not verify_robust(Solution(out.f, out.rho), est, default_params, n_samples=20).ok:
            found = seed
            assert verify_robust(sol, est, default_params, n_samples=20).ok
            break
    assert found is not None


def test_single_user_matches_scalar_design():
    p = SystemParams.from_config({"K": 1, "N": 4, "eta": 0.2})
    est = generate_channels(7, p)
    G = (np.linalg.norm(est.hhat[0][0]) - 0.2) ** 2
    g, s2, w2, q = p.gamma[0], p.sigma2[0], p.omega2[0], p.psi[0] / p.xi[0]
    sinr_need = lambda r: g * (s2 + w2 / r) / G
    eh_need = lambda r: (q / (1 - r) - s2) / G
    r = brentq(lambda r: sinr_need(r) - eh_need(r), 1e-9, 1 - 1e-9, xtol=1e-15)
    sol = algorithm2(est, p)
    assert sol.objective == pytest.approx(sinr_need(r), rel=1e-4)
    assert sol.rho[0] == pytest.approx(r, rel=1e-3)


def test_algorithm2_above_sdr_bound(default_params):
    from robust_swipt.sdr import solve_sdr

    for seed in range(5):
        est = generate_channels(seed, default_params)
        try:
            sol = algorithm2(est, default_params)
        except Infeasible:
            continue
        assert sol.objective >= solve_sdr(est, default_params).objective - 1e-6
        assert verify_robust(sol, est, default_params, n_samples=20).ok


@pytest.mark.slow
def test_algorithm2_faster_on_large_instances():
    from robust_swipt.cccp import algorithm3
    from robust_swipt.sdr import algorithm1

    p = SystemParams.from_config({"K": 4, "N": 12, "gamma_db": 4})
    est = generate_channels(0, p)
    sol2 = algorithm2(est, p)
    sol1 = algorithm1(est, p)
    sol3, _ = algorithm3(est, p, n_max=2)
    assert sol2.meta["solve_seconds"] < sol1.meta["solve_seconds"]
    assert sol2.meta["solve_seconds"] < sol3.meta["solve_seconds"]
