import numpy as np
import pytest

from robust_swipt.model import Infeasible, SystemParams, generate_channels, sample_error
from robust_swipt.sdr import algorithm1, build_robust_sdp, principal_component, solve_sdr

from conftest import feasible_instance, sdr_constraint_violation


def perfect_csi_sdp(est, params, unit=1e-5):
    """Non-robust SDR written directly with cvxpy complex variables.

    Powers are expressed in multiples of ``unit`` so the noise terms are
    O(1) for the solver; the problem is homogeneous in that scale.
    """
    import cvxpy as cp

    s2, w2, psi = params.sigma2 / unit, params.omega2 / unit, params.psi / unit

    K = params.K
    F = [cp.Variable((params.N[k], params.N[k]), hermitian=True) for k in range(K)]
    rho = cp.Variable(K)
    cons = [Fk >> 0 for Fk in F] + [rho >= 1e-6, rho <= 1 - 1e-6]
    for k in range(K):
        h = est.hhat[k]
        pw = [cp.real(h[j].conj() @ F[j] @ h[j]) for j in range(K)]
        interf = sum(pw[j] for j in range(K) if j != k)
        cons.append(pw[k] / params.gamma[k] >= interf + s2[k] + w2[k] * cp.inv_pos(rho[k]))
        cons.append(sum(pw) + s2[k] >= psi[k] / params.xi[k] * cp.inv_pos(1 - rho[k]))
    prob = cp.Problem(cp.Minimize(sum(cp.real(cp.trace(Fk)) for Fk in F)), cons)
    prob.solve(solver="CLARABEL")
    return prob.value * unit, prob.status


def test_census_default():
    p = SystemParams.from_config({"K": 3})
    prog = build_robust_sdp(generate_channels(0, p), p)
    c = prog.census()
    assert c[("psd", 5)] == 18
    assert c[("psd", 4)] == 3
    assert prog.count("psd") == 21
    assert prog.count("psd", "U") == 3 and prog.count("psd", "V") == 6
    assert prog.count("psd", "X") == 3 and prog.count("psd", "Y") == 6


def test_census_single_user():
    p = SystemParams.from_config({"K": 1, "N": 3})
    prog = build_robust_sdp(generate_channels(0, p), p)
    assert prog.census()[("psd", 4)] == 2
    assert prog.census()[("psd", 3)] == 1
    assert "p" not in prog.variables and "q" not in prog.variables


def test_lmi_block_entries():
    # U_k at F = I, multiplier lam: top-left (1/g) I + lam I, corner (1/g)||h||^2 - ...
    p = SystemParams.from_config({"K": 1, "N": 2})
    est = generate_channels(3, p)
    prog = build_robust_sdp(est, p)
    x = np.zeros(prog.n_vars)
    v = prog.variables
    # set F = I (diagonal entries come first), lam = 0.5, alpha = 2
    for name, val in [("alpha", 2.0), ("lam", 0.5)]:
        col = v[name].coef.indices[0]
        x[col] = val
    for i in range(2):
        x[v["F0"].coef[i * 3].indices[0]] = 1.0
    U = next(c for c in prog.constraints if c.tag == "U").expr.value(x)
    h = est.hhat[0][0]
    g, eta = p.gamma[0], p.eta[0, 0]
    top = U[:2, :2] + 1j * U[3:5, :2]
    np.testing.assert_allclose(top, (1 / g + 0.5) * np.eye(2), atol=1e-12)
    corner = U[2, 2]
    expected = np.vdot(h, h).real / g - p.sigma2[0] - p.omega2[0] * 2.0 - 0.5 * eta**2
    assert corner == pytest.approx(expected)


def test_zero_error_matches_perfect_csi_sdp():
    p = SystemParams.from_config({"K": 3, "eta": 0.0})
    for seed in range(3):
        est = generate_channels(seed, p)
        ours = solve_sdr(est, p).objective
        ref, status = perfect_csi_sdp(est, p)
        assert status == "optimal"
        assert ours == pytest.approx(ref, rel=1e-6)


def test_invp_equality_and_bounds(default_params):
    _, _, out = feasible_instance(default_params)
    np.testing.assert_allclose(1 / out.alpha + 1 / out.beta, 1.0, atol=1e-5)
    assert np.all(out.alpha >= 1 - 1e-9) and np.all(out.beta >= 1 - 1e-9)
    for F in out.F:
        assert np.linalg.eigvalsh(F)[0] >= -1e-8
    assert np.all(out.p[~np.eye(3, dtype=bool)] >= -1e-9)
    assert np.all(np.diag(out.p) == 0)


def test_infeasible_instance():
    p = SystemParams.from_config({"K": 3, "N": 2, "gamma_db": 60, "eta": 0.3})
    with pytest.raises(Infeasible) as exc:
        solve_sdr(generate_channels(0, p), p)
    assert exc.value.status == "infeasible"


def test_principal_component_examples():
    x = np.array([1 + 1j, 2])
    f, r = principal_component(np.outer(x, x.conj()))
    assert np.vdot(f, f).real == pytest.approx(6.0)
    assert r == pytest.approx(0.0, abs=1e-12)
    assert abs(abs(np.vdot(f, x)) - 6.0) < 1e-9
    assert principal_component(np.eye(2))[1] == pytest.approx(1.0)
    f0, r0 = principal_component(np.zeros((3, 3)))
    assert np.all(f0 == 0) and r0 == 0


def test_principal_component_error_bound():
    rng = np.random.default_rng(0)
    for _ in range(10):
        B = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        F = B @ B.conj().T
        f, _ = principal_component(F)
        w = np.linalg.eigvalsh(F)
        assert np.linalg.norm(np.outer(f, f.conj()) - F) <= w[-2] * 2 + 1e-9


def test_s_procedure_soundness_sampled(default_params):
    seed, est, out = feasible_instance(default_params)
    worst = max(sdr_constraint_violation(out, est, sample_error(1000 + i, est), default_params) for i in range(50))
    assert worst <= 1e-6


def test_algorithm1_rank_one_matches_bound(default_params):
    seed, est, out = feasible_instance(default_params)
    assert out.rank_ratio.max() <= 1e-6
    sol = algorithm1(est, default_params)
    assert sol.meta["rank_one"]
    assert sol.objective == pytest.approx(out.objective, rel=1e-4)
    assert sol.objective >= out.objective - 1e-6


def test_bound_monotone_in_eta():
    p = SystemParams.from_config({"K": 2, "eta": 0.05})
    for seed in range(3):
        est = generate_channels(seed, p)
        a = solve_sdr(est, p).objective
        b = solve_sdr(est.with_eta(0.1), p.with_eta(0.1)).objective
        assert b >= a - 1e-7 * max(1.0, a)


def test_unequal_antennas():
    p = SystemParams(K=3, N=(2, 3, 4), gamma=10, psi=10**0.5, xi=1, sigma2=1e-3, omega2=1e-2, eta=0.1)
    est = generate_channels(2, p)
    sol = algorithm1(est, p)
    assert [v.size for v in sol.f] == [2, 3, 4]


def test_zero_radius_links_use_scalar_constraints():
    p = SystemParams.from_config({"K": 2, "eta": [[0.0, 0.1], [0.1, 0.0]]})
    prog = build_robust_sdp(generate_channels(0, p), p)
    assert prog.count("psd", "U") == 0 and prog.count("psd", "X") == 0
    assert prog.count("nonneg", "U") == 2 and prog.count("psd", "V") == 2
