import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from robust_swipt.model import (
    ChannelEstimate,
    ErrorRealization,
    InvalidInput,
    Solution,
    SystemParams,
    all_harvested,
    all_sinr,
    dbm_to_mw,
    generate_channels,
    harvested_power,
    link_powers,
    mw_to_dbm,
    sample_error,
    sinr,
)


def test_unit_conversions():
    assert dbm_to_mw(0.0) == 1.0
    assert dbm_to_mw(-30.0) == pytest.approx(1e-3)
    assert mw_to_dbm(dbm_to_mw(5.0)) == pytest.approx(5.0)
    with pytest.raises(InvalidInput):
        mw_to_dbm(0.0)


def test_defaults_from_config():
    p = SystemParams.from_config({"K": 3})
    assert p.N == (4, 4, 4)
    np.testing.assert_allclose(p.gamma, 10.0)
    np.testing.assert_allclose(p.psi, 10 ** 0.5)
    np.testing.assert_allclose(p.sigma2, 1e-3)
    np.testing.assert_allclose(p.omega2, 1e-2)
    np.testing.assert_allclose(p.eta, 0.1)


@pytest.mark.parametrize(
    "kw",
    [
        {"K": 0},
        {"K": 2, "N": [4]},
        {"K": 2, "eta": -0.1},
        {"K": 2, "xi": 1.5},
        {"K": 2, "eta": np.ones((3, 3))},
    ],
)
def test_invalid_params(kw):
    with pytest.raises(InvalidInput):
        SystemParams.from_config(kw)


def test_missing_field():
    with pytest.raises(InvalidInput):
        SystemParams.from_config({"N": 4})


def test_channels_deterministic_and_shaped():
    p = SystemParams(K=3, N=(2, 3, 4), gamma=10, psi=1, xi=1, sigma2=1e-3, omega2=1e-2, eta=0.1)
    a = generate_channels(5, p)
    b = generate_channels(5, p)
    for k in range(3):
        for j in range(3):
            assert a.hhat[k][j].shape == (p.N[j],)
            np.testing.assert_array_equal(a.hhat[k][j], b.hhat[k][j])
    assert a.N == (2, 3, 4)
    a.check(p)


def test_estimate_rejects_inconsistent_dims():
    with pytest.raises(InvalidInput):
        ChannelEstimate([[np.ones(2), np.ones(3)], [np.ones(3), np.ones(3)]], 0.1)


@given(st.integers(0, 10_000), st.floats(0.0, 2.0))
def test_sampled_errors_stay_in_ball(seed, eta):
    p = SystemParams(K=2, N=3, gamma=1, psi=1, xi=1, sigma2=1, omega2=1, eta=eta)
    est = generate_channels(seed, p)
    err = sample_error(seed + 1, est)
    assert np.all(err.norms() <= eta * (1 + 1e-12))


def test_sinr_and_eh_formulas():
    h = np.array([[1.0 + 0j, 0.0], [0.5, 2.0]])
    est = ChannelEstimate([[h[0, :1], h[0, 1:]], [h[1, :1], h[1, 1:]]], 0.0)
    sol = Solution([np.array([2.0 + 0j]), np.array([1.0 + 0j])], [0.5, 0.25])
    p = SystemParams(K=2, N=1, gamma=1, psi=1, xi=0.5, sigma2=0.1, omega2=0.2, eta=0.0)
    P = link_powers(sol, est)
    np.testing.assert_allclose(P, [[4.0, 0.0], [1.0, 4.0]])
    zero = ErrorRealization.zeros(est)
    # user 0: rho=0.5, desired 4, interference 0
    assert sinr(sol, est, zero, p, 0) == pytest.approx(0.5 * 4 / (0.5 * 0.1 + 0.2))
    assert sinr(sol, est, zero, p, 1) == pytest.approx(0.25 * 4 / (0.25 * 1.1 + 0.2))
    assert harvested_power(sol, est, zero, p, 1) == pytest.approx(0.5 * 0.75 * 5.1)
    np.testing.assert_allclose(all_sinr(sol, est, zero, p), [sinr(sol, est, zero, p, k) for k in range(2)])
    np.testing.assert_allclose(all_harvested(sol, est, zero, p), [harvested_power(sol, est, zero, p, k) for k in range(2)])


def test_solution_objective_and_scaling():
    sol = Solution([np.array([1.0, 1.0j]), np.array([2.0])], [0.5, 0.5])
    assert sol.objective == pytest.approx(6.0)
    s2 = sol.scaled([4.0, 1.0])
    assert s2.objective == pytest.approx(12.0)
    with pytest.raises(InvalidInput):
        Solution([np.ones(2)], [1.5])


def test_scenario_json_roundtrip(tmp_path):
    from robust_swipt.serialize import load_scenario, save_solution, load_solution

    path = tmp_path / "s.json"
    path.write_text(json.dumps({"K": 2, "N": 3, "seed": 4, "eta": 0.05}))
    params, est = load_scenario(path)
    assert params.K == 2 and est.N == (3, 3)
    sol = Solution([np.array([1 + 2j, 0, 1j]), np.array([0.5, 0.5, 0.5])], [0.3, 0.7])
    save_solution(sol, tmp_path / "sol.json")
    back = load_solution(tmp_path / "sol.json")
    for a, b in zip(sol.f, back.f):
        np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(sol.rho, back.rho)
