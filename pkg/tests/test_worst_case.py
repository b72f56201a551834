import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from robust_swipt.model import InvalidInput, Solution, SystemParams, all_harvested, all_sinr, generate_channels, sample_error
from robust_swipt.worst_case import (
    brute_force_worst,
    coefficients,
    lagrange_worst_eh,
    worst_error_max,
    worst_error_min,
)

H = np.array([1 + 0.5j, -0.3 + 0.2j, 0.7 - 1j])
F = np.array([0.4 - 0.1j, 1.2 + 0.3j, -0.5 + 0.8j])

# extreme amplitudes from the sampling + projected-gradient oracle (5000 samples, 2000 steps)
ORACLE = {
    0.1: (1.0779760425691656, 1.399845581357787),
    0.5: (0.4342369649919222, 2.0435846589350306),
    2.0: (0.0, 4.4576061998496925),
}


@pytest.mark.parametrize("eta", sorted(ORACLE))
def test_closed_forms_match_frozen_oracle(eta):
    lo, hi = ORACLE[eta]
    e, mn = worst_error_min(H, F, eta)
    _, mx = worst_error_max(H, F, eta)
    assert mn == pytest.approx(lo, abs=1e-9)
    assert mx == pytest.approx(hi, rel=1e-9)
    assert abs(np.vdot(H + e, F)) == pytest.approx(lo, abs=1e-9)
    assert np.linalg.norm(e) <= eta + 1e-12


def test_closed_form_reference_values():
    c = abs(np.vdot(H, F))
    nf = np.linalg.norm(F)
    assert worst_error_min(H, F, 0.1)[1] == pytest.approx(c - 0.1 * nf)
    assert worst_error_max(H, F, 0.1)[1] == pytest.approx(c + 0.1 * nf)


def _instance(seed, n):
    rng = np.random.default_rng(seed)
    h = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    f = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return h, f


@given(st.integers(0, 10_000), st.sampled_from([1, 2, 4, 8]), st.floats(0.0, 3.0))
def test_worst_errors_feasible_and_extreme(seed, n, eta):
    h, f = _instance(seed, n)
    e_min, mn = worst_error_min(h, f, eta)
    e_max, mx = worst_error_max(h, f, eta)
    assert np.linalg.norm(e_min) <= eta * (1 + 1e-12) + 1e-15
    assert np.linalg.norm(e_max) <= eta * (1 + 1e-12) + 1e-15
    assert abs(np.vdot(h + e_max, f)) == pytest.approx(mx, rel=1e-9)
    # random feasible errors never beat the extremes
    rng = np.random.default_rng(seed)
    for _ in range(20):
        d = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        e = eta * rng.random() * d / np.linalg.norm(d)
        a = abs(np.vdot(h + e, f))
        assert mn - 1e-9 <= a <= mx + 1e-9


@given(st.integers(0, 10_000), st.sampled_from([2, 4, 8]), st.floats(0.01, 3.0))
def test_lagrange_point_is_stationary_minimum(seed, n, eta):
    h, f = _instance(seed, n)
    e, tau, power = lagrange_worst_eh(h, f, eta)
    _, mn = worst_error_min(h, f, eta)
    assert power == pytest.approx(mn**2, rel=1e-9, abs=1e-12)
    assert np.linalg.norm(e) <= eta * (1 + 1e-9)
    assert tau >= 0
    if tau > 0:
        # stationarity (f f^H + tau I) e = -f f^H h
        lhs = np.outer(f, f.conj()) @ e + tau * e
        np.testing.assert_allclose(lhs, -np.outer(f, f.conj()) @ h, atol=1e-8 * np.linalg.norm(h) * np.linalg.norm(f) ** 2)


def test_lagrange_uses_minimising_sign():
    e, tau, power = lagrange_worst_eh(H, F, 0.1)
    assert power < abs(np.vdot(H, F)) ** 2
    assert tau > 0


def test_zero_radius_and_zero_beamformer():
    e, mn = worst_error_min(H, F, 0.0)
    assert mn == pytest.approx(abs(np.vdot(H, F)))
    assert np.all(e == 0)
    assert lagrange_worst_eh(H, F, 0.0)[1] == np.inf
    assert worst_error_max(H, np.zeros(3), 0.3)[1] == 0.0
    with pytest.raises(InvalidInput):
        worst_error_min(H, F[:2], 0.1)
    with pytest.raises(InvalidInput):
        brute_force_worst(H, F, 0.1, mode="median")


@pytest.mark.parametrize("n", [2, 4])
def test_brute_force_agrees_on_random_instances(n):
    for seed in range(5):
        h, f = _instance(seed, n)
        eta = 0.3
        assert brute_force_worst(h, f, eta, "max", seed=seed) == pytest.approx(worst_error_max(h, f, eta)[1], rel=1e-6)
        assert brute_force_worst(h, f, eta, "min", seed=seed) == pytest.approx(worst_error_min(h, f, eta)[1], rel=1e-6, abs=1e-9)


def test_coefficients_bound_sampled_link_powers():
    p = SystemParams.from_config({"K": 3, "eta": 0.2})
    est = generate_channels(0, p)
    rng = np.random.default_rng(1)
    f = [rng.standard_normal(4) + 1j * rng.standard_normal(4) for _ in range(3)]
    c = coefficients(f, est, p)
    sol = Solution(f, [0.5, 0.5, 0.5])
    s_worst = all_sinr(sol, est, c.sinr_errors(), p)
    e_worst = all_harvested(sol, est, c.eh_errors(), p)
    for i in range(50):
        err = sample_error(i, est)
        assert np.all(all_sinr(sol, est, err, p) >= s_worst - 1e-9)
        assert np.all(all_harvested(sol, est, err, p) >= e_worst - 1e-9)
    assert np.all(c.u <= c.u_tilde + np.eye(3) * 1e9)
    assert np.all(np.diag(c.u_tilde) == 0)
