import itertools
import math

import numpy as np
import pytest

import oracles
from curvcone import (ConeSpec, CurvatureOperator, bundle_norm_report, choose_tau, cone_margin,
                      decompose, e_operator, epsilon_n, kahler_decompose, lift, lift_general,
                      member, pinching_check, pinching_implies_cone, ricci, sample_boundary, star)
from curvcone.errors import DomainError, InvalidArgumentError, UnsupportedDimensionError
from curvcone.kahler import (KahlerCurvatureOperator, KahlerFieldSample, complex_norm_sq, j_matrix,
                             pinching_coefficients, probe_margin, random_kahler, random_unitary,
                             resolve_pinch_a, rotate_kahler, sample_pinched, tau_from_lambda0)
from curvcone.rng import substream


def _e_by_loops(m):
    n, J = 2 * m, j_matrix(m)
    d = np.eye(n)
    E = np.zeros((n,) * 4)
    for i, j, k, l in itertools.product(range(n), repeat=4):
        E[i, j, k, l] = 0.5 * (d[i, k] * d[j, l] - d[i, l] * d[j, k] + J[i, k] * J[j, l]
                               - J[i, l] * J[j, k] + 2 * J[i, j] * J[k, l])
    return E


def _rk(m, seed=0, norms=(1.0, 0.7, 0.5)):
    return random_kahler(m, substream(seed, "test-kahler", m), norms)


def test_j_convention():
    J = j_matrix(2)
    np.testing.assert_array_equal(J @ np.eye(4)[:, 0], np.eye(4)[:, 2])
    np.testing.assert_array_equal(J @ J, -np.eye(4))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_star_id_id_is_e(m):
    E = e_operator(m)
    np.testing.assert_allclose(star(np.eye(m), np.eye(m)).tensor, E.tensor, atol=1e-13)
    np.testing.assert_allclose(E.tensor, _e_by_loops(m), atol=0)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_e_spectrum_and_ricci(m):
    E = e_operator(m)
    ev = np.sort(np.linalg.eigvalsh(E.riemannian.mat))[::-1]
    expected = [m + 1] + [1] * (m * m - 1) + [0] * (m * (m - 1))
    np.testing.assert_allclose(ev, expected, atol=1e-10)
    np.testing.assert_allclose(E.ricci(), (m + 1) * np.eye(2 * m), atol=1e-13)
    assert E.lambda_bar == pytest.approx(m + 1)
    assert E.norm() ** 2 == pytest.approx(2 * m * (m + 1))


def test_e_m1_eigenvector():
    E = e_operator(1)
    assert E.riemannian.mat[0, 0] == pytest.approx(2.0)


def test_star_zero_and_hermitian_gate():
    A = np.array([[1.0, 1j], [-1j, 2.0]])
    assert np.abs(star(A, np.zeros((2, 2))).tensor).max() == 0.0
    with pytest.raises(InvalidArgumentError):
        star(np.array([[0, 1.0], [0, 0]]), np.eye(2))


def test_kahler_tensor_checks():
    T = oracles.tensor_from_mat(np.eye(6), 4)     # round sphere is not Kähler
    with pytest.raises(InvalidArgumentError):
        KahlerCurvatureOperator.from_tensor(T, m=2)


@pytest.mark.parametrize("m", [2, 3])
def test_decomposition(m):
    E = e_operator(m)
    p = kahler_decompose(E)
    assert p.lambda_bar == pytest.approx(m + 1)
    assert p.k_ric0.norm() < 1e-13 and p.bochner.norm() < 1e-13
    for seed in range(5):
        K = _rk(m, seed, (2.0, 0.3, 0.8))
        parts = kahler_decompose(K)
        np.testing.assert_allclose(parts.norms_sq(), (4.0, 0.09, 0.64), rtol=1e-12)
        assert sum(parts.norms_sq()) == pytest.approx(K.norm() ** 2, rel=1e-12)
        assert complex_norm_sq(K) == pytest.approx(oracles.norm_sq(K.tensor), rel=1e-12)
        h = oracles.ricci(parts.bochner.tensor)
        assert np.abs(h).max() < 1e-12
        K.check()


def test_decomposition_needs_m2():
    with pytest.raises(UnsupportedDimensionError):
        kahler_decompose(e_operator(1))


def test_unitary_equivariance():
    m = 3
    K = _rk(m, 7)
    U = random_unitary(m, np.random.default_rng(2))
    left = kahler_decompose(rotate_kahler(K, U))
    right = kahler_decompose(K)
    for a, b in [(left.k_e, right.k_e), (left.k_ric0, right.k_ric0), (left.bochner, right.bochner)]:
        np.testing.assert_allclose(a.tensor, rotate_kahler(b, U).tensor, atol=1e-11)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_cp_lift_is_round(m):
    tau = 1.3
    R = lift((tau * tau / 2) * e_operator(m), tau)
    n = 2 * m + 1
    I = CurvatureOperator.identity(n)
    assert R.n == n
    assert np.linalg.norm(R.mat - tau * tau / 4 * I.mat) <= 1e-13 * I.norm()


def test_lift_e_norm():
    for m in (2, 3):
        R = lift(e_operator(m), math.sqrt(2))
        assert R.norm() ** 2 == pytest.approx(m * (2 * m + 1) / 4, rel=1e-13)


def test_lift_fiber_blocks():
    m, tau = 2, 0.9
    T = lift(_rk(m), tau).tensor
    f = 2 * m
    assert np.all(T[:f, :f, :f, f] == 0)
    np.testing.assert_array_equal(T[:f, f, :f, f], tau * tau / 4 * np.eye(f))
    assert np.abs(oracles.bianchi(T)).max() < 1e-12


def test_lift_traceless_ricci_identity():
    m, tau = 3, 1.1
    K = _rk(m, 4)
    R = lift(K, tau)
    ric_k = K.ricci() - K.lambda_bar * np.eye(2 * m)
    ric_r = decompose(R).ric0
    lhs = float(np.sum(ric_r ** 2))
    rhs = float(np.sum(ric_k ** 2)) + 2 * m / (2 * m + 1) * (K.lambda_bar - (m + 1) * tau ** 2 / 2) ** 2
    assert lhs == pytest.approx(rhs, rel=1e-11)


def test_lift_horizontal_ricci():
    m, tau = 2, 1.0
    K = 1.5 * e_operator(m) + _rk(m, 1, (0.0, 0.05, 0.05))
    R = lift(K, tau)
    ric_r = ricci(R)[: 2 * m, : 2 * m]
    np.testing.assert_allclose(K.ricci(), ric_r + tau * tau / 2 * np.eye(2 * m), atol=1e-12)


def test_lift_general_reduces_to_lift():
    m, tau = 2, 0.8
    K = _rk(m, 3)
    J = j_matrix(m)
    R1 = lift(K, tau)
    R2 = lift_general(K, 2 * J, np.zeros((2 * m,) * 3), tau / 2)
    np.testing.assert_allclose(R1.mat, R2.mat, atol=1e-14)


def test_lift_rejects_tau():
    with pytest.raises(InvalidArgumentError):
        lift(e_operator(2), 0.0)


def test_bundle_identities_e():
    for m in (2, 3):
        rep = bundle_norm_report(e_operator(m), math.sqrt(2))
        assert len(rep.identities) == 7
        assert rep.max_residual <= 1e-12


def test_bundle_identities_random():
    for seed in range(10):
        rep = bundle_norm_report(_rk(2, seed), 1.0)
        assert rep.passed and rep.max_residual <= 1e-11
    # printed unsquared variant does not hold in general
    assert rep.printed_ricci_part_residual > 1e-6


def test_bundle_identities_with_lambda0():
    K = _rk(3, 2, (3.0, 0.4, 0.4))
    lam0 = 0.9 * K.lambda_bar
    rep = bundle_norm_report(K, tau_from_lambda0(lam0, 3), lambda_bar_0=lam0)
    assert len(rep.identities) == 11 and rep.passed


def test_choose_tau_examples():
    m = 2
    E = e_operator(m)
    assert choose_tau(KahlerFieldSample.from_operators([E])) == pytest.approx(math.sqrt(2))
    a = (1 / (m + 1)) * E
    b = (3 / (m + 1)) * E
    field = KahlerFieldSample.from_operators([a, b])
    assert field.lambda_bar_0 == pytest.approx(2.0)
    assert choose_tau(field) == pytest.approx(2 / math.sqrt(m + 1))
    with pytest.raises(DomainError):
        tau_from_lambda0(0.0, m)
    with pytest.raises(InvalidArgumentError):
        KahlerFieldSample([(E, E.lambda_bar, 0.5)])


def test_pinching_coefficients_limit():
    m, a = 2, 1.1
    c_r, c_b, c_l, c_e = pinching_coefficients(m, a, 1e-12)
    assert c_r == pytest.approx((3 * m - 4) / 8 + a)
    assert c_b == pytest.approx((2 * m - 1) / 4 + a)
    assert c_e == pytest.approx((2 * m + 1 - 4 * a) / 4 * (2 * m + 1) / (8 * (m + 1)), rel=1e-10)
    _, _, c_l2, c_e2 = pinching_coefficients(m, a, 0.5)
    expect_l = m / (16 * (m + 1) ** 2) * ((12 * m * m - 13) + 4 * (6 * m + 5) * a + (2 * m + 1 - 4 * a) / 2 / 0.5)
    assert c_l2 == pytest.approx(expect_l)
    assert c_e2 == pytest.approx((2 * m + 1 - 4 * a) / 4 * (2 * m + 1) / (8 * (m + 1)) * (1 - 1 / (2 * m + 1)))


def test_pinching_e_holds():
    m = 2
    E = e_operator(m)
    holds, slack = pinching_check(E, None, E.lambda_bar, "theorem", 0.3)
    assert holds and slack > 0
    # at a = (2m+1)/4 both sides vanish
    holds, slack = pinching_check(E, None, E.lambda_bar, 1.25, 0.3)
    assert holds and abs(slack) < 1e-12


def test_pinching_theorem_a():
    eps5 = epsilon_n(5)
    assert resolve_pinch_a("theorem", 2) == pytest.approx(1.25 - eps5 / 2)
    with pytest.raises(InvalidArgumentError, match="a"):
        pinching_check(e_operator(2), None, 3.0, 1.25 - eps5, 0.3)
    with pytest.raises(InvalidArgumentError, match="eps"):
        pinching_check(e_operator(2), None, 3.0, "theorem", 3.0)
    # exploratory mode lifts the range restriction on a
    holds, _ = pinching_check(e_operator(2), None, 3.0, 0.5, 0.3, mode="exploratory")
    assert holds


def test_pinching_scalar_bound():
    m = 2
    a = resolve_pinch_a("theorem", m)
    rng = np.random.default_rng(5)
    for _ in range(200):
        K, lam0 = sample_pinched(m, a, 0.5, rng, rng.uniform(0, 1))
        holds, _ = pinching_check(K, None, lam0, a, 0.5)
        assert holds
        assert abs(K.lambda_bar - lam0) < (2 * m + 1) * K.lambda_bar


def test_pinching_implies_cone_small():
    rep = pinching_implies_cone(2, "theorem", 0.5, trials=100, seed=3)
    assert rep.ok and rep.in_hypothesis == 100
    assert rep.min_cone_slack >= 0 and rep.min_scalar > 0 and rep.min_gap >= -1e-12


def test_pinching_negative_control():
    rep = pinching_implies_cone(2, "theorem", 0.5, trials=50, seed=3, ratio_range=(1.5, 3.0))
    assert rep.out_of_hypothesis == 50 and rep.in_hypothesis == 0


def test_e_family_lifts_into_cone():
    m, n = 2, 5
    a = resolve_pinch_a("theorem", m)
    ops = [(s * e_operator(m), s * (m + 1)) for s in (0.3, 1.0, 4.0)]
    rep = pinching_implies_cone(m, a, 0.4, trials=3, operators=ops)
    assert rep.ok and rep.in_hypothesis == 3
    for K, lam0 in ops:
        R = lift(K, tau_from_lambda0(lam0, m))
        s = member(R, ConeSpec.omega(n, a)).slack
        assert s == pytest.approx((n - 4 * a) / 4 * R.norm() ** 2, rel=1e-12)


def test_cone_margin():
    n, a = 6, 1.2
    I = CurvatureOperator.identity(n)
    r = cone_margin(I, a)
    assert r > 0
    assert cone_margin(3 * I, a) == pytest.approx(3 * r, rel=1e-12)
    members, count = probe_margin(I, a, trials=300, seed=1)
    assert members == count
    B = sample_boundary(n, a, seed=2, theta=0.7)
    near = cone_margin(0.999 * B + 0.001 * I, a)
    far = cone_margin(0.5 * B + 0.5 * I, a)
    assert near < 0.05 * far
    members, count = probe_margin(0.5 * B + 0.5 * I, a, trials=300, seed=2)
    assert members == count
    with pytest.raises(DomainError):
        cone_margin(B + 0.1 * (B - I), a)
