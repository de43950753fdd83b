import numpy as np
import pytest

import oracles
from curvcone import (CurvatureOperator, decompose, from_tensor, lambda_bar, random_curvature,
                      ricci, rotate, scalar, to_tensor, wedge)
from curvcone.curvature import random_orthogonal
from curvcone.errors import InvalidArgumentError, UnsupportedDimensionError


def _rand(n, rng):
    return CurvatureOperator(n, oracles.random_operator(n, rng))


@pytest.mark.parametrize("n", [3, 4, 6, 9])
def test_identity_norm(n):
    I = wedge(np.eye(n), np.eye(n))
    assert I.norm() ** 2 == pytest.approx(n * (n - 1) / 2, rel=1e-15)
    np.testing.assert_array_equal(I.mat, np.eye(n * (n - 1) // 2))


def test_wedge_matches_index_formula(rng):
    n = 5
    A, B = rng.standard_normal((2, n, n))
    A, B = A + A.T, B + B.T
    np.testing.assert_allclose(wedge(A, B).mat, oracles.wedge(A, B), atol=1e-13)
    np.testing.assert_allclose(wedge(A, B).mat, wedge(B, A).mat, atol=1e-13)


@pytest.mark.parametrize("n", [4, 7])
def test_ricci_of_traceless_wedge(n, rng):
    A = rng.standard_normal((n, n))
    A = A + A.T
    A -= np.trace(A) / n * np.eye(n)
    np.testing.assert_allclose(ricci(wedge(A, np.eye(n))), (n - 2) / 2 * A, atol=1e-12)


def test_ricci_and_norm_oracles(rng):
    R = _rand(6, rng)
    np.testing.assert_allclose(ricci(R), oracles.ricci(R.tensor), atol=1e-12)
    assert R.norm() ** 2 == pytest.approx(oracles.norm_sq(R.tensor), rel=1e-13)
    assert scalar(R) == pytest.approx(6 * lambda_bar(R))


def test_tensor_roundtrip(rng):
    R = _rand(5, rng)
    T = to_tensor(R)
    assert np.abs(oracles.bianchi(T)).max() < 1e-12
    assert from_tensor(T).allclose(R)


def test_from_tensor_rejects_bianchi_violation():
    n = 4
    T = np.zeros((n,) * 4)
    # pair-symmetric but totally antisymmetric: violates Bianchi
    for perm, sign in [((0, 1, 2, 3), 1), ((1, 0, 2, 3), -1), ((0, 1, 3, 2), -1), ((1, 0, 3, 2), 1),
                       ((2, 3, 0, 1), 1), ((3, 2, 0, 1), -1), ((2, 3, 1, 0), -1), ((3, 2, 1, 0), 1)]:
        T[perm] = sign
    with pytest.raises(InvalidArgumentError, match="Bianchi"):
        from_tensor(T)


def test_from_matrix_checks_bianchi():
    mat = np.zeros((6, 6))
    mat[0, 5] = mat[5, 0] = 1.0          # R_1234 alone
    with pytest.raises(InvalidArgumentError):
        CurvatureOperator.from_matrix(mat)
    with pytest.raises(InvalidArgumentError):
        CurvatureOperator(5, np.eye(6))


@pytest.mark.parametrize("n", range(4, 13))
def test_decomposition_invariants(n, rng):
    R = _rand(n, rng)
    p = decompose(R)
    assert p.reassemble().allclose(R, atol=1e-12 * R.norm())
    a, b, c = p.part_norms
    assert a * a + b * b + c * c == pytest.approx(R.norm() ** 2, rel=1e-12)
    for x, y in [(p.scalar_part, p.ric0_part), (p.scalar_part, p.weyl_part), (p.ric0_part, p.weyl_part)]:
        assert abs(x.inner(y)) < 1e-12 * R.norm() ** 2
    assert np.abs(ricci(p.weyl_part)).max() < 1e-12 * R.norm()


def test_decomposition_matches_kulkarni_nomizu(rng):
    R = _rand(6, rng)
    p = decompose(R)
    t_i, t_r, t_w = oracles.parts(R.tensor)
    np.testing.assert_allclose(p.scalar_part.tensor, t_i, atol=1e-12)
    np.testing.assert_allclose(p.ric0_part.tensor, t_r, atol=1e-12)
    np.testing.assert_allclose(p.weyl_part.tensor, t_w, atol=1e-12)


def test_random_curvature_spec():
    R = random_curvature(6, seed=3, spec=(0, 1, 0))
    p = decompose(R)
    assert p.weyl_part.norm() < 1e-10
    assert p.ric0_part.norm() == pytest.approx(1.0)
    R2 = random_curvature(6, seed=3, spec=(2, 0.5, 1.5))
    np.testing.assert_allclose(decompose(R2).part_norms, (2, 0.5, 1.5), rtol=1e-12)


def test_random_curvature_deterministic():
    a = random_curvature(7, seed=11)
    b = random_curvature(7, seed=11)
    assert np.array_equal(a.mat, b.mat)
    assert not np.array_equal(a.mat, random_curvature(7, seed=12).mat)


def test_random_curvature_rejects():
    with pytest.raises(UnsupportedDimensionError):
        random_curvature(3, seed=0)
    with pytest.raises(InvalidArgumentError):
        random_curvature(5, seed=0, spec=(1, -1, 0))


def test_rotate_equivariance(rng):
    n = 6
    R = _rand(n, rng)
    s, t = random_orthogonal(n, rng), random_orthogonal(n, rng)
    # pull-back action composes in the order s then t
    assert rotate(rotate(R, s), t).allclose(rotate(R, s @ t), atol=1e-12 * R.norm())
    Rs = rotate(R, s)
    np.testing.assert_allclose(ricci(Rs), s.T @ ricci(R) @ s, atol=1e-12)
    np.testing.assert_allclose(decompose(Rs).part_norms, decompose(R).part_norms, rtol=1e-12)
    with pytest.raises(InvalidArgumentError):
        rotate(R, 2 * np.eye(n))


def test_dimension_mismatch(rng):
    with pytest.raises(InvalidArgumentError):
        _rand(4, rng) + _rand(5, rng)
