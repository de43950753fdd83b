import math

import numpy as np
import pytest

from curvcone import CurvatureOperator, equality_witness, ricci, verify_identity, verify_inequality
from curvcone.errors import InvalidArgumentError, UnsupportedError
from curvcone.identities import (IDENTITIES, INEQUALITIES, qw_constant, self_dual_weyl4,
                                 tracefree_cubic_slack)
from curvcone.hamilton import q_of, sharp


def test_catalogue_names():
    assert set(IDENTITIES) == {"bw_ric", "ricci_type_q", "ricci_type_q_weyl", "ricci_type_q_ric",
                               "huisken_tri", "ric_qr_pairing", "q_block"}
    assert set(INEQUALITIES) == {"tracefree_eigen", "tracefree_cubic", "ric0_wedge_weyl", "qw_cubic"}


@pytest.mark.parametrize("name", sorted(IDENTITIES))
def test_identity_small(name):
    res = verify_identity(name, trials=20, seed=1, dims=(4, 6))
    assert res.passed, (name, res.value)
    assert res.max_residual <= 1e-10
    assert res.per_dim.keys() == {4, 6}


@pytest.mark.parametrize("name", sorted(INEQUALITIES))
def test_inequality_small(name):
    res = verify_inequality(name, trials=200, seed=1, dims=(4, 5, 9))
    assert res.passed, (name, res.value)
    assert res.min_slack >= -1e-11


@pytest.mark.parametrize("name", ["ricci_type_q", "ricci_type_q_weyl", "ricci_type_q_ric", "q_block"])
def test_negative_controls_fire(name):
    res = verify_identity(name, trials=10, seed=0, dims=(5,))
    assert res.control is not None and res.control > 1e-6


def test_bw_identity_on_identity():
    n = 6
    I = CurvatureOperator.identity(n)
    assert (I + sharp(I, I)).allclose((n - 1) * I, atol=1e-13)
    assert q_of(I).allclose((n - 1) * I, atol=1e-13)


def test_unknown_names():
    with pytest.raises(InvalidArgumentError, match="bw_ric"):
        verify_identity("nope", 1)
    with pytest.raises(InvalidArgumentError):
        verify_inequality("nope", 1)
    with pytest.raises(UnsupportedError):
        equality_witness("qw_cubic", 4)


def test_witness_m3():
    T = equality_witness("tracefree_cubic", 3)
    np.testing.assert_allclose(np.diag(T), [-1 / math.sqrt(6), -1 / math.sqrt(6), math.sqrt(2 / 3)], atol=1e-15)
    assert abs(np.trace(T @ T @ T)) == pytest.approx(1 / math.sqrt(6), rel=1e-14)


@pytest.mark.parametrize("m", [2, 3, 5, 8])
def test_witness_is_extremal(m):
    T = equality_witness("tracefree_cubic", m)
    assert abs(np.trace(T)) <= 1e-15
    assert abs(np.linalg.norm(T) - 1) <= 1e-15
    assert tracefree_cubic_slack(T) <= 1e-12


def test_qw_constants():
    assert qw_constant(4) == pytest.approx(math.sqrt(6) / 2)
    assert qw_constant(7) == pytest.approx(math.sqrt(48 * 5 / 7))


def test_self_dual_weyl_is_sharp_at_n4():
    W = CurvatureOperator.from_matrix(self_dual_weyl4())
    assert np.abs(ricci(W)).max() < 1e-15
    ratio = abs(float(np.sum(q_of(W).mat * W.mat))) / W.norm() ** 3
    assert ratio == pytest.approx(math.sqrt(6) / 2, rel=1e-12)
