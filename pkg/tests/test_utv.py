import numpy as np
import pytest

from quatutv.errors import BadRank
from quatutv.qfactor import qqrcp, qsvd, truncate_svd
from quatutv.qmatrix import QMatrix, frobenius, is_unitary
from quatutv.synthetic import low_rank_product
from quatutv.utv import ULV, URV, diagonal_moduli, qulv, qurv, truncate_qqrcp, truncate_utv


def rel(a, b):
    return frobenius(a - b) / frobenius(a)


def strict_lower_mask(m, n):
    return np.tril(np.ones((m, n), bool), -1)


@pytest.mark.parametrize("fn", [qurv, qulv])
def test_identity(fn):
    f = fn(QMatrix.identity(5))
    np.testing.assert_allclose(f.T.data, QMatrix.identity(5).data, atol=1e-15)


@pytest.mark.parametrize("shape", [(40, 30), (30, 40), (12, 12)])
def test_qurv_factorization(shape):
    a = QMatrix.random(*shape, seed=shape[0])
    f = qurv(a)
    assert f.kind == URV
    assert f.U.shape == (shape[0], shape[0]) and f.T.shape == shape and f.V.shape == (shape[1], shape[1])
    assert rel(a, f.reconstruct()) <= 1e-11
    assert is_unitary(f.U) and is_unitary(f.V)
    assert np.all(f.T.data[strict_lower_mask(*shape)] == 0.0)
    d = diagonal_moduli(f.T)
    assert np.all(np.diff(d) <= 1e-12 * d[0])


@pytest.mark.parametrize("shape", [(30, 40), (40, 30)])
def test_qulv_factorization(shape):
    a = QMatrix.random(*shape, seed=shape[1])
    f = qulv(a)
    assert f.kind == ULV
    assert rel(a, f.reconstruct()) <= 1e-11
    assert is_unitary(f.U) and is_unitary(f.V)
    assert np.all(f.T.data[np.triu(np.ones(shape, bool), 1)] == 0.0)


def test_qurv_reveals_rank():
    a = low_rank_product(40, 30, 10, seed=1)
    d = diagonal_moduli(qurv(a).T)
    assert d[10] <= 1e-9 * d[0]


def test_ulv_is_dual_to_urv():
    a = QMatrix.random(9, 7, 2)
    lower = qulv(a).T
    upper = qurv(a.H).T
    np.testing.assert_allclose(diagonal_moduli(lower), diagonal_moduli(upper.H), rtol=1e-10)


@pytest.mark.parametrize("fn", [qurv, qulv])
def test_thin_variant_gives_same_truncations(fn):
    a = QMatrix.random(20, 14, 3)
    full, thin = fn(a), fn(a, thin=True)
    assert thin.U.cols == 14 and thin.V.cols == 14
    assert rel(a, thin.reconstruct()) <= 1e-11
    for k in (1, 5, 14):
        np.testing.assert_allclose(truncate_utv(full, k).data, truncate_utv(thin, k).data, atol=1e-11)


def test_truncation_rank_bounds():
    f = qurv(QMatrix.random(5, 4, 4))
    with pytest.raises(BadRank):
        truncate_utv(f, 0)
    with pytest.raises(BadRank):
        truncate_utv(f, 5)
    with pytest.raises(BadRank):
        truncate_qqrcp(qqrcp(QMatrix.random(5, 4, 4)), 5)


@pytest.mark.parametrize("fn", [qurv, qulv])
def test_full_rank_truncation_is_exact(fn):
    a = QMatrix.random(12, 9, 5)
    assert rel(a, truncate_utv(fn(a), 9)) <= 1e-10


def test_exact_rank_capture():
    a = low_rank_product(30, 25, 6, seed=6)
    for f in (qurv(a), qulv(a)):
        assert rel(a, truncate_utv(f, 6)) <= 1e-9
    assert rel(a, truncate_qqrcp(qqrcp(a), 6)) <= 1e-9


def test_monotone_sweep_and_svd_optimality():
    a = low_rank_product(200, 200, 40, seed=7)
    urv, svd = qurv(a), qsvd(a)
    prev = np.inf
    for k in range(10, 101, 10):
        re = rel(a, truncate_utv(urv, k))
        assert re <= prev + 1e-12
        assert rel(a, truncate_svd(svd, k)) <= re + 1e-12
        prev = re
