import numpy as np
import pytest

from quatutv.errors import BadRank, DimensionMismatch
from quatutv.qfactor import qsvd
from quatutv.qmatrix import QMatrix, diag, frobenius
from quatutv.qtensor import (QTensor, TransformSpec, apply_transform, identity_tensor, is_unitary, qt_product,
                             qt_conj_transpose)
from quatutv.sketch import SketchParams, cor_qurv
from quatutv.synthetic import inverse_square, random_unitary, tensor_low_rank_product, tensor_with_spectrum
from quatutv.tensor_utv import cor_qturv, qtulv, qturv, tqt_rank, tqt_svd, truncate_tqt
from quatutv.utv import qurv

DCT3 = TransformSpec.dct((6,))


def rel(a, b):
    return (a - b).frobenius() / a.frobenius()


def hat_slices(t, spec):
    return apply_transform(t, spec).slices()


@pytest.mark.parametrize("fn", [qturv, qtulv, tqt_svd])
def test_factorization_and_structure(fn):
    a = QTensor.random(20, 15, 6, seed=1)
    f = fn(a, DCT3)
    assert rel(a, f.reconstruct()) <= 1e-10
    assert is_unitary(f.U, DCT3) and is_unitary(f.V, DCT3)
    for s in hat_slices(f.T, DCT3):
        upper = np.triu(np.ones(s.shape, bool), 1)
        lower = np.tril(np.ones(s.shape, bool), -1)
        if f.kind in ("URV", "SVD"):
            assert np.all(np.abs(s.data[lower]) <= 1e-13)
        if f.kind in ("ULV", "SVD"):
            assert np.all(np.abs(s.data[upper]) <= 1e-13)
        if f.kind == "SVD":
            d = s.data[np.arange(15), np.arange(15)]
            assert np.all(np.abs(d[:, 1:]) <= 1e-13) and np.all(d[:, 0] >= -1e-13)


def test_identity_tensor_input():
    spec = TransformSpec.dct((3,))
    eye = identity_tensor(4, spec)
    f = qturv(eye, spec)
    np.testing.assert_allclose(f.T.data, eye.data, atol=1e-14)


def test_higher_order_tensor():
    spec = TransformSpec.dct((3, 2))
    a = QTensor.random(5, 4, 3, 2, seed=2)
    f = qturv(a, spec)
    assert rel(a, f.reconstruct()) <= 1e-10
    assert rel(a, truncate_tqt(f, 4)) <= 1e-10


def test_spec_mismatch():
    with pytest.raises(DimensionMismatch):
        qturv(QTensor.random(3, 3, 4, seed=0), DCT3)


def test_exact_tqt_rank_capture():
    a = tensor_low_rank_product(60, 60, (10,), 8, seed=3)
    f = qturv(a)
    assert rel(a, truncate_tqt(f, 8)) <= 1e-8
    res = [rel(a, truncate_tqt(f, k)) for k in range(1, 21)]
    assert np.all(np.diff(res) <= 1e-12)
    assert tqt_rank(a)[0] == 8


def test_tqt_svd_single_slice_matches_qsvd():
    a = QTensor.random(6, 5, 1, seed=4)
    spec = TransformSpec.identity((1,))
    f = tqt_svd(a, spec)
    np.testing.assert_allclose(f.T.data[np.arange(5), np.arange(5), 0, 0], qsvd(a.slice(0)).sigma, atol=1e-12)


def test_tqt_svd_recovers_inverse_square_diagonal():
    n, frames = 12, 4
    spec = TransformSpec.dct((frames,))
    sig = inverse_square(n)
    u = QTensor.from_slices([random_unitary(n, seed=s) for s in range(frames)], (frames,))
    v = QTensor.from_slices([random_unitary(n, seed=10 + s) for s in range(frames)], (frames,))
    u, v = (apply_transform(t, spec, "inverse") for t in (u, v))
    d = QTensor.from_slices([diag(sig)] * frames, (frames,))
    a = qt_product(qt_product(u, d, spec), qt_conj_transpose(v, spec), spec)
    f = tqt_svd(a, spec)
    for s in range(frames):
        got = f.T.data[np.arange(n), np.arange(n), s, 0]
        np.testing.assert_allclose(got, sig, atol=1e-9)


def test_svd_truncation_beats_urv():
    spec = TransformSpec.dct((5,))
    st = tensor_with_spectrum(30, 30, (5,), inverse_square(30), spec, seed=5)
    urv, svd = qturv(st.A, spec), tqt_svd(st.A, spec)
    for k in range(1, 21):
        assert rel(st.A, truncate_tqt(svd, k)) <= rel(st.A, truncate_tqt(urv, k)) + 1e-12


def test_tqt_rank_edge_cases():
    spec = TransformSpec.dct((3,))
    assert tqt_rank(QTensor.zeros(4, 4, 3), spec)[0] == 0
    assert tqt_rank(identity_tensor(5, spec), spec)[0] == 5


def test_tqt_rank_unitary_invariance():
    spec = TransformSpec.dct((4,))
    a = tensor_low_rank_product(10, 9, (4,), 3, spec, seed=6)
    u = qturv(QTensor.random(10, 10, 4, seed=7), spec).U
    assert tqt_rank(qt_product(u, a, spec), spec)[0] == 3


def test_dimensional_collapse():
    a2 = QMatrix.random(7, 5, 8)
    a = QTensor(a2.data[:, :, None, :])
    spec = TransformSpec.identity((1,))
    t = qturv(a, spec)
    m = qurv(a2)
    np.testing.assert_allclose(t.T.data[:, :, 0], m.T.data, atol=1e-11)
    np.testing.assert_allclose(t.U.data[:, :, 0], m.U.data, atol=1e-11)
    np.testing.assert_allclose(t.V.data[:, :, 0], m.V.data, atol=1e-11)
    s = tqt_svd(a, spec)
    np.testing.assert_allclose(s.T.data[np.arange(5), np.arange(5), 0, 0], qsvd(a2).sigma, atol=1e-11)
    params = SketchParams(4, 1, 2)
    np.testing.assert_allclose(cor_qturv(a, params, spec).approx().data[:, :, 0],
                               cor_qurv(a2, params).approx().data, atol=1e-11)


def test_cor_qturv_shapes_and_capture():
    a = tensor_low_rank_product(40, 30, (5,), 8, seed=9)
    f = cor_qturv(a, SketchParams(12, 0, 1))
    assert f.U.dims == (40, 12, 5) and f.R.dims == (12, 12, 5) and f.V.dims == (30, 12, 5)
    assert rel(a, f.approx()) <= 1e-7
    assert rel(a, truncate_tqt(f, 8)) <= 1e-7
    spec = f.spec
    uh_u = qt_product(qt_conj_transpose(f.U, spec), f.U, spec)
    assert (uh_u - identity_tensor(12, spec)).frobenius() <= 1e-10 * np.sqrt(12 * 5)


def test_cor_qturv_power_iteration():
    st = tensor_with_spectrum(60, 60, (8,), inverse_square(60), seed=10)
    med = [np.median([rel(st.A, cor_qturv(st.A, SketchParams(20, p, s)).approx()) for s in range(10)])
           for p in (0, 2)]
    assert med[1] <= med[0]


def test_truncate_tqt_rank_bounds():
    f = qturv(QTensor.random(4, 3, 2, seed=11))
    with pytest.raises(BadRank):
        truncate_tqt(f, 4)
    with pytest.raises(BadRank):
        truncate_tqt(cor_qturv(QTensor.random(6, 5, 2, seed=12), SketchParams(3)), 4)
