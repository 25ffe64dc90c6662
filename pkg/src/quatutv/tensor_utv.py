"""Tensor UTV, TQt-SVD and randomized CoR-QTURV.

Every routine moves the tensor to the transform domain, factors each frontal
slice with its matrix counterpart and transforms the factors back. The
randomized variant draws a single test matrix shared by all slices.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadRank, DimensionMismatch
from .qfactor import qsvd, singular_values
from .qmatrix import QMatrix, diag
from .qtensor import QTensor, TransformSpec, apply_transform, default_spec, qt_conj_transpose, qt_product
from .sketch import SketchParams, _check_sketch_size, cor_core, draw_test_matrix
from .utv import ULV, URV, qulv, qurv

SVD = "SVD"
TUBE_RANK_RTOL = 1e-10


@dataclass(frozen=True)
class TensorUTVFactors:
    """``A = U * T * V^H`` under ``spec``; T is f-upper, f-lower or f-diagonal."""

    U: QTensor
    T: QTensor
    V: QTensor
    spec: TransformSpec
    kind: str

    def reconstruct(self) -> QTensor:
        return qt_product(qt_product(self.U, self.T, self.spec), qt_conj_transpose(self.V, self.spec), self.spec)

    @property
    def rank_bound(self) -> int:
        return min(self.U.dims[0], self.V.dims[0])


@dataclass(frozen=True)
class TensorCoRFactors:
    """``A ~ U * R * V^H`` with U (I1 x l x ...), R (l x l x ..., f-upper), V (I2 x l x ...)."""

    U: QTensor
    R: QTensor
    V: QTensor
    spec: TransformSpec
    params: SketchParams

    def approx(self) -> QTensor:
        return qt_product(qt_product(self.U, self.R, self.spec), qt_conj_transpose(self.V, self.spec), self.spec)

    @property
    def rank_bound(self) -> int:
        return self.R.dims[0]


def _resolve(a: QTensor, spec: TransformSpec | None) -> TransformSpec:
    if spec is None:
        return default_spec(a.tube_dims)
    if spec.tube_dims != a.tube_dims:
        raise DimensionMismatch(f"tube dims {a.tube_dims} do not match transform {spec.tube_dims}")
    return spec


def _slicewise(a: QTensor, spec: TransformSpec, factor):
    """Apply ``factor`` to each transform-domain slice; return original-domain tensors."""
    hat = apply_transform(a, spec)
    parts = [factor(s) for s in hat.slices()]
    out = []
    for mats in zip(*parts):
        t = QTensor.from_slices(mats, a.tube_dims)
        out.append(apply_transform(t, spec, "inverse"))
    return out


def qturv(a: QTensor, spec: TransformSpec | None = None) -> TensorUTVFactors:
    """Tensor URV: QURV of every transform-domain frontal slice."""
    spec = _resolve(a, spec)

    def factor(s):
        f = qurv(s)
        return f.U, f.T, f.V

    u, t, v = _slicewise(a, spec, factor)
    return TensorUTVFactors(u, t, v, spec, URV)


def qtulv(a: QTensor, spec: TransformSpec | None = None) -> TensorUTVFactors:
    """Tensor ULV: QULV of every transform-domain frontal slice."""
    spec = _resolve(a, spec)

    def factor(s):
        f = qulv(s)
        return f.U, f.T, f.V

    u, t, v = _slicewise(a, spec, factor)
    return TensorUTVFactors(u, t, v, spec, ULV)


def tqt_svd(a: QTensor, spec: TransformSpec | None = None) -> TensorUTVFactors:
    """TQt-SVD with square unitary U, V and an f-diagonal middle tensor."""
    spec = _resolve(a, spec)
    m, n = a.dims[:2]

    def factor(s):
        f = qsvd(s, full_matrices=True)
        return f.U, diag(f.sigma, m, n), f.V

    u, d, v = _slicewise(a, spec, factor)
    return TensorUTVFactors(u, d, v, spec, SVD)


def transform_singular_values(a: QTensor, spec: TransformSpec | None = None) -> np.ndarray:
    """Singular values of each transform-domain slice, shape ``(S, min(I1, I2))``."""
    spec = _resolve(a, spec)
    return np.array([singular_values(s) for s in apply_transform(a, spec).slices()])


def tqt_rank(a: QTensor, spec: TransformSpec | None = None, rtol: float = TUBE_RANK_RTOL):
    """TQt-rank and singular tube norms ``||D(k, k, :, ..., :)||_F``.

    A tube counts when its norm exceeds ``rtol`` times the largest tube norm.
    """
    spec = _resolve(a, spec)
    sig = transform_singular_values(a, spec)
    tubes = sig.T.reshape((sig.shape[1],) + a.tube_dims)
    for k, m in enumerate(spec.inverses):
        axis = k + 1
        tubes = np.moveaxis(np.tensordot(m, tubes, axes=([1], [axis])), 0, axis)
    norms = np.sqrt(np.sum(tubes.reshape(tubes.shape[0], -1) ** 2, axis=1))
    if norms.size == 0 or norms.max() == 0.0:
        return 0, norms
    return int(np.sum(norms > rtol * norms.max())), norms


def cor_qturv(a: QTensor, params: SketchParams, spec: TransformSpec | None = None,
              omega: QMatrix | None = None) -> TensorCoRFactors:
    """CoR-QTURV with one I2 x l test matrix shared by every slice."""
    spec = _resolve(a, spec)
    _check_sketch_size(a.dims[:2], params.l)
    if omega is None:
        omega = draw_test_matrix(a.dims[1], params.l, params.seed)
    om = omega.pair

    def factor(s):
        ua, ub, ra, rb, va, vb = cor_core(s.pair, om, params.p, params.shortcut)
        return QMatrix.from_pair(ua, ub), QMatrix.from_pair(ra, rb), QMatrix.from_pair(va, vb)

    u, r, v = _slicewise(a, spec, factor)
    return TensorCoRFactors(u, r, v, spec, params)


def _cols(t: QTensor, k: int) -> QTensor:
    return QTensor(t.data[:, :k], copy=True)


def _rows(t: QTensor, k: int) -> QTensor:
    return QTensor(t.data[:k], copy=True)


def truncate_tqt(f, k: int) -> QTensor:
    """TQt-rank-k approximation.

    URV, SVD and CoR factors use ``U(:, :K) * T(:K, :) * V^H``; ULV uses
    ``U * L(:, :K) * V(:, :K)^H``.
    """
    if not 1 <= k <= f.rank_bound:
        raise BadRank(f"K={k} outside [1, {f.rank_bound}]")
    spec = f.spec
    if isinstance(f, TensorCoRFactors):
        left, mid, right = _cols(f.U, k), _rows(f.R, k), f.V
    elif f.kind == ULV:
        left, mid, right = f.U, _cols(f.T, k), _cols(f.V, k)
    else:
        left, mid, right = _cols(f.U, k), _rows(f.T, k), f.V
    return qt_product(qt_product(left, mid, spec), qt_conj_transpose(right, spec), spec)
