"""Randomized compressed URV (CoR-QURV) and a randomized QSVD baseline.

A Gaussian quaternion test matrix ``Omega`` (N x l) sketches the column
space ``Y = (A A^H)^p A Omega`` and the row space ``Yhat = A^H ...``. Both
sketches are orthonormalized, ``A`` is compressed to the l x l core
``Q1^H A Q2`` and the core is factored by pivoted QR.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import _pair
from .errors import BadParams, BadRank, SingularSketch
from .qfactor import SVDFactors, householder_qr, orthonormalize, pinv, qsvd
from .qmatrix import QMatrix
from .quaternion import qgauss

PINV_RCOND = 1e-12


@dataclass(frozen=True)
class SketchParams:
    """Sketch size ``l``, power parameter ``p``, RNG seed and shortcut flag.

    ``l`` already includes any oversampling; nothing is added implicitly.
    """

    l: int
    p: int = 0
    seed: int = 0
    shortcut: bool = False

    def __post_init__(self):
        if self.l < 1:
            raise BadParams(f"l must be >= 1, got {self.l}")
        if self.p < 0:
            raise BadParams(f"p must be >= 0, got {self.p}")
        if self.shortcut and self.p != 1:
            raise BadParams("the pseudo-inverse shortcut needs p = 1")


@dataclass(frozen=True)
class CoRFactors:
    """``A ~ U R V^H`` with U (M x l), R (l x l, upper) and V (N x l)."""

    U: QMatrix
    R: QMatrix
    V: QMatrix
    params: SketchParams | None = None

    def approx(self) -> QMatrix:
        return self.U @ self.R @ self.V.H

    @property
    def rank_bound(self) -> int:
        return self.R.rows


def draw_test_matrix(n: int, l: int, seed) -> QMatrix:
    """N x l test matrix with i.i.d. N(0, 1) quaternion components."""
    if n < 1 or l < 1:
        raise BadParams(f"test matrix needs positive dimensions, got {n}x{l}")
    return QMatrix(qgauss(seed, n * l).reshape(n, l, 4), copy=False)


def _check_sketch_size(shape, l):
    if l > min(shape):
        raise BadRank(f"sketch size l={l} exceeds min{tuple(shape)}")


def cor_core(a_pair, omega_pair, p: int, shortcut: bool = False):
    """CoR-QURV on complex pairs, returning ``(Ua, Ub, Ra, Rb, Va, Vb)``.

    Shared by the matrix and the tensor (per-slice) drivers.
    """
    aa, ab = a_pair
    ah = _pair.ph(aa, ab)
    y0 = _pair.pmm(aa, ab, *omega_pair)
    y = y0
    yhat = _pair.pmm(*ah, *y0)
    for i in range(p):
        if i:
            yhat = _pair.pmm(*ah, *y)
        y = _pair.pmm(aa, ab, *yhat)
    q1 = orthonormalize(*y)
    q2 = orthonormalize(*yhat)
    q1h = _pair.ph(*q1)
    if shortcut:
        small = QMatrix.from_pair(*_pair.pmm(*_pair.ph(*q2), *omega_pair))
        inv, sigma = pinv(small, rcond=PINV_RCOND)
        if sigma[-1] < PINV_RCOND * sigma[0]:
            raise SingularSketch(
                f"Q2^H Omega is numerically singular (sigma ratio {sigma[-1] / sigma[0]:.2e})"
            )
        core = _pair.pmm(*_pair.pmm(*q1h, *y0), *inv.pair)
    else:
        core = _pair.pmm(*_pair.pmm(*q1h, aa, ab), *q2)
    qa, qb, ra, rb, perm = householder_qr(*core, pivot=True, full=True)
    ua, ub = _pair.pmm(*q1, qa, qb)
    return ua, ub, ra, rb, q2[0][:, perm], q2[1][:, perm]


def cor_qurv(a: QMatrix, params: SketchParams, omega: QMatrix | None = None) -> CoRFactors:
    """Compressed randomized QURV.

    ``omega`` overrides the seeded test matrix (it must be N x l).
    """
    _check_sketch_size(a.shape, params.l)
    if omega is None:
        omega = draw_test_matrix(a.cols, params.l, params.seed)
    elif omega.shape != (a.cols, params.l):
        raise BadParams(f"test matrix must be {a.cols}x{params.l}, got {omega.shape}")
    ua, ub, ra, rb, va, vb = cor_core(a.pair, omega.pair, params.p, params.shortcut)
    return CoRFactors(QMatrix.from_pair(ua, ub), QMatrix.from_pair(ra, rb), QMatrix.from_pair(va, vb), params)


def truncate_cor(f: CoRFactors, k: int) -> QMatrix:
    """``U[:, :K] R[:K, :] V^H``, the URV truncation applied to CoR factors."""
    if not 1 <= k <= f.rank_bound:
        raise BadRank(f"K={k} outside [1, {f.rank_bound}]")
    return f.U[:, :k] @ f.R[:k, :] @ f.V.H


def rand_qsvd(a: QMatrix, params: SketchParams) -> SVDFactors:
    """Randomized QSVD (range finder plus QSVD of the l x N projection)."""
    _check_sketch_size(a.shape, params.l)
    aa, ab = a.pair
    ah = _pair.ph(aa, ab)
    omega = draw_test_matrix(a.cols, params.l, params.seed)
    y = _pair.pmm(aa, ab, *omega.pair)
    for _ in range(params.p):
        y = _pair.pmm(aa, ab, *_pair.pmm(*ah, *y))
    q = orthonormalize(*y)
    b = QMatrix.from_pair(*_pair.pmm(*_pair.ph(*q), aa, ab))
    f = qsvd(b)
    return SVDFactors(QMatrix.from_pair(*q) @ f.U, f.sigma, f.V)

