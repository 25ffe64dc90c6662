"""Quaternion QR, pivoted QR and SVD.

QR uses quaternion Householder reflectors ``H = I - 2 v v^H / (v^H v)``
followed by a unit-quaternion row scaling, so every diagonal entry of ``R`` is
real and nonnegative. The SVD goes through the complex adjoint, whose
singular values come in equal pairs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _pair
from .errors import BadRank, ConvergenceFailure
from .qmatrix import QMatrix, complex_adjoint, diag, unpermute_columns

PIVOT_TIE_RTOL = 1e-14
# downdated squared column norms below this fraction of the reference are recomputed
NORM_RECOMPUTE_RATIO = 1e-7
SVD_CLUSTER_RTOL = 1e-8


@dataclass(frozen=True)
class QRFactors:
    Q: QMatrix
    R: QMatrix
    perm: np.ndarray | None = None

    def reconstruct(self) -> QMatrix:
        qr = self.Q @ self.R
        return qr if self.perm is None else unpermute_columns(qr, self.perm)

    def permutation_matrix(self) -> np.ndarray:
        n = self.R.cols
        perm = np.arange(n) if self.perm is None else self.perm
        return np.eye(n)[:, perm]


@dataclass(frozen=True)
class SVDFactors:
    U: QMatrix
    sigma: np.ndarray
    V: QMatrix

    @property
    def rank_bound(self) -> int:
        return len(self.sigma)

    def reconstruct(self) -> QMatrix:
        r = len(self.sigma)
        return self.U[:, :r] @ diag(self.sigma) @ self.V[:, :r].H


# ---------------------------------------------------------------------------
# Householder QR on complex pairs
# ---------------------------------------------------------------------------

def _select_pivot(norms2):
    norms = np.sqrt(norms2)
    top = norms.max()
    if top == 0.0:
        return 0
    return int(np.flatnonzero(norms >= top * (1.0 - PIVOT_TIE_RTOL))[0])


def householder_qr(a, b, pivot=False, full=False):
    """QR (optionally with column pivoting) of the pair ``(a, b)``.

    Returns ``(Qa, Qb, Ra, Rb, perm)`` with ``A[:, perm] = Q R``. ``Q`` is
    M x M when ``full`` else M x min(M, N); ``R`` has matching row count.
    """
    m, n = a.shape
    ra = np.array(a, dtype=np.complex128)
    rb = np.array(b, dtype=np.complex128)
    perm = np.arange(n)
    steps = min(m, n)
    reflectors = []

    if pivot:
        norms2 = np.sum(_pair.norm2(ra, rb), axis=0)
        ref2 = norms2.copy()

    for k in range(steps):
        if pivot:
            j = k + _select_pivot(norms2[k:])
            if j != k:
                for arr in (ra, rb):
                    arr[:, [k, j]] = arr[:, [j, k]]
                perm[[k, j]] = perm[[j, k]]
                norms2[[k, j]] = norms2[[j, k]]
                ref2[[k, j]] = ref2[[j, k]]

        xa, xb = ra[k:, k].copy(), rb[k:, k].copy()
        nrm = float(np.sqrt(np.sum(_pair.norm2(xa, xb))))
        if nrm == 0.0:
            reflectors.append(None)
        else:
            head = np.hypot(abs(xa[0]), abs(xb[0]))
            if head > 0.0:
                ua, ub = -xa[0] / head, -xb[0] / head
            else:
                ua, ub = -1.0 + 0j, 0j
            # v = x - u |x| e1; the sign choice avoids cancellation in v[0]
            va, vb = xa[:, None], xb[:, None]
            va[0, 0] -= ua * nrm
            vb[0, 0] -= ub * nrm
            tau = 2.0 / float(np.sum(_pair.norm2(va, vb)))

            ba, bb = ra[k:, k + 1:], rb[k:, k + 1:]
            wa, wb = _pair.pmm(*_pair.ph(va, vb), ba, bb)
            da, db = _pair.pmm(va, vb, wa, wb)
            ba -= tau * da
            bb -= tau * db
            # rotate row k by conj(u) so that the diagonal becomes |x|
            ra[k, k + 1:], rb[k, k + 1:] = _pair.lscale(np.conj(ua), -ub, ra[k, k + 1:], rb[k, k + 1:])
            reflectors.append((va, vb, tau, ua, ub))

        ra[k, k], rb[k, k] = nrm, 0.0
        ra[k + 1:, k] = 0.0
        rb[k + 1:, k] = 0.0

        if pivot and k + 1 < n:
            norms2[k + 1:] -= _pair.norm2(ra[k, k + 1:], rb[k, k + 1:])
            stale = norms2[k + 1:] < NORM_RECOMPUTE_RATIO * ref2[k + 1:]
            if np.any(stale):
                cols = np.flatnonzero(stale) + k + 1
                exact = np.sum(_pair.norm2(ra[k + 1:, cols], rb[k + 1:, cols]), axis=0)
                norms2[cols] = exact
                ref2[cols] = exact
            np.maximum(norms2, 0.0, out=norms2)

    q = m if full else steps
    qa = np.zeros((m, q), dtype=np.complex128)
    qb = np.zeros((m, q), dtype=np.complex128)
    qa[np.arange(q), np.arange(q)] = 1.0
    for k in range(steps - 1, -1, -1):
        refl = reflectors[k]
        if refl is None:
            continue
        va, vb, tau, ua, ub = refl
        qa[k, k:], qb[k, k:] = _pair.lscale(ua, ub, qa[k, k:], qb[k, k:])
        za, zb = qa[k:, k:], qb[k:, k:]
        wa, wb = _pair.pmm(*_pair.ph(va, vb), za, zb)
        da, db = _pair.pmm(va, vb, wa, wb)
        za -= tau * da
        zb -= tau * db

    rows = m if full else steps
    return qa, qb, ra[:rows], rb[:rows], perm


def qqr(a: QMatrix, full: bool = False) -> QRFactors:
    """Householder QR ``A = Q R`` with real nonnegative diagonal of ``R``."""
    qa, qb, ra, rb, _ = householder_qr(*a.pair, pivot=False, full=full)
    return QRFactors(QMatrix.from_pair(qa, qb), QMatrix.from_pair(ra, rb), None)


def qqrcp(a: QMatrix, full: bool = False) -> QRFactors:
    """QR with column pivoting: ``A = Q R P^T`` with ``P = I[:, perm]``.

    The pivot is the remaining column of largest norm (lowest index on ties),
    so the diagonal moduli of ``R`` are nonincreasing.
    """
    qa, qb, ra, rb, perm = householder_qr(*a.pair, pivot=True, full=full)
    return QRFactors(QMatrix.from_pair(qa, qb), QMatrix.from_pair(ra, rb), perm)


def orthonormalize(a, b):
    """Orthonormal basis (pair) for the columns of ``(a, b)`` via one QR pass."""
    qa, qb, _, _, _ = householder_qr(a, b, pivot=False, full=False)
    return qa, qb


# ---------------------------------------------------------------------------
# SVD through the complex adjoint
# ---------------------------------------------------------------------------

def _unembed(c, m):
    """Columns ``[a; b]`` of the adjoint's first block column -> ``a - conj(b) j``."""
    return c[:m], -np.conj(c[m:])


def _complex_svd(c, full):
    try:
        return scipy.linalg.svd(c, full_matrices=full, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        try:
            return scipy.linalg.svd(c, full_matrices=full, lapack_driver="gesvd")
        except np.linalg.LinAlgError as exc:
            raise ConvergenceFailure(f"complex SVD did not converge: {exc}") from exc


def _paired_vectors(wa, wb, za, zb, s, r):
    """Quaternion singular pairs from the adjoint's (doubled) singular vectors.

    Each singular value of the quaternion matrix appears twice in the adjoint
    and both complex vectors map to the same quaternion vector up to a unit
    factor. A quaternion Gram-Schmidt restricted to clusters of equal singular
    values keeps one representative per quaternion direction; the left vectors
    receive the same right-multiplied coefficients, preserving ``A v = s u``.
    """
    m, n = wa.shape[0], za.shape[0]
    ua = np.zeros((m, r), complex)
    ub = np.zeros((m, r), complex)
    va = np.zeros((n, r), complex)
    vb = np.zeros((n, r), complex)
    sig = np.zeros(r)
    tol = SVD_CLUSTER_RTOL * (s[0] if len(s) else 0.0)
    count = 0
    start = 0
    for k in range(len(s)):
        if count == r:
            break
        while start < count and sig[start] - s[k] > tol:
            start += 1
        xa, xb = za[:, k:k + 1].copy(), zb[:, k:k + 1].copy()
        ya, yb = wa[:, k:k + 1].copy(), wb[:, k:k + 1].copy()
        if start < count:
            cl = slice(start, count)
            for _ in range(2):
                ca, cb = _pair.pmm(*_pair.ph(va[:, cl], vb[:, cl]), xa, xb)
                da, db = _pair.pmm(va[:, cl], vb[:, cl], ca, cb)
                xa -= da
                xb -= db
                da, db = _pair.pmm(ua[:, cl], ub[:, cl], ca, cb)
                ya -= da
                yb -= db
        nx = np.sqrt(np.sum(_pair.norm2(xa, xb)))
        if nx < 0.5:
            continue
        ny = np.sqrt(np.sum(_pair.norm2(ya, yb)))
        if ny > 0:
            ua[:, count], ub[:, count] = ya[:, 0] / ny, yb[:, 0] / ny
        va[:, count], vb[:, count] = (xa / nx)[:, 0], (xb / nx)[:, 0]
        sig[count] = s[k]
        count += 1
    return ua, ub, va, vb, count


def _project_out(basis_a, basis_b, xa, xb):
    c = _pair.pmm(*_pair.ph(basis_a, basis_b), xa, xb)
    da, db = _pair.pmm(basis_a, basis_b, *c)
    return xa - da, xb - db


def _complete(ba, bb, count, target, ca, cb):
    """Extend the orthonormal columns ``[:count]`` to ``target`` from candidate columns.

    Candidates are chosen greedily by largest residual after projection, so
    the completion succeeds whenever the candidates span the complement.
    """
    n = ba.shape[0]
    out_a = np.zeros((n, target), complex)
    out_b = np.zeros((n, target), complex)
    out_a[:, :count], out_b[:, :count] = ba[:, :count], bb[:, :count]
    xa, xb = ca.copy(), cb.copy()
    if count:
        for _ in range(2):
            xa, xb = _project_out(out_a[:, :count], out_b[:, :count], xa, xb)
    while count < target:
        res = np.sum(_pair.norm2(xa, xb), axis=0)
        j = int(np.argmax(res))
        if res[j] < 1e-16:
            raise ConvergenceFailure("could not complete an orthonormal basis")
        va, vb = xa[:, j:j + 1], xb[:, j:j + 1]
        if count:
            va, vb = _project_out(out_a[:, :count], out_b[:, :count], va, vb)
        nv = np.sqrt(np.sum(_pair.norm2(va, vb)))
        va, vb = va / nv, vb / nv
        out_a[:, count], out_b[:, count] = va[:, 0], vb[:, 0]
        count += 1
        xa, xb = _project_out(va, vb, xa, xb)
    return out_a, out_b


def _normalize_phases(ua, ub, va, vb, r):
    """Right-multiply each singular pair by a unit so V's largest entry is real positive."""
    if r == 0:
        return
    mag = _pair.norm2(va[:, :r], vb[:, :r])
    idx = np.argmax(mag, axis=0)
    cols = np.arange(r)
    pa, pb = va[idx, cols], vb[idx, cols]
    nrm = np.sqrt(np.abs(pa) ** 2 + np.abs(pb) ** 2)
    nrm[nrm == 0] = 1.0
    # unit s = conj(p) / |p| with p = pa + pb j  ->  conj(p) = conj(pa) - pb j
    sa, sb = np.conj(pa) / nrm, -pb / nrm
    va[:, :r], vb[:, :r] = _pair.rscale(va[:, :r], vb[:, :r], sa, sb)
    ua[:, :r], ub[:, :r] = _pair.rscale(ua[:, :r], ub[:, :r], sa, sb)


def qsvd(a: QMatrix, full_matrices: bool = False) -> SVDFactors:
    """Quaternion SVD ``A = U diag(sigma) V^H``.

    ``sigma`` has length ``r = min(M, N)`` and is sorted nonincreasing. With
    ``full_matrices`` the unitary factors are square (M x M and N x N);
    otherwise they are M x r and N x r.
    """
    m, n = a.shape
    r = min(m, n)
    c = complex_adjoint(a)
    full = full_matrices
    w, s2, zh = _complex_svd(c, full)
    s = 0.5 * (s2[0::2] + s2[1::2])[:r]
    wa, wb = _unembed(w, m)
    za, zb = _unembed(zh.conj().T, n)
    ua, ub, va, vb, count = _paired_vectors(wa[:, :2 * r], wb[:, :2 * r], za[:, :2 * r], zb[:, :2 * r], s2[:2 * r], r)

    if count < r and not full:
        # null-space vectors of the thin SVD need not come in closed pairs
        w, _, zh = _complex_svd(c, True)
        wa, wb = _unembed(w, m)
        za, zb = _unembed(zh.conj().T, n)
    if count < r or full:
        ucols = m if full else r
        vcols = n if full else r
        ua, ub = _complete(ua, ub, count, ucols, wa, wb)
        va, vb = _complete(va, vb, count, vcols, za, zb)

    ua, ub = orthonormalize(ua, ub)
    va, vb = orthonormalize(va, vb)
    _normalize_phases(ua, ub, va, vb, r)
    return SVDFactors(QMatrix.from_pair(ua, ub), s.copy(), QMatrix.from_pair(va, vb))


def truncate_svd(f: SVDFactors, k: int) -> QMatrix:
    """Rank-k truncation ``U[:, :k] diag(sigma[:k]) V[:, :k]^H``."""
    r = len(f.sigma)
    if not 1 <= k <= r:
        raise BadRank(f"K={k} outside [1, {r}]")
    return f.U[:, :k] @ diag(f.sigma[:k]) @ f.V[:, :k].H


def pinv(a: QMatrix, rcond: float = 1e-12):
    """Moore-Penrose pseudo-inverse via :func:`qsvd`.

    Returns ``(pinv, sigma)`` so callers can inspect the conditioning.
    Singular values below ``rcond * sigma_max`` are treated as zero.
    """
    f = qsvd(a)
    cutoff = rcond * (f.sigma[0] if len(f.sigma) else 0.0)
    inv = np.where(f.sigma > cutoff, 1.0 / np.where(f.sigma > 0, f.sigma, 1.0), 0.0)
    return f.V @ diag(inv) @ f.U.H, f.sigma


def singular_values(a: QMatrix) -> np.ndarray:
    """Singular values only (cheaper than :func:`qsvd`)."""
    r = min(a.shape)
    try:
        s2 = scipy.linalg.svdvals(complex_adjoint(a))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"complex SVD did not converge: {exc}") from exc
    return 0.5 * (s2[0::2] + s2[1::2])[:r]
