"""Rank-revealing quaternion UTV decompositions.

Both variants run two pivoted QR passes. For URV the first pass factors
``A^H = Q1 R1 P1^T`` and the second ``(R1 P1^T)^H = Q2 R2 P2^T``, giving

    A = Q2 R2 (Q1 P2)^H.

ULV starts from ``A`` instead and ends with ``A = (Q1 P2) R2^H Q2^H``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadRank
from .qfactor import QRFactors, qqrcp
from .qmatrix import QMatrix, permute_columns, unpermute_columns

URV = "URV"
ULV = "ULV"


@dataclass(frozen=True)
class UTVFactors:
    """``A = U T V^H`` with ``T`` upper (URV) or lower (ULV) triangular."""

    U: QMatrix
    T: QMatrix
    V: QMatrix
    kind: str

    def reconstruct(self) -> QMatrix:
        return self.U @ self.T @ self.V.H

    @property
    def rank_bound(self) -> int:
        return min(self.U.rows, self.V.rows)


def qurv(a: QMatrix, thin: bool = False) -> UTVFactors:
    """QURV decomposition of ``A``.

    With ``thin=False`` U is M x M, T is M x N and V is N x N. The thin variant
    keeps ``r = min(M, N)`` columns of U and V (T is r x r) and yields the same
    truncations.
    """
    full = not thin
    f1 = qqrcp(a.H, full=full)
    f2 = qqrcp(unpermute_columns(f1.R, f1.perm).H, full=full)
    return UTVFactors(f2.Q, f2.R, permute_columns(f1.Q, f2.perm), URV)


def qulv(a: QMatrix, thin: bool = False) -> UTVFactors:
    """QULV decomposition ``A = U L V^H`` with ``L`` lower triangular."""
    full = not thin
    f1 = qqrcp(a, full=full)
    f2 = qqrcp(unpermute_columns(f1.R, f1.perm).H, full=full)
    return UTVFactors(permute_columns(f1.Q, f2.perm), f2.R.H, f2.Q, ULV)


def _check_rank(k: int, r: int) -> None:
    if not 1 <= k <= r:
        raise BadRank(f"K={k} outside [1, {r}]")


def truncate_utv(f: UTVFactors, k: int) -> QMatrix:
    """Rank-k approximation from UTV factors.

    URV keeps the leading K columns of U and rows of T with the whole of V:
    ``U[:, :K] T[:K, :] V^H``. ULV mirrors this: ``U T[:, :K] V[:, :K]^H``.
    """
    _check_rank(k, f.rank_bound)
    if f.kind == URV:
        return f.U[:, :k] @ f.T[:k, :] @ f.V.H
    return f.U @ f.T[:, :k] @ f.V[:, :k].H


def truncate_qqrcp(f: QRFactors, k: int) -> QMatrix:
    """``Q[:, :K] (R P^T)[:K, :]`` from a pivoted QR."""
    _check_rank(k, min(f.Q.rows, f.R.cols))
    rp = unpermute_columns(f.R[:k, :], f.perm) if f.perm is not None else f.R[:k, :]
    return f.Q[:, :k] @ rp


def diagonal_moduli(t: QMatrix) -> np.ndarray:
    k = min(t.shape)
    d = t.data[np.arange(k), np.arange(k)]
    return np.sqrt(np.sum(d**2, axis=-1))
