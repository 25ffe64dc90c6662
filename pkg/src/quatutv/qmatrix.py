"""Dense quaternion matrices.

:class:`QMatrix` wraps a read-only float64 array of shape ``(M, N, 4)`` whose
last axis holds the (w, x, y, z) components of each entry, in row-major order.
"""
from __future__ import annotations

import struct

import numpy as np

from . import _pair
from .errors import DimensionMismatch, FormatVersionMismatch, NotAnAdjoint
from .quaternion import as_rng

QMAT_MAGIC = b"QMAT1"
UNITARY_RTOL = 1e-10
ADJOINT_TOL = 1e-10


class QMatrix:
    """Immutable M x N quaternion matrix.

    Supports ``@`` (Hamilton matmul), ``+``, ``-``, real scaling, slicing with
    two indices, and ``.H`` for the conjugate transpose.
    """

    __slots__ = ("data",)

    def __init__(self, data, copy: bool = True):
        arr = np.array(data, dtype=np.float64, copy=copy) if copy else np.asarray(data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 4:
            raise ValueError(f"expected an (M, N, 4) array, got shape {arr.shape}")
        arr.flags.writeable = False
        self.data = arr

    # -- construction -----------------------------------------------------
    @classmethod
    def from_components(cls, w, x=None, y=None, z=None) -> "QMatrix":
        w = np.atleast_2d(np.asarray(w, dtype=np.float64))
        parts = [w] + [np.zeros_like(w) if c is None else np.atleast_2d(np.asarray(c, dtype=np.float64))
                       for c in (x, y, z)]
        return cls(np.stack(parts, axis=-1), copy=False)

    @classmethod
    def from_pair(cls, a, b) -> "QMatrix":
        return cls(_pair.from_pair(np.atleast_2d(a), np.atleast_2d(b)), copy=False)

    @classmethod
    def zeros(cls, m: int, n: int) -> "QMatrix":
        return cls(np.zeros((m, n, 4)), copy=False)

    @classmethod
    def identity(cls, n: int, m: int | None = None) -> "QMatrix":
        m = n if m is None else m
        d = np.zeros((n, m, 4))
        k = min(n, m)
        d[np.arange(k), np.arange(k), 0] = 1.0
        return cls(d, copy=False)

    @classmethod
    def random(cls, m: int, n: int, seed=None) -> "QMatrix":
        """Matrix with i.i.d. standard normal components."""
        return cls(as_rng(seed).standard_normal((m, n, 4)), copy=False)

    # -- views ------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def pair(self):
        return _pair.to_pair(self.data)

    @property
    def w(self):
        return self.data[..., 0]

    @property
    def H(self) -> "QMatrix":
        return conj_transpose(self)

    def components(self):
        return tuple(self.data[..., c] for c in range(4))

    def __getitem__(self, key) -> "QMatrix":
        if not (isinstance(key, tuple) and len(key) == 2):
            raise IndexError("QMatrix indexing needs a (row, col) pair")
        r, c = (([k] if isinstance(k, (int, np.integer)) else k) for k in key)
        return QMatrix(self.data[r][:, c], copy=True)

    def entry(self, i: int, j: int) -> np.ndarray:
        return self.data[i, j].copy()

    # -- arithmetic -------------------------------------------------------
    def __matmul__(self, other):
        if isinstance(other, QMatrix):
            return matmul(self, other)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, QMatrix):
            _same_shape(self, other)
            return QMatrix(self.data + other.data, copy=False)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, QMatrix):
            _same_shape(self, other)
            return QMatrix(self.data - other.data, copy=False)
        return NotImplemented

    def __neg__(self):
        return QMatrix(-self.data, copy=False)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return QMatrix(self.data * float(other), copy=False)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    __hash__ = None

    def __repr__(self):
        return f"QMatrix({self.rows}x{self.cols})"

    def frobenius(self) -> float:
        return frobenius(self)

    def to_bytes(self) -> bytes:
        return QMAT_MAGIC + struct.pack("<QQ", *self.shape) + self.data.astype("<f8").tobytes()


def _same_shape(a: QMatrix, b: QMatrix):
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")


def matmul(a: QMatrix, b: QMatrix) -> QMatrix:
    if a.cols != b.rows:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return QMatrix.from_pair(*_pair.pmm(*a.pair, *b.pair))


def conj_transpose(a: QMatrix) -> QMatrix:
    d = np.swapaxes(a.data, 0, 1).copy()
    d[..., 1:] *= -1.0
    return QMatrix(d, copy=False)


def frobenius(a: QMatrix) -> float:
    return float(np.sqrt(np.sum(a.data**2)))


def trace_gram(a: QMatrix) -> np.ndarray:
    """``tr(A^H A)`` as a quaternion (its imaginary part vanishes up to rounding)."""
    ga, gb = _pair.pmm(*_pair.ph(*a.pair), *a.pair)
    return _pair.from_pair(np.trace(ga), np.trace(gb))


def complex_adjoint(a: QMatrix) -> np.ndarray:
    """Complex adjoint ``[[A1, A2], [-conj(A2), conj(A1)]]`` of ``A = A1 + A2 j``."""
    a1, a2 = a.pair
    return np.block([[a1, a2], [-a2.conj(), a1.conj()]])


def from_adjoint(c, tol: float = ADJOINT_TOL) -> QMatrix:
    """Recover ``A`` from its complex adjoint, checking the block symmetry."""
    c = np.asarray(c)
    if c.ndim != 2 or c.shape[0] % 2 or c.shape[1] % 2:
        raise NotAnAdjoint(f"adjoint must be 2M x 2N, got {c.shape}")
    m, n = c.shape[0] // 2, c.shape[1] // 2
    a1, a2 = c[:m, :n], c[:m, n:]
    scale = max(1.0, float(np.linalg.norm(c)))
    defect = max(np.linalg.norm(c[m:, n:] - a1.conj()), np.linalg.norm(c[m:, :n] + a2.conj()))
    if defect > tol * scale:
        raise NotAnAdjoint(f"block symmetry violated by {defect:.3e}")
    return QMatrix.from_pair(a1, a2)


def real_counterpart(a: QMatrix) -> np.ndarray:
    """The 4M x 4N real matrix with ``||A||_F = ||gamma_A||_F / 2``."""
    a0, a1, a2, a3 = a.components()
    return np.block(
        [
            [a0, -a1, -a2, -a3],
            [a1, a0, -a3, a2],
            [a2, a3, a0, -a1],
            [a3, -a2, a1, a0],
        ]
    )


def column_representation(a: QMatrix) -> np.ndarray:
    return np.vstack(a.components())


def spectral_norm(a: QMatrix) -> float:
    if min(a.shape) == 0:
        return 0.0
    return float(np.linalg.norm(complex_adjoint(a), 2))


def unitarity_error(u: QMatrix) -> float:
    """``||U^H U - I||_F`` for a matrix with (intended) orthonormal columns."""
    ga, gb = _pair.pmm(*_pair.ph(*u.pair), *u.pair)
    ga = ga - np.eye(u.cols)
    return float(np.sqrt(np.sum(_pair.norm2(ga, gb))))


def is_unitary(u: QMatrix, rtol: float = UNITARY_RTOL) -> bool:
    return unitarity_error(u) <= rtol * np.sqrt(u.cols)


def hstack(*mats: QMatrix) -> QMatrix:
    return QMatrix(np.concatenate([m.data for m in mats], axis=1), copy=False)


def vstack(*mats: QMatrix) -> QMatrix:
    return QMatrix(np.concatenate([m.data for m in mats], axis=0), copy=False)


def permute_columns(a: QMatrix, perm) -> QMatrix:
    """``A P`` where ``P = I[:, perm]``."""
    return QMatrix(a.data[:, np.asarray(perm)], copy=False)


def unpermute_columns(a: QMatrix, perm) -> QMatrix:
    """``A P^T``: column ``j`` of ``A`` moves to position ``perm[j]``."""
    out = np.empty_like(a.data)
    out[:, np.asarray(perm)] = a.data
    return QMatrix(out, copy=False)


def diag(values, m: int | None = None, n: int | None = None) -> QMatrix:
    values = np.asarray(values, dtype=np.float64)
    k = len(values)
    m = k if m is None else m
    n = k if n is None else n
    d = np.zeros((m, n, 4))
    d[np.arange(k), np.arange(k), 0] = values
    return QMatrix(d, copy=False)


def write_qmat(stream, a: QMatrix) -> None:
    stream.write(a.to_bytes())


def read_qmat(stream) -> QMatrix:
    magic = stream.read(len(QMAT_MAGIC))
    if magic != QMAT_MAGIC:
        raise FormatVersionMismatch(f"expected {QMAT_MAGIC!r}, found {magic!r}")
    head = stream.read(16)
    if len(head) != 16:
        raise FormatVersionMismatch("truncated QMAT1 header")
    m, n = struct.unpack("<QQ", head)
    nbytes = m * n * 4 * 8
    body = stream.read(nbytes)
    if len(body) != nbytes:
        raise FormatVersionMismatch("truncated QMAT1 body")
    return QMatrix(np.frombuffer(body, dtype="<f8").reshape(m, n, 4), copy=True)
