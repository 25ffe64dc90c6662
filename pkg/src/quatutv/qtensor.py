"""Order-N quaternion tensors and transform-domain products.

A :class:`QTensor` stores a float64 array of shape ``(I1, ..., IN, 4)``.
Modes 3..N are "tube" modes: a :class:`TransformSpec` holds one real
invertible matrix per tube mode, and the ``*_QT`` product multiplies
frontal slices in the transformed domain.

Frontal slices are indexed by flattening the tube modes in C order, so
``reshape(I1, I2, S, 4)`` lists them along axis 2.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
import scipy.fft

from . import _pair
from .errors import DimensionMismatch, FormatVersionMismatch
from .qmatrix import QMatrix
from .quaternion import as_rng

QTEN_MAGIC = b"QTEN1"
TRANSFORM_RTOL = 1e-10

IDENTITY = "identity"
DCT = "dct"
CUSTOM = "custom"


class QTensor:
    """Immutable quaternion tensor of order N >= 3."""

    __slots__ = ("data",)

    def __init__(self, data, copy: bool = True):
        arr = np.array(data, dtype=np.float64, copy=True) if copy else np.asarray(data, dtype=np.float64)
        if arr.ndim < 4 or arr.shape[-1] != 4:
            raise ValueError(f"expected an (I1, I2, I3, ..., 4) array, got shape {arr.shape}")
        arr.flags.writeable = False
        self.data = arr

    @classmethod
    def zeros(cls, *dims: int) -> "QTensor":
        return cls(np.zeros(tuple(dims) + (4,)), copy=False)

    @classmethod
    def random(cls, *dims: int, seed=None) -> "QTensor":
        return cls(as_rng(seed).standard_normal(tuple(dims) + (4,)), copy=False)

    @classmethod
    def from_slices(cls, slices, tube_dims) -> "QTensor":
        """Stack matrices (frontal slices in C order) into a tensor."""
        data = np.stack([s.data for s in slices], axis=2)
        return cls(data.reshape(data.shape[:2] + tuple(tube_dims) + (4,)), copy=False)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.data.shape[:-1]

    @property
    def order(self) -> int:
        return self.data.ndim - 1

    @property
    def tube_dims(self) -> tuple[int, ...]:
        return self.dims[2:]

    @property
    def n_slices(self) -> int:
        return int(np.prod(self.tube_dims))

    def flat(self) -> np.ndarray:
        """View of shape ``(I1, I2, S, 4)``."""
        return self.data.reshape(self.dims[:2] + (self.n_slices, 4))

    def slice(self, s: int) -> QMatrix:
        return QMatrix(self.flat()[:, :, s], copy=True)

    def slices(self) -> list[QMatrix]:
        return [self.slice(s) for s in range(self.n_slices)]

    def pair(self):
        """Complex pair with slices leading: arrays of shape ``(S, I1, I2)``."""
        a, b = _pair.to_pair(self.flat())
        return np.moveaxis(a, 2, 0), np.moveaxis(b, 2, 0)

    @classmethod
    def from_pair(cls, a, b, tube_dims) -> "QTensor":
        data = _pair.from_pair(np.moveaxis(a, 0, 2), np.moveaxis(b, 0, 2))
        return cls(data.reshape(data.shape[:2] + tuple(tube_dims) + (4,)), copy=False)

    def frobenius(self) -> float:
        return float(np.sqrt(np.sum(self.data**2)))

    def __add__(self, other):
        if isinstance(other, QTensor):
            _same_dims(self, other)
            return QTensor(self.data + other.data, copy=False)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, QTensor):
            _same_dims(self, other)
            return QTensor(self.data - other.data, copy=False)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return QTensor(self.data * float(other), copy=False)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, QTensor):
            return NotImplemented
        return self.dims == other.dims and bool(np.array_equal(self.data, other.data))

    __hash__ = None

    def __repr__(self):
        return f"QTensor({'x'.join(map(str, self.dims))})"

    def to_bytes(self) -> bytes:
        head = struct.pack("<Q", self.order) + struct.pack(f"<{self.order}Q", *self.dims)
        return QTEN_MAGIC + head + self.data.astype("<f8").tobytes()


def _same_dims(a: QTensor, b: QTensor):
    if a.dims != b.dims:
        raise DimensionMismatch(f"tensor dims {a.dims} and {b.dims} differ")


def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II matrix ``C`` with ``C @ x == dct(x, norm='ortho')``."""
    return scipy.fft.dct(np.eye(n), type=2, norm="ortho", axis=0)


@dataclass(frozen=True)
class TransformSpec:
    """Real invertible matrices for tube modes 3..N.

    ``matrices[k]`` acts on mode ``k + 3`` (1-based); ``inverses`` holds the
    matching inverses.
    """

    matrices: tuple
    inverses: tuple
    family: str

    @classmethod
    def identity(cls, tube_dims) -> "TransformSpec":
        mats = tuple(np.eye(n) for n in tube_dims)
        return cls(mats, mats, IDENTITY)

    @classmethod
    def dct(cls, tube_dims) -> "TransformSpec":
        mats = tuple(dct_matrix(n) for n in tube_dims)
        return cls(mats, tuple(m.T.copy() for m in mats), DCT)

    @classmethod
    def custom(cls, matrices, inverses=None) -> "TransformSpec":
        mats = tuple(np.asarray(m, dtype=np.float64) for m in matrices)
        for m in mats:
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise DimensionMismatch(f"transform matrices must be square, got {m.shape}")
        if inverses is None:
            invs = tuple(np.linalg.inv(m) for m in mats)
        else:
            invs = tuple(np.asarray(m, dtype=np.float64) for m in inverses)
        spec = cls(mats, invs, CUSTOM)
        spec.check()
        return spec

    @classmethod
    def named(cls, family: str, tube_dims) -> "TransformSpec":
        if family == IDENTITY:
            return cls.identity(tube_dims)
        if family == DCT:
            return cls.dct(tube_dims)
        raise ValueError(f"unknown transform family {family!r}")

    @property
    def tube_dims(self) -> tuple[int, ...]:
        return tuple(m.shape[0] for m in self.matrices)

    def check(self, rtol: float = TRANSFORM_RTOL) -> None:
        for m, mi in zip(self.matrices, self.inverses):
            n = m.shape[0]
            err = np.linalg.norm(m @ mi - np.eye(n))
            if mi.shape != m.shape or err > rtol * np.sqrt(n):
                raise DimensionMismatch(f"transform inverse defect {err:.3e} on a mode of size {n}")

    def is_orthonormal(self, rtol: float = TRANSFORM_RTOL) -> bool:
        return all(np.linalg.norm(m @ m.T - np.eye(m.shape[0])) <= rtol * np.sqrt(m.shape[0])
                   for m in self.matrices)


def default_spec(tube_dims) -> TransformSpec:
    return TransformSpec.dct(tube_dims)


def _check_spec(t: QTensor, spec: TransformSpec):
    if t.tube_dims != spec.tube_dims:
        raise DimensionMismatch(f"tube dims {t.tube_dims} do not match transform {spec.tube_dims}")


def apply_transform(t: QTensor, spec: TransformSpec, direction: str = "forward") -> QTensor:
    """Mode-k products with ``Q_k`` (forward) or ``Q_k^{-1}`` (inverse) for k >= 3."""
    _check_spec(t, spec)
    if direction not in ("forward", "inverse"):
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    if spec.family == IDENTITY:
        return t
    mats = spec.matrices if direction == "forward" else spec.inverses
    data = t.data
    for k, m in enumerate(mats):
        axis = k + 2
        data = np.moveaxis(np.tensordot(m, data, axes=([1], [axis])), 0, axis)
    return QTensor(data, copy=False)


def facewise_product(a: QTensor, b: QTensor) -> QTensor:
    """Slice-by-slice quaternion matmul."""
    if a.dims[1] != b.dims[0] or a.tube_dims != b.tube_dims:
        raise DimensionMismatch(f"cannot multiply facewise {a.dims} by {b.dims}")
    return QTensor.from_pair(*_pair.pmm(*a.pair(), *b.pair()), a.tube_dims)


def qt_product(a: QTensor, b: QTensor, spec: TransformSpec) -> QTensor:
    """``A *_QT B``: transform, multiply facewise, transform back."""
    if a.dims[1] != b.dims[0] or a.tube_dims != b.tube_dims:
        raise DimensionMismatch(f"cannot multiply {a.dims} by {b.dims}")
    prod = facewise_product(apply_transform(a, spec), apply_transform(b, spec))
    return apply_transform(prod, spec, "inverse")


def facewise_conj_transpose(a: QTensor) -> QTensor:
    return QTensor.from_pair(*_pair.ph(*a.pair()), a.tube_dims)


def qt_conj_transpose(a: QTensor, spec: TransformSpec) -> QTensor:
    """Conjugate transpose of every transform-domain slice."""
    return apply_transform(facewise_conj_transpose(apply_transform(a, spec)), spec, "inverse")


def identity_tensor(n: int, spec: TransformSpec) -> QTensor:
    """The tensor whose transform-domain slices are all ``I_n``."""
    data = np.zeros((n, n) + spec.tube_dims + (4,))
    data[np.arange(n), np.arange(n), ..., 0] = 1.0
    return apply_transform(QTensor(data, copy=False), spec, "inverse")


def unitarity_error(u: QTensor, spec: TransformSpec) -> float:
    """Largest of ``||U^H * U - I||_F`` and ``||U * U^H - I||_F`` (for square slices)."""
    uh = qt_conj_transpose(u, spec)
    errs = [(qt_product(uh, u, spec) - identity_tensor(u.dims[1], spec)).frobenius()]
    if u.dims[0] == u.dims[1]:
        errs.append((qt_product(u, uh, spec) - identity_tensor(u.dims[0], spec)).frobenius())
    return max(errs)


def orthonormality_error(u: QTensor, spec: TransformSpec) -> float:
    """``||U^H * U - I||_F``, the check for tensors with orthonormal lateral slices."""
    uh = qt_conj_transpose(u, spec)
    return (qt_product(uh, u, spec) - identity_tensor(u.dims[1], spec)).frobenius()


def is_unitary(u: QTensor, spec: TransformSpec, tol: float = 1e-10) -> bool:
    return unitarity_error(u, spec) <= tol * np.sqrt(u.dims[1] * u.n_slices)


def frobenius(t: QTensor) -> float:
    return t.frobenius()


def write_qten(stream, t: QTensor) -> None:
    stream.write(t.to_bytes())


def read_qten(stream) -> QTensor:
    magic = stream.read(len(QTEN_MAGIC))
    if magic != QTEN_MAGIC:
        raise FormatVersionMismatch(f"expected {QTEN_MAGIC!r}, found {magic!r}")
    head = stream.read(8)
    if len(head) != 8:
        raise FormatVersionMismatch("truncated QTEN1 header")
    (order,) = struct.unpack("<Q", head)
    if order < 3 or order > 64:
        raise FormatVersionMismatch(f"implausible tensor order {order}")
    dim_bytes = stream.read(8 * order)
    if len(dim_bytes) != 8 * order:
        raise FormatVersionMismatch("truncated QTEN1 dims")
    dims = struct.unpack(f"<{order}Q", dim_bytes)
    nbytes = int(np.prod(dims)) * 4 * 8
    body = stream.read(nbytes)
    if len(body) != nbytes:
        raise FormatVersionMismatch("truncated QTEN1 body")
    return QTensor(np.frombuffer(body, dtype="<f8").reshape(tuple(dims) + (4,)), copy=True)
