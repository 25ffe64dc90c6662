"""Complex-pair kernels.

A quaternion ``q = w + x i + y j + z k`` is written ``q = a + b j`` with
``a = w + x i`` and ``b = y + z i``. Since ``j c = conj(c) j`` for complex
``c``, products reduce to complex arithmetic:

    (a1 + b1 j)(a2 + b2 j) = (a1 a2 - b1 conj(b2)) + (a1 b2 + b1 conj(a2)) j

so a quaternion matmul costs four complex BLAS calls. All factorization
kernels run on pairs and only convert back at their boundaries.
"""
import numpy as np


def to_pair(data):
    data = np.asarray(data, dtype=np.float64)
    a = data[..., 0] + 1j * data[..., 1]
    b = data[..., 2] + 1j * data[..., 3]
    return a, b


def from_pair(a, b):
    out = np.empty(a.shape + (4,), dtype=np.float64)
    out[..., 0] = a.real
    out[..., 1] = a.imag
    out[..., 2] = b.real
    out[..., 3] = b.imag
    return out


def pmm(aa, ab, ba, bb):
    """Quaternion matrix product of pairs (batched over leading axes)."""
    return aa @ ba - ab @ bb.conj(), aa @ bb + ab @ ba.conj()


def ph(a, b):
    """Conjugate transpose of a pair over the last two axes."""
    return np.swapaxes(a, -1, -2).conj(), -np.swapaxes(b, -1, -2)


def lscale(sa, sb, ra, rb):
    """Left product ``s * r`` of a quaternion scalar with an array."""
    return sa * ra - sb * rb.conj(), sa * rb + sb * ra.conj()


def rscale(ra, rb, sa, sb):
    """Right product ``r * s`` of an array with a quaternion scalar (or row of scalars)."""
    return ra * sa - rb * np.conj(sb), ra * sb + rb * np.conj(sa)


def norm2(a, b):
    return np.abs(a) ** 2 + np.abs(b) ** 2
