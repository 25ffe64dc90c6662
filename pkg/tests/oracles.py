"""Independent reference implementations used as test oracles.

These avoid the library's complex-pair kernels: products go through the
scalar Hamilton table, and spectra through numpy on explicit embeddings.
"""
import numpy as np

from quatutv.quaternion import Quaternion, qmul


def naive_matmul(a, b):
    """Triple loop over :class:`Quaternion` scalars on (M, L, 4) and (L, N, 4) arrays."""
    m, l, _ = a.shape
    _, n, _ = b.shape
    out = np.zeros((m, n, 4))
    for i in range(m):
        for j in range(n):
            acc = Quaternion()
            for k in range(l):
                acc = acc + qmul(Quaternion.from_array(a[i, k]), Quaternion.from_array(b[k, j]))
            out[i, j] = acc.to_array()
    return out


def naive_conj_transpose(a):
    m, n, _ = a.shape
    out = np.zeros((n, m, 4))
    for i in range(m):
        for j in range(n):
            out[j, i] = Quaternion.from_array(a[i, j]).conj().to_array()
    return out


def adjoint_from_components(data):
    """Complex adjoint assembled directly from the w, x, y, z planes."""
    w, x, y, z = (data[..., c] for c in range(4))
    a1 = w + 1j * x
    a2 = y + 1j * z
    return np.block([[a1, a2], [-np.conj(a2), np.conj(a1)]])


def adjoint_singular_values(data):
    """Distinct quaternion singular values: every other value of the adjoint's spectrum."""
    s = np.linalg.svd(adjoint_from_components(data), compute_uv=False)
    return s[0::2][: min(data.shape[:2])]


def real_counterpart_norm(data):
    w, x, y, z = (data[..., c] for c in range(4))
    g = np.block([[w, -x, -y, -z], [x, w, -z, y], [y, z, w, -x], [z, -y, x, w]])
    return np.linalg.norm(g)


def slicewise_matmul(a, b):
    """Per-frontal-slice product on (I1, L, S, 4) x (L, I2, S, 4) arrays via the naive loop."""
    return np.stack([naive_matmul(a[:, :, s], b[:, :, s]) for s in range(a.shape[2])], axis=2)
