"""Synthetic test problems with known structure.

* ``low_rank_product``: ``P Q^H`` with Gaussian quaternion factors (exact rank r).
* ``with_spectrum``: ``U diag(sigma) V^H`` with Haar-like unitary U, V.
* ``inverse_square``: the ``sigma_i = 1 / i^2`` spectrum.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qfactor import qqr
from .qmatrix import QMatrix, diag
from .quaternion import as_rng


@dataclass(frozen=True)
class SpectralMatrix:
    """A matrix together with its full singular spectrum and right singular vectors."""

    A: QMatrix
    sigma: np.ndarray
    U: QMatrix
    V: QMatrix


def inverse_square(n: int) -> np.ndarray:
    return 1.0 / np.arange(1, n + 1, dtype=np.float64) ** 2


def random_unitary(n: int, cols: int | None = None, seed=None) -> QMatrix:
    """Orthonormal columns from the QR of a Gaussian quaternion matrix."""
    cols = n if cols is None else cols
    return qqr(QMatrix.random(n, cols, as_rng(seed))).Q


def low_rank_product(m: int, n: int, r: int, seed=None) -> QMatrix:
    rng = as_rng(seed)
    p = QMatrix.random(m, r, rng)
    q = QMatrix.random(n, r, rng)
    return p @ q.H


def with_spectrum(m: int, n: int, sigma, seed=None) -> SpectralMatrix:
    """``U diag(sigma) V^H`` with U (M x M) and V (N x N) unitary.

    ``sigma`` may be shorter than ``min(M, N)``; missing values are zero.
    """
    rng = as_rng(seed)
    r = min(m, n)
    full = np.zeros(r)
    sigma = np.asarray(sigma, dtype=np.float64)[:r]
    full[: len(sigma)] = sigma
    u = random_unitary(m, seed=rng)
    v = random_unitary(n, seed=rng)
    a = u[:, :r] @ diag(full) @ v[:, :r].H
    return SpectralMatrix(a, full, u, v)


@dataclass(frozen=True)
class SpectralTensor:
    """Tensor built slice-by-slice in the transform domain with known spectra.

    ``sigma[s]`` and ``V[s]`` are the spectrum and full right singular vectors
    of transform-domain slice ``s``.
    """

    A: "QTensor"
    sigma: np.ndarray
    V: list


def tensor_with_spectrum(i1: int, i2: int, tube_dims, sigma, spec=None, seed=None) -> SpectralTensor:
    """Every transform-domain slice is ``U_s diag(sigma) V_s^H`` with fresh unitary factors.

    ``sigma`` is either one spectrum for all slices or an (S, r) array.
    """
    from .qtensor import QTensor, apply_transform, default_spec

    rng = as_rng(seed)
    tube_dims = tuple(tube_dims)
    spec = default_spec(tube_dims) if spec is None else spec
    n_slices = int(np.prod(tube_dims))
    sig = np.asarray(sigma, dtype=np.float64)
    if sig.ndim == 1:
        sig = np.tile(sig, (n_slices, 1))
    mats, vs, spectra = [], [], []
    for s in range(n_slices):
        sm = with_spectrum(i1, i2, sig[s], rng)
        mats.append(sm.A)
        vs.append(sm.V)
        spectra.append(sm.sigma)
    hat = QTensor.from_slices(mats, tube_dims)
    return SpectralTensor(apply_transform(hat, spec, "inverse"), np.array(spectra), vs)


def tensor_low_rank_product(i1: int, i2: int, tube_dims, r: int, spec=None, seed=None):
    """``P * Q^H`` under the transform product with Gaussian I1 x r and I2 x r factors."""
    from .qtensor import QTensor, default_spec, qt_conj_transpose, qt_product

    rng = as_rng(seed)
    tube_dims = tuple(tube_dims)
    spec = default_spec(tube_dims) if spec is None else spec
    p = QTensor.random(i1, r, *tube_dims, seed=rng)
    q = QTensor.random(i2, r, *tube_dims, seed=rng)
    return qt_product(p, qt_conj_transpose(q, spec), spec)
