"""Error bounds for CoR-QURV and CoR-QTURV.

Notation: ``sigma`` is the full singular spectrum (1-based ``sigma_i`` in the
formulas below), ``K`` the target rank, ``P`` the oversampling slack with
``2 <= P + K <= l``, ``p`` the power parameter and

    gamma = sigma_{l-P+1} / sigma_K
    alpha = sqrt(K) sigma_{l-P+1} gamma^(2p+1)
    beta  = sigma_{l-P+1}^2 / (sigma_1 sigma_K) gamma^(2p)
    eta   = sqrt(K) sigma_{l-P+1} gamma^(2p)
    tau   = sigma_{l-P+1} / (sigma_1 sigma_K) gamma^(2p)

Writing ``V^H Omega = [W1; W2]`` with W1 the leading ``l - P`` rows and
``x = ||W2||_2 ||W1^+||_2``, the realized-sketch bound is

    ||A0||_F + sqrt(alpha^2 x^2 / (1 + beta^2 x^2)) + sqrt(eta^2 x^2 / (1 + tau^2 x^2))

where ``||A0||_F`` is the tail ``sqrt(sum_{i>K} sigma_i^2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import BadParams, DimensionMismatch, ZeroReference
from .qfactor import singular_values
from .qmatrix import QMatrix, spectral_norm


@dataclass(frozen=True)
class BoundInputs:
    sigma: np.ndarray
    K: int
    P: int
    l: int
    p: int
    M: int
    N: int
    omega1_pinv_norm: float | None = None
    omega2_norm: float | None = None

    def __post_init__(self):
        sig = np.asarray(self.sigma, dtype=np.float64)
        object.__setattr__(self, "sigma", sig)
        if sig.ndim != 1 or np.any(sig < 0) or np.any(np.diff(sig) > 1e-12 * max(1.0, sig[0] if sig.size else 0)):
            raise BadParams("sigma must be a nonnegative, nonincreasing vector")
        if self.K < 1 or self.P < 0 or self.p < 0:
            raise BadParams(f"need K >= 1, P >= 0, p >= 0 (got K={self.K}, P={self.P}, p={self.p})")
        if not 2 <= self.P + self.K <= self.l <= min(self.M, self.N):
            raise BadParams(
                f"need 2 <= P+K <= l <= min(M, N), got P+K={self.P + self.K}, l={self.l}, M={self.M}, N={self.N}"
            )

    def s(self, i: int) -> float:
        """1-based singular value, zero past the end of the spectrum."""
        return float(self.sigma[i - 1]) if i <= len(self.sigma) else 0.0

    @property
    def tail(self) -> float:
        return float(np.sqrt(np.sum(self.sigma[self.K:] ** 2)))

    @property
    def gamma(self) -> float:
        sk = self.s(self.K)
        return self.s(self.l - self.P + 1) / sk if sk > 0 else math.inf

    def with_sketch(self, omega1_pinv_norm: float, omega2_norm: float) -> "BoundInputs":
        return replace(self, omega1_pinv_norm=omega1_pinv_norm, omega2_norm=omega2_norm)


def bound_constants(b: BoundInputs) -> tuple[float, float, float, float]:
    """``(alpha, beta, eta, tau)``; requires ``sigma_K > 0``."""
    s1, sk, sl = b.s(1), b.s(b.K), b.s(b.l - b.P + 1)
    g2p = (sl / sk) ** (2 * b.p)
    alpha = math.sqrt(b.K) * sl * sl / sk * g2p
    beta = sl * sl / (s1 * sk) * g2p
    eta = math.sqrt(b.K) * sl * g2p
    tau = sl / (s1 * sk) * g2p
    return alpha, beta, eta, tau


def _sketch_terms(b: BoundInputs) -> float:
    if b.omega1_pinv_norm is None or b.omega2_norm is None:
        raise BadParams("the deterministic bound needs realized sketch norms")
    if b.s(b.K) == 0.0:
        return 0.0
    alpha, beta, eta, tau = bound_constants(b)
    x2 = (b.omega2_norm * b.omega1_pinv_norm) ** 2
    return math.sqrt(alpha**2 * x2 / (1 + beta**2 * x2)) + math.sqrt(eta**2 * x2 / (1 + tau**2 * x2))


def det_bound_matrix(b: BoundInputs) -> float:
    """Realized-sketch upper bound on ``||A - U R V^H||_F``.

    When ``sigma_K = 0`` the ratios are undefined and only the tail
    ``||A0||_F`` is returned.
    """
    return b.tail + _sketch_terms(b)


def nu_gaussian_norm(rows: int, cols: int) -> float:
    """``3 (sqrt(rows) + sqrt(cols)) + 3``, the Gaussian spectral-norm constant."""
    return 3.0 * (math.sqrt(rows) + math.sqrt(cols)) + 3.0


def nu_gaussian_pinv(cols: int, P: int) -> float:
    """``e sqrt(4 cols + 2) / (P + 1)``, the pseudo-inverse constant."""
    return math.e * math.sqrt(4 * cols + 2) / (P + 1)


def nu_constants(b: BoundInputs) -> tuple[float, float]:
    """Constants evaluated at the shapes of W2 ((N - l + P) x l) and W1 ((l - P) x l)."""
    return nu_gaussian_norm(b.N - b.l + b.P, b.l), nu_gaussian_pinv(b.l, b.P)


def _expected_slice_term(b: BoundInputs) -> float:
    if b.s(b.K) == 0.0:
        return 0.0
    g = b.gamma
    return (1.0 + g) * b.s(b.l - b.P + 1) * g


def expected_bound_matrix(b: BoundInputs) -> float:
    """``||A0||_F + (1 + gamma) sqrt(K) nu1 nu2 sigma_{l-P+1} gamma``."""
    nu1, nu2 = nu_constants(b)
    return b.tail + math.sqrt(b.K) * nu1 * nu2 * _expected_slice_term(b)


def _tensor_tail(slices) -> float:
    return math.sqrt(sum(b.tail**2 for b in slices))


def _check_slices(slices):
    if not slices:
        raise BadParams("need at least one slice")
    first = slices[0]
    for b in slices[1:]:
        if (b.K, b.P, b.l, b.p, b.M, b.N) != (first.K, first.P, first.l, first.p, first.M, first.N):
            raise BadParams("all slices must share K, P, l, p and dimensions")


def det_bound_tensor(slices) -> float:
    """Tensor analog: ``||A0||_F`` plus the per-slice sketch terms summed over slices.

    ``||A0||_F`` collects the transform-domain tails of every slice.
    """
    _check_slices(slices)
    return _tensor_tail(slices) + sum(_sketch_terms(b) for b in slices)


def expected_bound_tensor(slices, n_slices: int | None = None) -> float:
    """``||A0||_F + (sqrt(K) nu / I3) sum_k (1 + gamma_k) sigma^k_{l-P+1} gamma_k``."""
    _check_slices(slices)
    i3 = len(slices) if n_slices is None else n_slices
    b = slices[0]
    nu1, nu2 = nu_constants(b)
    return _tensor_tail(slices) + math.sqrt(b.K) * nu1 * nu2 / i3 * sum(_expected_slice_term(s) for s in slices)


def relative_error(a, b) -> float:
    """``||A - B||_F / ||A||_F`` for matrices or tensors."""
    if type(a) is not type(b):
        raise DimensionMismatch("relative_error needs two matrices or two tensors")
    ref = a.frobenius()
    if ref == 0.0:
        raise ZeroReference("reference has zero Frobenius norm")
    return (a - b).frobenius() / ref


@dataclass(frozen=True)
class SketchNorms:
    omega1_pinv_norm: float
    omega2_norm: float
    full_row_rank: bool


def realized_sketch_norms(v: QMatrix, omega: QMatrix, l: int, P: int, rtol: float = 1e-12) -> SketchNorms:
    """Split ``V^H Omega`` after row ``l - P`` and return the two norms.

    ``v`` must be the full N x N right singular factor of ``A``.
    """
    if v.rows != v.cols or v.rows != omega.rows:
        raise DimensionMismatch("need a square V matching the rows of Omega")
    w = v.H @ omega
    k = l - P
    s1 = singular_values(w[:k, :])
    rank_ok = bool(s1.size and s1[-1] > rtol * s1[0])
    pinv_norm = 1.0 / s1[-1] if rank_ok else math.inf
    w2 = w[k:, :]
    return SketchNorms(pinv_norm, spectral_norm(w2) if w2.rows else 0.0, rank_ok)
