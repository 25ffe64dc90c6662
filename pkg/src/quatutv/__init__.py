"""Quaternion UTV decompositions.

Dense quaternion matrices and tensors, QR/QRCP/SVD kernels, rank-revealing
URV/ULV factorizations, randomized compressed URV (CoR-QURV) for matrices and
transform-domain tensors, error bounds, and color image/video I/O.
"""
from .bounds import (BoundInputs, det_bound_matrix, det_bound_tensor, expected_bound_matrix,
                     expected_bound_tensor, realized_sketch_norms, relative_error)
from .errors import (BadParams, BadRank, ConfigError, ConvergenceFailure, DimensionMismatch,
                     FormatVersionMismatch, FrameSizeMismatch, IoError, NotAnAdjoint, ParseError, QuatError,
                     SingularSketch, ZeroReference)
from .media import load_bundle, load_frames, load_image, save_bundle, save_image
from .qfactor import QRFactors, SVDFactors, qqr, qqrcp, qsvd, singular_values, truncate_svd
from .qmatrix import QMatrix, complex_adjoint, conj_transpose, frobenius, from_adjoint, matmul, spectral_norm
from .qtensor import (QTensor, TransformSpec, apply_transform, facewise_product, identity_tensor,
                      qt_conj_transpose, qt_product)
from .quaternion import Quaternion, qgauss, qmodulus, qmul
from .sketch import CoRFactors, SketchParams, cor_qurv, draw_test_matrix, rand_qsvd, truncate_cor
from .tensor_utv import (TensorCoRFactors, TensorUTVFactors, cor_qturv, qtulv, qturv, tqt_rank, tqt_svd,
                         truncate_tqt)
from .utv import UTVFactors, qulv, qurv, truncate_qqrcp, truncate_utv

__version__ = "0.1.0"
