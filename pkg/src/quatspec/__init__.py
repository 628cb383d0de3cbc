"""Quaternion Fourier transforms, quaternion circulant operators and spectral-norm clipping."""

from __future__ import annotations

from ._threads import apply_thread_cap

apply_thread_cap()

from .circulant import (  # noqa: E402
    CirculantOp,
    DoublyBlockCirculantOp,
    LeftSpectrum,
    algebra_predict,
    convolution_theorem_check,
    kernel_from_spectrum,
    left_spectrum,
    left_spectrum_of_hermitian,
    make_operator,
)
from .errors import OracleSizeError, QuatDomainError, ShapeMismatchError  # noqa: E402
from .qft import Normalization, QftPlan, Side, fast_transform, qft_matrix, transform  # noqa: E402
from .quat_core import DEFAULT_AXIS, Axis, Quaternion  # noqa: E402
from .quat_linalg import QTensor, qsvd  # noqa: E402
from .spectral_clip import build_xi, clip, clip_detailed, oracle_clip, singular_values, spectral_norm  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "Axis",
    "CirculantOp",
    "DEFAULT_AXIS",
    "DoublyBlockCirculantOp",
    "LeftSpectrum",
    "Normalization",
    "OracleSizeError",
    "QTensor",
    "QftPlan",
    "QuatDomainError",
    "Quaternion",
    "ShapeMismatchError",
    "Side",
    "algebra_predict",
    "build_xi",
    "clip",
    "clip_detailed",
    "convolution_theorem_check",
    "fast_transform",
    "kernel_from_spectrum",
    "left_spectrum",
    "left_spectrum_of_hermitian",
    "make_operator",
    "oracle_clip",
    "qft_matrix",
    "qsvd",
    "singular_values",
    "spectral_norm",
    "transform",
]
