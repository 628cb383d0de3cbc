"""Quaternion Fourier matrices and the left/right 1D and 2D transforms.

Conventions: indices are zero-based and taken modulo N. A transform with
axis ``mu`` uses the kernel ``exp(-mu 2 pi n u / N)``; the left variant puts
it to the left of the signal sample, the right variant to the right. The
inverse flips the sign of the exponent. Symmetric normalization scales both
directions by ``1/sqrt(N)`` (``1/sqrt(MN)`` in 2D); asymmetric normalization
uses 1 forward and ``1/N`` (``1/(MN)``) inverse.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import QuatDomainError, ShapeMismatchError
from .quat_core import (
    DEFAULT_AXIS,
    Axis,
    axis_rotation_between,
    exp_axis,
    from_symplectic,
    hamilton,
    qconj,
    to_symplectic,
)
from .quat_linalg import QTensor, as_qtensor, matmul

__all__ = [
    "Side",
    "Normalization",
    "QftPlan",
    "QftMatrix",
    "qft_matrix",
    "transform",
    "fast_transform",
    "qft_self_product",
    "self_product_error",
    "conjugate_by_rotation",
    "coordinates_in_basis",
]

# rows of the direct transform evaluated per chunk, bounds peak memory
_DIRECT_CHUNK = 1 << 20


class Side(enum.Enum):
    LEFT = "L"
    RIGHT = "R"

    @classmethod
    def parse(cls, value) -> Side:
        if isinstance(value, Side):
            return value
        v = str(value).strip().upper()
        if v in ("L", "LEFT"):
            return cls.LEFT
        if v in ("R", "RIGHT"):
            return cls.RIGHT
        raise ValueError(f"unknown transform side {value!r}")


class Normalization(enum.Enum):
    SYMMETRIC = "symmetric"
    ASYMMETRIC = "asymmetric"


@dataclass(frozen=True)
class QftPlan:
    """Immutable description of one transform (1D when ``shape`` has one entry)."""

    shape: tuple[int, ...]
    axis: Axis = field(default=DEFAULT_AXIS)
    side: Side = Side.LEFT
    inverse: bool = False
    normalization: Normalization = Normalization.SYMMETRIC

    def __post_init__(self) -> None:
        shape = (self.shape,) if isinstance(self.shape, int) else tuple(int(s) for s in self.shape)
        if len(shape) not in (1, 2) or min(shape) < 1:
            raise ShapeMismatchError(f"plans cover 1D or 2D signals of positive size, got {shape}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "side", Side.parse(self.side))

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    @property
    def scale(self) -> float:
        if self.normalization is Normalization.SYMMETRIC:
            return 1.0 / math.sqrt(self.size)
        return 1.0 / self.size if self.inverse else 1.0

    @property
    def sign(self) -> float:
        """+1 for the forward exponent ``-mu``, -1 for the inverse."""
        return -1.0 if self.inverse else 1.0

    def inverted(self) -> QftPlan:
        return replace(self, inverse=not self.inverse)


@dataclass(frozen=True)
class QftMatrix:
    """``Q[i, j] = exp(-axis 2 pi (i j mod n) / n) / sqrt(n)``."""

    n: int
    axis: Axis
    entries: QTensor

    @property
    def H(self) -> QTensor:
        return self.entries.H

    def __matmul__(self, other):
        return matmul(self.entries, as_qtensor(other))


def _phase(n: int) -> np.ndarray:
    idx = np.arange(n)
    return 2.0 * np.pi * (np.outer(idx, idx) % n) / n


def qft_matrix(n: int, axis: Axis = DEFAULT_AXIS) -> QftMatrix:
    if n < 1:
        raise ShapeMismatchError("QFT size must be at least 1")
    entries = exp_axis(-_phase(n), axis) / math.sqrt(n)
    return QftMatrix(n, axis, QTensor(entries))


def _check_shape(x: QTensor, plan: QftPlan) -> None:
    if x.shape != plan.shape:
        raise ShapeMismatchError(f"signal shape {x.shape} does not match plan shape {plan.shape}")


def transform(x, plan: QftPlan) -> QTensor:
    """Direct O(N^2) evaluation of the transform; the reference implementation."""
    x = as_qtensor(x)
    _check_shape(x, plan)
    flat = x.data.reshape(-1, 4)
    # integer (frequency, position) index per dimension over the flattened grid
    grids = np.meshgrid(*[np.arange(s) for s in plan.shape], indexing="ij")
    idx = [g.ravel() for g in grids]
    total = flat.shape[0]
    out = np.empty_like(flat)
    rows = max(1, _DIRECT_CHUNK // total)
    for start in range(0, total, rows):
        stop = min(total, start + rows)
        angle = np.zeros((stop - start, total))
        for k, size in zip(idx, plan.shape):
            angle += (np.outer(k[start:stop], k) % size) / size
        e = exp_axis(-plan.sign * 2.0 * np.pi * angle, plan.axis)
        if plan.side is Side.LEFT:
            terms = hamilton(e, flat[None, :, :])
        else:
            terms = hamilton(flat[None, :, :], e)
        out[start:stop] = terms.sum(axis=1)
    return QTensor(out.reshape(x.data.shape) * plan.scale)


def fast_transform(x, plan: QftPlan) -> QTensor:
    """Transform through two complex FFTs of the symplectic parts.

    With ``x = z1 + z2 mu2`` (``z1``, ``z2`` in span{1, mu}) the left transform
    is ``DFT(z1) + DFT(z2) mu2``. For the right transform ``mu2`` passes
    through the exponential and flips its sign, so ``z2`` is transformed in
    the opposite direction.
    """
    x = as_qtensor(x)
    _check_shape(x, plan)
    mu = plan.axis
    mu2 = mu.perpendicular()
    z1, z2 = to_symplectic(x.data, mu, mu2)
    axes = tuple(range(len(plan.shape)))

    def dft(z, sign):
        # sign +1: sum z e^{-i...}; -1: sum z e^{+i...}; both unnormalized
        if sign > 0:
            return np.fft.fftn(z, axes=axes)
        return np.fft.ifftn(z, axes=axes, norm="forward")

    s = plan.sign
    f1 = dft(z1, s)
    f2 = dft(z2, s if plan.side is Side.LEFT else -s)
    return QTensor(from_symplectic(f1, f2, mu, mu2) * plan.scale)


def qft_self_product(n: int, axis: Axis | None = None) -> list[int]:
    """Permutation realized by ``Q Q`` (axis-independent): row r maps to ``[n - r]``."""
    if n < 1:
        raise ShapeMismatchError("QFT size must be at least 1")
    return [(n - r) % n for r in range(n)]


def self_product_error(n: int, axis: Axis = DEFAULT_AXIS) -> float:
    """Max entrywise deviation of ``Q Q`` from the permutation matrix of :func:`qft_self_product`."""
    q = qft_matrix(n, axis).entries
    qq = matmul(q, q).data
    perm = np.zeros((n, n, 4))
    perm[np.arange(n), qft_self_product(n), 0] = 1.0
    return float(np.abs(qq - perm).max())


def conjugate_by_rotation(q_nu: QftMatrix, mu: Axis) -> QftMatrix:
    """Rotate every entry of ``Q^nu`` into ``Q^mu`` via ``p Q conj(p)``."""
    p = axis_rotation_between(mu, q_nu.axis).to_array()
    rotated = hamilton(hamilton(p, q_nu.entries.data), qconj(p))
    return QftMatrix(q_nu.n, mu, QTensor(rotated))


def coordinates_in_basis(x, axis: Axis = DEFAULT_AXIS) -> QTensor:
    """Coefficients ``c`` with ``x = sum_k a_k c_k`` over the columns ``a_k`` of ``Q^mu``.

    ``c = Q^{-mu} x``; for a 2D grid the basis is the Kronecker product of the
    row and column matrices, and ``c`` keeps the grid shape.
    """
    x = as_qtensor(x)
    if x.ndim == 1:
        return matmul(qft_matrix(x.shape[0], -axis).entries, x)
    if x.ndim == 2:
        m, n = x.shape
        qm = qft_matrix(m, -axis).entries
        qn = qft_matrix(n, -axis).entries
        # entries of qm and qn share an axis and commute, so the sums may be nested
        y = matmul(qn, x.T).T
        return matmul(qm, y)
    raise ShapeMismatchError(f"expected a 1D or 2D signal, got shape {x.shape}")


def check_axis(axis) -> Axis:
    if isinstance(axis, Axis):
        return axis
    try:
        return Axis(*axis)
    except TypeError as exc:
        raise QuatDomainError(f"cannot interpret {axis!r} as an axis") from exc
