"""Dense quaternion tensors, the complex adjoint, and the brute-force QSVD.

The complex adjoint of ``A = A1 + A2 j`` (``A1``, ``A2`` complex) is the
``2M x 2N`` matrix ``[[A1, A2], [-conj(A2), conj(A1)]]``. It is an injective
ring homomorphism, so the singular values of a quaternion matrix are those of
its adjoint, each reported there twice.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ._jacobi import jacobi_svd
from .errors import QuatDomainError, ShapeMismatchError
from .quat_core import Quaternion, hamilton, qabs2, qconj
from .tolerances import ADJOINT_TOL, HERMITIAN_TOL, PAIR_TOL

log = logging.getLogger(__name__)

__all__ = [
    "QTensor",
    "ComplexAdjoint",
    "as_qtensor",
    "matmul",
    "hermitian_transpose",
    "to_complex_adjoint",
    "from_complex_adjoint",
    "qsvd",
    "hermitian_eigen_2x2",
    "rank_deficiency_witness",
]


class QTensor:
    """Immutable dense array of quaternions (vector, matrix or 2D grid).

    ``data`` has shape ``shape + (4,)``, row-major, trailing axis ``(w, x, y, z)``.
    """

    __slots__ = ("_data",)

    def __init__(self, data) -> None:
        arr = np.array(data, dtype=float)
        if arr.ndim == 0 or arr.shape[-1] != 4:
            raise ShapeMismatchError(f"quaternion data needs a trailing axis of 4, got {arr.shape}")
        arr.flags.writeable = False
        self._data = arr

    # construction --------------------------------------------------------

    @classmethod
    def from_components(cls, w, x=None, y=None, z=None) -> QTensor:
        w = np.asarray(w, dtype=float)
        parts = [w] + [np.zeros_like(w) if c is None else np.asarray(c, dtype=float) for c in (x, y, z)]
        return cls(np.stack(np.broadcast_arrays(*parts), axis=-1))

    @classmethod
    def from_complex(cls, z1, z2=None) -> QTensor:
        """Quaternions ``z1 + z2 j`` from complex arrays (``i`` as the complex unit)."""
        z1 = np.asarray(z1, dtype=complex)
        z2 = np.zeros_like(z1) if z2 is None else np.asarray(z2, dtype=complex)
        return cls.from_components(z1.real, z1.imag, z2.real, z2.imag)

    @classmethod
    def from_quaternions(cls, values: Iterable, shape: tuple[int, ...] | None = None) -> QTensor:
        arr = np.array([Quaternion.coerce(v).to_array() for v in values], dtype=float)
        if shape is not None:
            arr = arr.reshape(tuple(shape) + (4,))
        return cls(arr)

    @classmethod
    def zeros(cls, shape) -> QTensor:
        shape = (shape,) if isinstance(shape, int) else tuple(shape)
        return cls(np.zeros(shape + (4,)))

    @classmethod
    def identity(cls, n: int) -> QTensor:
        out = np.zeros((n, n, 4))
        out[np.arange(n), np.arange(n), 0] = 1.0
        return cls(out)

    @classmethod
    def random(cls, shape, rng: np.random.Generator | None = None) -> QTensor:
        """Standard-normal components."""
        rng = np.random.default_rng() if rng is None else rng
        shape = (shape,) if isinstance(shape, int) else tuple(shape)
        return cls(rng.standard_normal(shape + (4,)))

    # views ---------------------------------------------------------------

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> tuple[int, ...]:
        return self._data.shape[:-1]

    @property
    def ndim(self) -> int:
        return self._data.ndim - 1

    @property
    def size(self) -> int:
        return int(np.prod(self.shape, dtype=int))

    @property
    def w(self) -> np.ndarray:
        return self._data[..., 0]

    @property
    def x(self) -> np.ndarray:
        return self._data[..., 1]

    @property
    def y(self) -> np.ndarray:
        return self._data[..., 2]

    @property
    def z(self) -> np.ndarray:
        return self._data[..., 3]

    @property
    def H(self) -> QTensor:
        return hermitian_transpose(self)

    @property
    def T(self) -> QTensor:
        if self.ndim != 2:
            raise ShapeMismatchError("transpose needs a 2D tensor")
        return QTensor(np.swapaxes(self._data, 0, 1))

    def conj(self) -> QTensor:
        return QTensor(qconj(self._data))

    def reshape(self, *shape) -> QTensor:
        if len(shape) == 1 and not isinstance(shape[0], int):
            shape = tuple(shape[0])
        return QTensor(self._data.reshape(tuple(shape) + (4,)))

    def ravel(self) -> QTensor:
        return self.reshape(self.size)

    def abs2(self) -> np.ndarray:
        return qabs2(self._data)

    def norm(self) -> float:
        """Euclidean (Frobenius) norm over all entries."""
        return float(np.sqrt(np.sum(self._data * self._data)))

    def allclose(self, other, atol: float = 1e-12) -> bool:
        other = as_qtensor(other)
        return self.shape == other.shape and bool(np.max(np.abs(self._data - other._data), initial=0.0) <= atol)

    def max_abs_diff(self, other) -> float:
        other = as_qtensor(other)
        if self.shape != other.shape:
            raise ShapeMismatchError(f"{self.shape} vs {other.shape}")
        if self.size == 0:
            return 0.0
        return float(np.max(np.sqrt(qabs2(self._data - other._data))))

    # arithmetic ----------------------------------------------------------

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        out = self._data[idx + (slice(None),)] if Ellipsis not in idx else self._data[idx]
        if out.ndim == 1:
            return Quaternion.from_array(out)
        return QTensor(out)

    def __len__(self) -> int:
        return self.shape[0]

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def __add__(self, other):
        if isinstance(other, QTensor):
            return QTensor(self._data + other._data)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, QTensor):
            return QTensor(self._data - other._data)
        return NotImplemented

    def __neg__(self) -> QTensor:
        return QTensor(-self._data)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.integer, np.floating)):
            return QTensor(self._data * float(other))
        if isinstance(other, Quaternion):
            return QTensor(hamilton(self._data, other.to_array()))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.integer, np.floating)):
            return QTensor(self._data * float(other))
        if isinstance(other, Quaternion):
            return QTensor(hamilton(other.to_array(), self._data))
        return NotImplemented

    def __matmul__(self, other):
        if isinstance(other, QTensor):
            return matmul(self, other)
        return NotImplemented

    def __repr__(self) -> str:
        return f"QTensor(shape={self.shape})"


def as_qtensor(value) -> QTensor:
    if isinstance(value, QTensor):
        return value
    return QTensor(value)


def _components(a: np.ndarray) -> tuple[np.ndarray, ...]:
    return a[..., 0], a[..., 1], a[..., 2], a[..., 3]


def matmul(A, B) -> QTensor:
    """Quaternion matrix product ``A @ B`` (``B`` may be a vector)."""
    A = as_qtensor(A)
    B = as_qtensor(B)
    if A.ndim != 2 or B.ndim not in (1, 2):
        raise ShapeMismatchError(f"matmul needs a matrix times a matrix/vector, got {A.shape} @ {B.shape}")
    if A.shape[1] != B.shape[0]:
        raise ShapeMismatchError(f"inner dimensions differ: {A.shape} @ {B.shape}")
    aw, ax, ay, az = _components(A.data)
    bw, bx, by, bz = _components(B.data)
    out = np.stack(
        [
            aw @ bw - ax @ bx - ay @ by - az @ bz,
            aw @ bx + ax @ bw + ay @ bz - az @ by,
            aw @ by - ax @ bz + ay @ bw + az @ bx,
            aw @ bz + ax @ by - ay @ bx + az @ bw,
        ],
        axis=-1,
    )
    return QTensor(out)


def hermitian_transpose(A) -> QTensor:
    A = as_qtensor(A)
    if A.ndim != 2:
        raise ShapeMismatchError("hermitian transpose needs a 2D tensor")
    return QTensor(qconj(np.swapaxes(A.data, 0, 1)))


@dataclass(frozen=True)
class ComplexAdjoint:
    """``2M x 2N`` complex matrix ``[[A1, A2], [-conj(A2), conj(A1)]]``."""

    matrix: np.ndarray

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    def block_symmetry_error(self) -> float:
        m, n = self.rows // 2, self.cols // 2
        X = self.matrix
        e1 = np.abs(X[m:, n:] - X[:m, :n].conj())
        e2 = np.abs(X[m:, :n] + X[:m, n:].conj())
        return float(max(e1.max(initial=0.0), e2.max(initial=0.0)))

    def __matmul__(self, other: ComplexAdjoint) -> ComplexAdjoint:
        return ComplexAdjoint(self.matrix @ other.matrix)


def to_complex_adjoint(A) -> ComplexAdjoint:
    A = as_qtensor(A)
    if A.ndim == 1:
        A = A.reshape(A.size, 1)
    if A.ndim != 2:
        raise ShapeMismatchError("complex adjoint needs a 2D tensor")
    aw, ax, ay, az = _components(A.data)
    a1 = aw + 1j * ax
    a2 = ay + 1j * az
    return ComplexAdjoint(np.block([[a1, a2], [-a2.conj(), a1.conj()]]))


def from_complex_adjoint(X, tol: float = ADJOINT_TOL) -> QTensor:
    if not isinstance(X, ComplexAdjoint):
        X = ComplexAdjoint(np.asarray(X, dtype=complex))
    if X.rows % 2 or X.cols % 2:
        raise QuatDomainError("complex adjoint must have even dimensions")
    err = X.block_symmetry_error()
    scale = max(1.0, float(np.abs(X.matrix).max(initial=0.0)))
    if err > tol * scale:
        raise QuatDomainError(f"matrix is not a complex adjoint (block symmetry error {err:.3g})")
    m, n = X.rows // 2, X.cols // 2
    a1 = X.matrix[:m, :n]
    a2 = X.matrix[:m, n:]
    return QTensor.from_components(a1.real, a1.imag, a2.real, a2.imag)


def _pair_singular_values(s: np.ndarray) -> np.ndarray:
    smax = float(s[0]) if s.size else 0.0
    first, second = s[0::2], s[1::2]
    gap = float(np.max(np.abs(first - second), initial=0.0))
    if gap > PAIR_TOL * max(1.0, smax):
        log.warning("adjoint singular values failed to pair (max gap %.3g)", gap)
    return 0.5 * (first + second)


def qsvd(A) -> np.ndarray:
    """Singular values of a quaternion matrix, descending, each reported once.

    Computed by Jacobi SVD of the complex adjoint; this is the slow reference
    every fast singular-value routine in the package is checked against.
    """
    A = as_qtensor(A)
    if A.ndim != 2:
        raise ShapeMismatchError("qsvd needs a 2D tensor")
    if A.size == 0:
        return np.zeros(0)
    s = jacobi_svd(to_complex_adjoint(A).matrix, compute_uv=False)
    return np.maximum(_pair_singular_values(s), 0.0)


def _check_hermitian(H: QTensor, tol: float = HERMITIAN_TOL) -> None:
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got {H.shape}")
    err = H.max_abs_diff(hermitian_transpose(H))
    if err > tol * max(1.0, float(np.abs(H.data).max(initial=0.0))):
        raise QuatDomainError(f"matrix is not Hermitian (max |H - H^H| = {err:.3g})")


def hermitian_eigen_2x2(H) -> tuple[np.ndarray, QTensor]:
    """Eigenpairs ``H v = v lam`` of a 2x2 quaternion Hermitian matrix.

    Returns the two real eigenvalues in ascending order and a 2x2 QTensor
    whose columns are the matching unit eigenvectors. Each eigenvalue of the
    4x4 complex adjoint appears twice; one member of each pair is kept.
    """
    H = as_qtensor(H)
    if H.shape != (2, 2):
        raise ShapeMismatchError(f"expected a 2x2 matrix, got {H.shape}")
    _check_hermitian(H)
    X = to_complex_adjoint(H).matrix
    X = 0.5 * (X + X.conj().T)
    evals, evecs = np.linalg.eigh(X)
    lam = np.array([evals[0], evals[2]])
    scale = max(1.0, float(np.abs(evals).max()))
    if lam[1] - lam[0] <= PAIR_TOL * scale:
        # H is a real multiple of I: any basis diagonalizes it
        return np.full(2, evals.mean()), QTensor.identity(2)
    cols = []
    for k in (0, 2):
        a = evecs[:2, k]
        b = evecs[2:, k]
        # the adjoint's first-column image of x = x1 + x2 j is [x1; -conj(x2)]
        cols.append(QTensor.from_complex(a, -b.conj()).data)
    return lam, QTensor(np.stack(cols, axis=1))


def rank_deficiency_witness(A) -> float:
    """Smallest singular value of a square quaternion matrix (0 means singular)."""
    A = as_qtensor(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got {A.shape}")
    s = qsvd(A)
    return float(s[-1]) if s.size else 0.0
