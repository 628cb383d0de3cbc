"""Quaternion circulant and doubly-block circulant operators and their left spectra.

A circulant with kernel ``k`` acts by circular left convolution,
``y[i] = sum_n k[i - n] x[n]``; the doubly-block circulant does the same on an
``M x N`` grid. Grids are vectorized column-major, ``(i, j) -> i + M j``, so
that the materialized operator reads ``D[(i, j), (m, n)] = k[i - m, j - n]``.

Left eigenvalues come from the asymmetric right QFT of the kernel; the
matching eigenvectors are the columns of ``Q^{-mu}`` (or Kronecker products
of them in 2D).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import QuatDomainError, ShapeMismatchError
from .quat_core import (
    DEFAULT_AXIS,
    Axis,
    Quaternion,
    _check_orthogonal,
    exp_axis,
    from_symplectic,
    hamilton,
    qabs2,
    qconj,
    rotate,
    to_symplectic,
)
from .quat_linalg import QTensor, as_qtensor, from_complex_adjoint, matmul, rank_deficiency_witness, to_complex_adjoint
from .qft import Normalization, QftPlan, Side, fast_transform, qft_matrix, transform
from .tolerances import SINGULAR_TOL

__all__ = [
    "CirculantOp",
    "DoublyBlockCirculantOp",
    "LeftSpectrum",
    "MatrixPolynomial",
    "AlgebraOp",
    "AlgebraPrediction",
    "make_operator",
    "vec",
    "unvec",
    "circular_convolve",
    "cyclic_permutation",
    "as_matrix_polynomial",
    "eigenvector_matrix",
    "eigenvector_columns",
    "batch_apply",
    "left_spectrum",
    "left_spectrum_2d",
    "left_spectrum_of_hermitian",
    "kernel_from_spectrum",
    "spectrum_flip_error",
    "spectrum_flip_check",
    "rotated_axis",
    "algebra_predict",
    "inverse_implicit_residual",
    "CONVOLUTION_VARIANTS",
    "convolution_theorem_check",
]

# operators with at most this many samples use direct O(N^2) application
DIRECT_MATVEC_LIMIT = 64

# HAMILTON[c, a, b]: component c of e_a * e_b for the basis (1, i, j, k)
_HAMILTON = hamilton(np.eye(4)[None, :, :], np.eye(4)[:, None, :]).transpose(2, 1, 0)


# ---------------------------------------------------------------------------
# vectorization and convolution


def vec(x) -> QTensor:
    """Column-major vectorization of a grid, ``(i, j) -> i + M j``; 1D passes through."""
    x = as_qtensor(x)
    if x.ndim == 1:
        return x
    if x.ndim != 2:
        raise ShapeMismatchError(f"expected a 1D or 2D signal, got {x.shape}")
    return QTensor(np.swapaxes(x.data, 0, 1).reshape(-1, 4))


def unvec(v, shape: tuple[int, ...]) -> QTensor:
    v = as_qtensor(v)
    if len(shape) == 1:
        return v.reshape(shape)
    m, n = shape
    return QTensor(np.swapaxes(v.data.reshape(n, m, 4), 0, 1))


def _fft_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``sum_i a[i] b[n - i]`` (Hamilton order a*b) as 16 real circular convolutions."""
    axes = tuple(range(a.ndim - 1))
    fa = np.fft.fftn(a, axes=axes)
    fb = np.fft.fftn(b, axes=axes)
    fc = np.einsum("cab,...a,...b->...c", _HAMILTON, fa, fb)
    return np.fft.ifftn(fc, axes=axes).real


def batch_apply(kernel, xs: np.ndarray) -> np.ndarray:
    """Apply the circulant with ``kernel`` to a batch ``xs`` of shape ``(B,) + kernel.shape + (4,)``."""
    kernel = as_qtensor(kernel)
    spatial = tuple(range(1, kernel.ndim + 1))
    fk = np.fft.fftn(kernel.data, axes=tuple(range(kernel.ndim)))
    fx = np.fft.fftn(xs, axes=spatial)
    fy = np.einsum("cab,...a,...b->...c", _HAMILTON, fk[None], fx)
    return np.fft.ifftn(fy, axes=spatial).real


def _direct_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    shape = a.shape[:-1]
    out = np.zeros_like(a)
    for idx in np.ndindex(*shape):
        shifted = b
        for ax, s in enumerate(idx):
            shifted = np.roll(shifted, s, axis=ax)
        out += hamilton(a[idx], shifted)
    return out


def circular_convolve(h, f, side: str = "left", fast: bool | None = None) -> QTensor:
    """Circular convolution of two equal-shape 1D or 2D signals.

    ``side="left"``: ``sum_i h[i] f[n - i]`` (kernel multiplies from the left).
    ``side="right"``: ``sum_i f[n - i] h[i]``.
    """
    h = as_qtensor(h)
    f = as_qtensor(f)
    if h.shape != f.shape:
        raise ShapeMismatchError(f"convolution operands differ in shape: {h.shape} vs {f.shape}")
    if fast is None:
        fast = h.size > DIRECT_MATVEC_LIMIT
    conv = _fft_convolve if fast else _direct_convolve
    if side == "left":
        return QTensor(conv(h.data, f.data))
    if side == "right":
        # sum_i f[n - i] h[i] = sum_j f[j] h[n - j]
        return QTensor(conv(f.data, h.data))
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def _reverse(data: np.ndarray) -> np.ndarray:
    """``t[n] = k[-n]`` along every spatial axis."""
    out = data
    for ax in range(data.ndim - 1):
        out = np.roll(np.flip(out, axis=ax), 1, axis=ax)
    return out


# ---------------------------------------------------------------------------
# operators


class _Circulant:
    """Shared behaviour of the 1D and 2D operators; the kernel defines everything."""

    ndim: int = 0

    def __init__(self, kernel) -> None:
        kernel = as_qtensor(kernel)
        if kernel.ndim != self.ndim:
            raise ShapeMismatchError(f"{type(self).__name__} needs a {self.ndim}D kernel, got {kernel.shape}")
        self._kernel = kernel

    @property
    def kernel(self) -> QTensor:
        return self._kernel

    @property
    def shape(self) -> tuple[int, ...]:
        return self._kernel.shape

    @property
    def size(self) -> int:
        return self._kernel.size

    def _like(self, kernel) -> _Circulant:
        return type(self)(kernel)

    def materialize(self) -> QTensor:
        """Dense ``size x size`` matrix in the vectorized ordering."""
        pos = np.array(list(np.ndindex(*self.shape[::-1])))[:, ::-1]  # vec order
        diff = (pos[:, None, :] - pos[None, :, :]) % np.array(self.shape)
        return QTensor(self._kernel.data[tuple(diff[..., d] for d in range(self.ndim))])

    def apply(self, x, fast: bool | None = None) -> QTensor:
        """Apply to a signal of the kernel's shape."""
        x = as_qtensor(x)
        if x.shape != self.shape:
            raise ShapeMismatchError(f"signal shape {x.shape} does not match operator {self.shape}")
        return circular_convolve(self._kernel, x, "left", fast=fast)

    def matvec(self, x, fast: bool | None = None) -> QTensor:
        """Apply to a signal given either in grid shape or vectorized."""
        x = as_qtensor(x)
        if x.shape == self.shape:
            return self.apply(x, fast)
        if x.shape == (self.size,):
            return vec(self.apply(unvec(x, self.shape), fast))
        raise ShapeMismatchError(f"signal shape {x.shape} does not match operator {self.shape}")

    def transpose_kernel(self) -> _Circulant:
        return self._like(_reverse(self._kernel.data))

    def hermitian_kernel(self) -> _Circulant:
        return self._like(qconj(_reverse(self._kernel.data)))

    def _check_same(self, other: _Circulant) -> None:
        if type(other) is not type(self) or other.shape != self.shape:
            raise ShapeMismatchError("operators must have the same type and shape")

    def __add__(self, other: _Circulant) -> _Circulant:
        self._check_same(other)
        return self._like(self._kernel + other._kernel)

    def __sub__(self, other: _Circulant) -> _Circulant:
        self._check_same(other)
        return self._like(self._kernel - other._kernel)

    def __matmul__(self, other: _Circulant) -> _Circulant:
        """Operator product ``self @ other``; its kernel is ``k_self * k_other``."""
        self._check_same(other)
        return self._like(circular_convolve(self._kernel, other._kernel, "left"))

    def scale_left(self, p) -> _Circulant:
        """``p C``: every kernel entry multiplied by ``p`` from the left."""
        return self._like(hamilton(Quaternion.coerce(p).to_array(), self._kernel.data))

    def scale_right(self, p) -> _Circulant:
        """``C p``: every kernel entry multiplied by ``p`` from the right."""
        return self._like(hamilton(self._kernel.data, Quaternion.coerce(p).to_array()))

    def inverse(self) -> _Circulant:
        """Inverse operator (also circulant); raises if the operator is singular."""
        mat = self.materialize()
        if rank_deficiency_witness(mat) <= SINGULAR_TOL:
            raise QuatDomainError("operator is singular")
        inv = from_complex_adjoint(np.linalg.inv(to_complex_adjoint(mat).matrix), tol=1e-8)
        return self._like(unvec(QTensor(inv.data[:, 0]), self.shape))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(shape={self.shape})"


class CirculantOp(_Circulant):
    """Circulant operator with kernel ``[c0 ... c_{N-1}]``; entry ``(i, j) = c[i - j]``."""

    ndim = 1


class DoublyBlockCirculantOp(_Circulant):
    """Doubly-block circulant acting on vectorized ``M x N`` grids."""

    ndim = 2


def make_operator(kernel) -> _Circulant:
    kernel = as_qtensor(kernel)
    if kernel.ndim == 1:
        return CirculantOp(kernel)
    if kernel.ndim == 2:
        return DoublyBlockCirculantOp(kernel)
    raise ShapeMismatchError(f"kernels are 1D or 2D, got {kernel.shape}")


def _as_operator(op) -> _Circulant:
    return op if isinstance(op, _Circulant) else make_operator(op)


# ---------------------------------------------------------------------------
# matrix polynomial form


def cyclic_permutation(n: int) -> np.ndarray:
    """Real ``n x n`` matrix with ``P[i, j] = 1`` iff ``i = j + 1 (mod n)``."""
    return np.roll(np.eye(n), 1, axis=0)


@dataclass(frozen=True)
class MatrixPolynomial:
    coefficients: QTensor
    error: float


def as_matrix_polynomial(op: CirculantOp) -> MatrixPolynomial:
    """Coefficients of ``C = sum_k c_k P^k`` and the reconstruction error of that sum."""
    op = _as_operator(op)
    if op.ndim != 1:
        raise ShapeMismatchError("matrix polynomial form is defined for 1D circulants")
    n = op.size
    p = cyclic_permutation(n)
    power = np.eye(n)
    total = np.zeros((n, n, 4))
    for c in op.kernel.data:
        total += power[:, :, None] * c
        power = p @ power
    err = float(np.abs(total - op.materialize().data).max())
    return MatrixPolynomial(op.kernel, err)


# ---------------------------------------------------------------------------
# left spectra


def eigenvector_matrix(shape: tuple[int, ...], axis: Axis) -> QTensor:
    """Columns are the left eigenvectors shared by all circulants of ``shape``.

    1D: ``Q^{-axis}``. 2D: column ``u + M v`` holds ``a[(i, j)] = Q_M[i, u] Q_N[j, v]``
    (both at axis ``-axis``), vectorized in the same column-major order.
    """
    if len(shape) == 1:
        return qft_matrix(shape[0], -axis).entries
    m, n = shape
    qm = qft_matrix(m, -axis).entries.data
    qn = qft_matrix(n, -axis).entries.data
    # K[i, j, u, v] = qm[i, u] qn[j, v]
    k = hamilton(qm[:, None, :, None, :], qn[None, :, None, :, :])
    # rows and columns both vectorized column-major
    k = k.transpose(1, 0, 3, 2, 4).reshape(m * n, m * n, 4)
    return QTensor(k)


def eigenvector_columns(shape: tuple[int, ...], axis: Axis, columns) -> np.ndarray:
    """Selected columns of :func:`eigenvector_matrix`, each reshaped to the signal grid.

    Returns an array of shape ``(len(columns),) + shape + (4,)``.
    """
    columns = np.asarray(columns, dtype=np.int64)
    grids = np.meshgrid(*[np.arange(s) for s in shape], indexing="ij")
    if len(shape) == 1:
        freq = [columns]
    else:
        freq = [columns % shape[0], columns // shape[0]]
    angle = np.zeros((columns.size,) + tuple(shape))
    for f, g, size in zip(freq, grids, shape):
        angle += ((f.reshape((-1,) + (1,) * len(shape)) * g[None]) % size) / size
    return exp_axis(2.0 * np.pi * angle, axis) / math.sqrt(math.prod(shape))


# operators above this size check eigen-residuals through batched FFT application
DENSE_RESIDUAL_LIMIT = 256
_RESIDUAL_CHUNK = 256


@dataclass(frozen=True)
class LeftSpectrum:
    """Left eigenvalues of a circulant at a given axis.

    ``values`` has the kernel's shape; value ``k`` (vectorized) pairs with
    column ``k`` of :func:`eigenvector_matrix` as its eigenvector.
    """

    axis: Axis
    values: QTensor

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    def eigenvectors(self) -> QTensor:
        return eigenvector_matrix(self.shape, self.axis)

    def eigenvector(self, k: int) -> QTensor:
        return QTensor(self.eigenvectors().data[:, k])

    def residuals(self, op, columns=None) -> np.ndarray:
        """``||A a_k - lambda_k a_k||`` against operator ``op``, for all or selected k."""
        op = _as_operator(op)
        if op.shape != self.shape:
            raise ShapeMismatchError("spectrum and operator shapes differ")
        vals = vec(self.values).data
        if columns is None and op.size <= DENSE_RESIDUAL_LIMIT:
            return _eigen_residuals(op.materialize(), self.eigenvectors(), QTensor(vals))
        columns = np.arange(op.size) if columns is None else np.asarray(columns, dtype=np.int64)
        out = np.empty(columns.size)
        for start in range(0, columns.size, _RESIDUAL_CHUNK):
            cols = columns[start : start + _RESIDUAL_CHUNK]
            a = eigenvector_columns(self.shape, self.axis, cols)
            lam = vals[cols].reshape((cols.size,) + (1,) * op.ndim + (4,))
            diff = batch_apply(op.kernel, a) - hamilton(lam, a)
            out[start : start + cols.size] = np.sqrt((diff.reshape(cols.size, -1) ** 2).sum(axis=1))
        return out

    def residual(self, op, columns=None) -> float:
        return float(self.residuals(op, columns).max())


def _eigen_residuals(mat: QTensor, vecs: QTensor, vals: QTensor) -> np.ndarray:
    av = matmul(mat, vecs).data
    lv = hamilton(vals.data[None, :, :], vecs.data)
    return np.sqrt(qabs2(av - lv).sum(axis=0))


def _asym_right(kernel: QTensor, axis: Axis, inverse: bool = False) -> QTensor:
    plan = QftPlan(kernel.shape, axis, Side.RIGHT, inverse, Normalization.ASYMMETRIC)
    return fast_transform(kernel, plan)


def left_spectrum(op, axis: Axis = DEFAULT_AXIS) -> LeftSpectrum:
    """Left eigenvalues as the asymmetric right QFT of the kernel."""
    op = _as_operator(op)
    return LeftSpectrum(axis, _asym_right(op.kernel, axis))


def left_spectrum_2d(op, axis: Axis = DEFAULT_AXIS) -> LeftSpectrum:
    op = _as_operator(op)
    if op.ndim != 2:
        raise ShapeMismatchError("left_spectrum_2d needs a doubly-block circulant")
    return left_spectrum(op, axis)


def left_spectrum_of_hermitian(op, axis: Axis = DEFAULT_AXIS) -> LeftSpectrum:
    """Left eigenvalues of ``C^H``: conjugates of the asymmetric left QFT of C's kernel.

    The ordering is the same as :func:`left_spectrum` (column ``k`` of
    ``Q^{-axis}`` is the eigenvector of value ``k``).
    """
    op = _as_operator(op)
    plan = QftPlan(op.shape, axis, Side.LEFT, False, Normalization.ASYMMETRIC)
    return LeftSpectrum(axis, fast_transform(op.kernel, plan).conj())


def kernel_from_spectrum(spectrum: LeftSpectrum) -> _Circulant:
    """The unique circulant whose left spectrum at ``spectrum.axis`` is ``spectrum``."""
    return make_operator(_asym_right(spectrum.values, spectrum.axis, inverse=True))


def _flip_index(shape: tuple[int, ...]) -> tuple[np.ndarray, ...]:
    return tuple((-np.arange(s)) % s for s in shape)


def spectrum_flip_error(op, axis: Axis = DEFAULT_AXIS) -> float:
    """Max ``|lambda^mu_i - lambda^{-mu}_{[N - i]}|``."""
    op = _as_operator(op)
    a = left_spectrum(op, axis).values.data
    b = left_spectrum(op, -axis).values.data
    flipped = b[np.ix_(*_flip_index(op.shape))]
    return float(np.sqrt(qabs2(a - flipped)).max())


def spectrum_flip_check(op, axis: Axis = DEFAULT_AXIS, tol: float = 1e-10) -> bool:
    op = _as_operator(op)
    scale = 1.0 + op.kernel.norm()
    return spectrum_flip_error(op, axis) <= tol * scale


# ---------------------------------------------------------------------------
# eigenstructure of sums, products, scalings and inverses


class AlgebraOp(enum.Enum):
    SUM = "sum"
    SCALE_LEFT = "scale_left"
    SCALE_RIGHT = "scale_right"
    PRODUCT = "product"
    INVERSE = "inverse"


def rotated_axis(p, axis: Axis) -> Axis:
    """``p axis p^{-1}`` as an axis (``p`` nonzero)."""
    p = Quaternion.coerce(p)
    n = p.norm()
    if n == 0.0:
        raise QuatDomainError("cannot rotate by the zero quaternion")
    return Axis(rotate(p / n, axis.quaternion))


@dataclass(frozen=True)
class AlgebraPrediction:
    """Predicted eigenpairs of a derived operator.

    Column ``k`` of ``eigenvectors`` (vectorized) pairs with value ``k`` of
    ``values``; ``operator`` is the derived operator built from kernels.
    """

    op: AlgebraOp
    axis: Axis
    values: QTensor
    eigenvectors: QTensor
    operator: _Circulant

    def residuals(self) -> np.ndarray:
        return _eigen_residuals(self.operator.materialize(), self.eigenvectors, vec(self.values))

    def residual(self) -> float:
        return float(self.residuals().max())


def _values_at(op: _Circulant, axes: list[Axis]) -> np.ndarray:
    """Value ``k`` of the left spectrum at ``axes[k]``, for every vectorized k."""
    out = np.empty((op.size, 4))
    cache: dict[Axis, np.ndarray] = {}
    for k, ax in enumerate(axes):
        if ax not in cache:
            cache[ax] = vec(left_spectrum(op, ax).values).data
        out[k] = cache[ax][k]
    return out


def algebra_predict(op: AlgebraOp | str, *inputs, axis: Axis = DEFAULT_AXIS) -> AlgebraPrediction:
    """Predict the left eigenpairs of a sum, scaling, product or inverse.

    Inputs by operation: SUM ``(L, K)``; SCALE_LEFT ``(p, L)``; SCALE_RIGHT
    ``(L, p)``; PRODUCT ``(L, K)`` for ``LK``; INVERSE ``(L,)``.
    """
    op = AlgebraOp(op)
    if op is AlgebraOp.SUM:
        a, b = (_as_operator(x) for x in inputs)
        lam = vec(left_spectrum(a, axis).values).data
        kap = vec(left_spectrum(b, axis).values).data
        values, operator, vecs = lam + kap, a + b, None
    elif op is AlgebraOp.SCALE_LEFT:
        p, a = Quaternion.coerce(inputs[0]), _as_operator(inputs[1])
        lam = vec(left_spectrum(a, axis).values).data
        values, operator, vecs = hamilton(p.to_array(), lam), a.scale_left(p), None
    elif op is AlgebraOp.SCALE_RIGHT:
        a, p = _as_operator(inputs[0]), Quaternion.coerce(inputs[1])
        nu = rotated_axis(p, axis)
        lam = vec(left_spectrum(a, nu).values).data
        values, operator, vecs = hamilton(lam, p.to_array()), a.scale_right(p), None
    elif op is AlgebraOp.PRODUCT:
        a, b = (_as_operator(x) for x in inputs)
        kap = vec(left_spectrum(b, axis).values).data
        zero = qabs2(kap) == 0.0
        axes = [axis if z else rotated_axis(q, axis) for q, z in zip(kap, zero)]
        lam = _values_at(a, axes)
        values = hamilton(lam, kap)
        values[zero] = 0.0
        operator, vecs = a @ b, None
    else:
        (a,) = (_as_operator(x) for x in inputs)
        lam = vec(left_spectrum(a, axis).values).data
        if np.any(qabs2(lam) == 0.0):
            raise QuatDomainError("operator has a zero left eigenvalue and is singular")
        lam_inv = qconj(lam) / qabs2(lam)[:, None]
        w = eigenvector_matrix(a.shape, axis).data
        # z_k = lambda_k w_k lambda_k^{-1}
        z = hamilton(hamilton(lam[None, :, :], w), lam_inv[None, :, :])
        values, operator, vecs = lam_inv, a.inverse(), QTensor(z)
    if vecs is None:
        vecs = eigenvector_matrix(operator.shape, axis)
    return AlgebraPrediction(op, axis, unvec(QTensor(values), operator.shape), vecs, operator)


def inverse_implicit_residual(op, axis: Axis = DEFAULT_AXIS) -> float:
    """Check the inverse-eigenvector rule without inverting: ``z = L (lambda^{-1} z)``."""
    op = _as_operator(op)
    lam = vec(left_spectrum(op, axis).values).data
    lam_inv = qconj(lam) / qabs2(lam)[:, None]
    w = eigenvector_matrix(op.shape, axis).data
    z = hamilton(hamilton(lam[None, :, :], w), lam_inv[None, :, :])
    rhs = matmul(op.materialize(), QTensor(hamilton(lam_inv[None, :, :], z))).data
    return float(np.sqrt(qabs2(z - rhs).sum(axis=0)).max())


# ---------------------------------------------------------------------------
# convolution theorems


CONVOLUTION_VARIANTS = ("LL", "LR", "RL", "RR")


def _parts(g: QTensor, mu: Axis, mu2: Axis) -> tuple[np.ndarray, np.ndarray]:
    """``g = g1 + g2 mu2`` with ``g1``, ``g2`` in span{1, mu}, as component arrays."""
    z1, z2 = to_symplectic(g.data, mu, mu2)
    zero = np.zeros_like(z1)
    return from_symplectic(z1, zero, mu, mu2), from_symplectic(z2, zero, mu, mu2)


def convolution_theorem_check(f, h, variant: str, axis: Axis = DEFAULT_AXIS, mu2: Axis | None = None) -> float:
    """Max deviation between the two sides of a quaternion convolution theorem.

    ``variant`` is the convolution side followed by the transform side:
    ``R?`` uses ``f * h = sum_i f[n - i] h[i]``, ``L?`` uses
    ``h * f = sum_i h[i] f[n - i]``; ``?L``/``?R`` select the left or right
    symmetric transform. With ``G = G1 + G2 mu2`` the identities are::

        RL: F_L{f*h} = sqrt(N) (F1_L H_L + F2_L mu2 H_L^{-mu})
        RR: F_R{f*h} = sqrt(N) (F_R H1_R + F_R^{-mu} H2_R mu2)
        LL: F_L{h*f} = sqrt(N) (H1_L F_L + H2_L mu2 F_L^{-mu})
        LR: F_R{h*f} = sqrt(N) (H_R F1_R + H_R^{-mu} F2_R mu2)

    All transforms are evaluated directly, not through the FFT path.
    """
    f = as_qtensor(f)
    h = as_qtensor(h)
    variant = variant.upper()
    if variant not in CONVOLUTION_VARIANTS:
        raise ValueError(f"variant must be one of {CONVOLUTION_VARIANTS}, got {variant!r}")
    if f.shape != h.shape:
        raise ShapeMismatchError(f"f and h differ in shape: {f.shape} vs {h.shape}")
    mu2 = axis.perpendicular() if mu2 is None else mu2
    _check_orthogonal(axis, mu2)
    conv_side, tr_side = variant[0], Side.parse(variant[1])
    root = math.sqrt(f.size)
    m2 = mu2.to_array()

    def tr(g, ax):
        return transform(g, QftPlan(f.shape, ax, tr_side)).data

    if conv_side == "R":
        lhs = tr(circular_convolve(h, f, "right", fast=False), axis)
        a, b = f, h
    else:
        lhs = tr(circular_convolve(h, f, "left", fast=False), axis)
        a, b = h, f
    # a plays the role of the first factor in the printed identities
    if tr_side is Side.LEFT:
        a1, a2 = _parts(QTensor(tr(a, axis)), axis, mu2)
        rhs = hamilton(a1, tr(b, axis)) + hamilton(hamilton(a2, m2), tr(b, -axis))
    else:
        b1, b2 = _parts(QTensor(tr(b, axis)), axis, mu2)
        rhs = hamilton(tr(a, axis), b1) + hamilton(hamilton(tr(a, -axis), b2), m2)
    rhs = root * rhs
    return float(np.sqrt(qabs2(lhs - rhs)).max())
