"""Exact singular values of quaternion convolutions and spectral-norm clipping.

For a circulant ``B`` and a user axis ``mu``, expanding signals in the
columns of ``Q^mu`` turns ``B^H B`` into a matrix Xi whose only nonzeros sit
on the diagonal and at positions ``(n, [N - n])``. Entries are built from the
left eigenvalues ``lambda_n`` of ``B`` at axis ``-mu``::

    Xi[n, n] = |lambda_n|^2
    Xi[n, m] = perplex part of conj(lambda_n) lambda_m,   m = [N - n]

where "perplex" is the component in span{mu2, mu mu2}. After grouping each
index with its partner, Xi is block diagonal with 1x1 and 2x2 Hermitian
blocks, and its eigenvalues are the squared singular values of ``B``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numba
import numpy as np

from ._jacobi import jacobi_svd
from .circulant import LeftSpectrum, batch_apply, left_spectrum, make_operator, unvec, vec
from .errors import OracleSizeError, QuatDomainError, ShapeMismatchError
from .quat_core import DEFAULT_AXIS, Axis, _check_orthogonal, from_symplectic, hamilton, qabs2, qconj, to_symplectic
from .quat_linalg import QTensor, as_qtensor, from_complex_adjoint, hermitian_eigen_2x2, qsvd, to_complex_adjoint
from .qft import Normalization, QftPlan, Side, fast_transform

log = logging.getLogger(__name__)

__all__ = [
    "XiBlocks",
    "ClipResult",
    "partner_index",
    "build_xi",
    "xi_for_kernel",
    "singular_values",
    "spectral_norm",
    "clip",
    "clip_detailed",
    "spatial_clip",
    "pad_kernel",
    "oracle_clip",
    "ORACLE_MAX_SIDE",
    "block_eigen_union_check",
    "operator_norms",
    "violation_rate",
    "adjoint_power_norm",
    "substitute_kernel",
    "default_padded_size",
]

ORACLE_MAX_SIDE = 8

# relative slack on T^2 below which a kernel already counts as within budget
NO_OP_SLACK = 1e-12


# ---------------------------------------------------------------------------
# Xi blocks


def partner_index(shape: tuple[int, ...]) -> np.ndarray:
    """Vectorized index of ``[N - n]`` (1D) or ``([M - i], [N - j])`` (2D) for every index."""
    idx = np.arange(math.prod(shape))
    if len(shape) == 1:
        return (-idx) % shape[0]
    m, n = shape
    i, j = idx % m, idx // m
    return (-i) % m + m * ((-j) % n)


def _eig2(a: np.ndarray, c: np.ndarray, b2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues ``(e_hi, e_lo)`` of ``[[a, b], [conj(b), c]]`` with ``|b|^2 = b2``.

    The small eigenvalue is taken from the determinant to avoid cancellation.
    """
    mean = 0.5 * (a + c)
    rad = np.sqrt((0.5 * (a - c)) ** 2 + b2)
    hi = mean + rad
    det = a * c - b2
    with np.errstate(divide="ignore", invalid="ignore"):
        lo = np.where(hi > 0.0, det / np.where(hi > 0.0, hi, 1.0), mean - rad)
    return hi, lo


@dataclass(frozen=True)
class XiBlocks:
    """Block structure of Xi.

    ``pairs[k] = (n, m)`` owns the 2x2 block ``[[diag_n[k], off[k]],
    [conj(off[k]), diag_m[k]]]`` (``off`` is a quaternion component array);
    ``singletons[k]`` owns the 1x1 block ``singleton_values[k]``. Indices are
    vectorized (column-major for grids).
    """

    axis: Axis
    mu2: Axis
    shape: tuple[int, ...]
    pairs: np.ndarray
    singletons: np.ndarray
    diag_n: np.ndarray
    diag_m: np.ndarray
    off: np.ndarray
    singleton_values: np.ndarray

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    def block(self, k: int) -> QTensor:
        """The k-th 2x2 block as a quaternion matrix."""
        out = np.zeros((2, 2, 4))
        out[0, 0, 0] = self.diag_n[k]
        out[1, 1, 0] = self.diag_m[k]
        out[0, 1] = self.off[k]
        out[1, 0] = qconj(self.off[k])
        return QTensor(out)

    @property
    def blocks(self) -> list:
        """2x2 QTensor blocks followed by the real singleton values."""
        return [self.block(k) for k in range(len(self.pairs))] + [float(v) for v in self.singleton_values]

    def pair_eigenvalues(self) -> tuple[np.ndarray, np.ndarray]:
        return _eig2(self.diag_n, self.diag_m, qabs2(self.off))

    def eigenvalues(self) -> np.ndarray:
        """All block eigenvalues (the squared singular values), descending."""
        hi, lo = self.pair_eigenvalues()
        return np.sort(np.concatenate([hi, lo, self.singleton_values]))[::-1]

    def assemble(self) -> QTensor:
        """Dense Xi in the original index order (a symmetric permutation of the block-diagonal form)."""
        n = self.size
        out = np.zeros((n, n, 4))
        s = self.singletons
        out[s, s, 0] = self.singleton_values
        p, q = self.pairs[:, 0], self.pairs[:, 1]
        out[p, p, 0] = self.diag_n
        out[q, q, 0] = self.diag_m
        out[p, q] = self.off
        out[q, p] = qconj(self.off)
        return QTensor(out)

    def partition_ok(self) -> bool:
        """Every index appears in exactly one block."""
        seen = np.concatenate([self.singletons, self.pairs.ravel()])
        return seen.size == self.size and np.array_equal(np.sort(seen), np.arange(self.size))


def _pairing(shape: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    partner = partner_index(shape)
    idx = np.arange(partner.size)
    singletons = idx[partner == idx]
    lo = idx[idx < partner]
    return np.stack([lo, partner[lo]], axis=1).reshape(-1, 2), singletons


def build_xi(spectrum: LeftSpectrum, mu2: Axis | None = None) -> XiBlocks:
    """Xi blocks from left eigenvalues computed at axis ``-mu``.

    ``spectrum.axis`` must be ``-mu`` for the user axis ``mu``; the returned
    record stores ``mu``. ``mu2`` defaults to ``mu.perpendicular()``.
    """
    mu = -spectrum.axis
    mu2 = mu.perpendicular() if mu2 is None else mu2
    _check_orthogonal(mu, mu2)
    lam = vec(spectrum.values).data
    shape = spectrum.shape
    pairs, singletons = _pairing(shape)
    z1, z2 = to_symplectic(lam, mu, mu2)
    zero = np.zeros_like(z1)
    par = from_symplectic(z1, zero, mu, mu2)
    perp = from_symplectic(zero, z2, mu, mu2)
    mag2 = qabs2(lam)
    p, q = pairs[:, 0], pairs[:, 1]
    off = hamilton(qconj(par[p]), perp[q]) + hamilton(qconj(perp[p]), par[q])
    return XiBlocks(
        axis=mu,
        mu2=mu2,
        shape=shape,
        pairs=pairs,
        singletons=singletons,
        diag_n=mag2[p],
        diag_m=mag2[q],
        off=off,
        singleton_values=mag2[singletons],
    )


def xi_for_kernel(kernel, axis: Axis = DEFAULT_AXIS, mu2: Axis | None = None) -> XiBlocks:
    kernel = as_qtensor(kernel)
    return build_xi(left_spectrum(make_operator(kernel), -axis), mu2)


def singular_values(kernel, axis: Axis = DEFAULT_AXIS) -> np.ndarray:
    """Singular values of the circulant with this kernel, descending, one per index."""
    ev = xi_for_kernel(kernel, axis).eigenvalues()
    return np.sqrt(np.maximum(ev, 0.0))


def spectral_norm(kernel, axis: Axis = DEFAULT_AXIS) -> float:
    sv = singular_values(kernel, axis)
    return float(sv[0]) if sv.size else 0.0


def block_eigen_union_check(xi: XiBlocks, tol: float = 1e-8) -> bool:
    """Singular values of the assembled Xi equal the union of per-block eigenvalue magnitudes.

    The per-block eigenvalues come from :func:`hermitian_eigen_2x2`; the
    assembled matrix goes through the QSVD oracle.
    """
    per_block = [abs(float(v)) for v in xi.singleton_values]
    for k in range(len(xi.pairs)):
        lam, _ = hermitian_eigen_2x2(xi.block(k))
        per_block.extend(abs(float(v)) for v in lam)
    union = np.sort(np.array(per_block))[::-1]
    full = qsvd(xi.assemble())
    scale = max(1.0, float(union[0]) if union.size else 0.0)
    return union.shape == full.shape and bool(np.max(np.abs(union - full), initial=0.0) <= tol * scale)


# ---------------------------------------------------------------------------
# clipping


def default_padded_size(support: int) -> int:
    """CLI padding rule: four times the support, rounded up to even."""
    n = 4 * support
    return n + (n % 2)


def pad_kernel(kernel, padded_shape: tuple[int, ...]) -> QTensor:
    """Embed a kernel in the top-left corner of a zero array of ``padded_shape``."""
    kernel = as_qtensor(kernel)
    padded_shape = tuple(padded_shape)
    if len(padded_shape) != kernel.ndim or any(k > p for k, p in zip(kernel.shape, padded_shape)):
        raise ShapeMismatchError(f"support {kernel.shape} does not fit in padded size {padded_shape}")
    out = np.zeros(padded_shape + (4,))
    out[tuple(slice(0, k) for k in kernel.shape)] = kernel.data
    return QTensor(out)


def spatial_clip(kernel, support: tuple[int, ...]) -> QTensor:
    """Zero every entry outside the top-left ``support`` region."""
    kernel = as_qtensor(kernel)
    support = tuple(support)
    if len(support) != kernel.ndim or any(s > n for s, n in zip(support, kernel.shape)):
        raise ShapeMismatchError(f"support {support} does not fit in kernel of shape {kernel.shape}")
    out = np.zeros_like(kernel.data)
    region = tuple(slice(0, s) for s in support)
    out[region] = kernel.data[region]
    return QTensor(out)


@dataclass(frozen=True)
class ClipResult:
    """Outputs of one clipping run.

    ``kernel`` is the final (padded-size) kernel; ``spectral_kernel`` is the
    result before the spatial-support step.
    """

    kernel: QTensor
    spectral_kernel: QTensor
    threshold: float
    support: tuple[int, ...]
    factors: np.ndarray
    no_op: bool
    rescaled_blocks: int = 0
    iterations: int = 1
    extras: dict = field(default_factory=dict)

    @property
    def support_kernel(self) -> QTensor:
        """The final kernel cropped to its spatial support."""
        region = tuple(slice(0, s) for s in self.support)
        return QTensor(self.kernel.data[region])


def _diag_targets(a, c, hi, lo, t2):
    """New diagonal of a 2x2 block after capping its eigenvalues at ``t2``."""
    hi_c, lo_c = np.minimum(hi, t2), np.minimum(np.maximum(lo, 0.0), t2)
    gap = hi - lo
    mixed = gap > 0.0
    safe = np.where(mixed, gap, 1.0)
    # diagonal of the projectors onto the upper eigenspace
    pa = np.where(mixed, (a - lo) / safe, 1.0)
    pc = np.where(mixed, (c - lo) / safe, 1.0)
    new_a = np.where(mixed, hi_c * pa + lo_c * (1.0 - pa), np.minimum(a, t2))
    new_c = np.where(mixed, hi_c * pc + lo_c * (1.0 - pc), np.minimum(c, t2))
    return new_a, new_c


def _real_factors(target, mag2):
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(mag2 > 0.0, np.sqrt(np.maximum(target, 0.0) / np.where(mag2 > 0.0, mag2, 1.0)), 0.0)
    return np.minimum(r, 1.0)


def _block_shrink(rn, rm, a, c, b2, threshold):
    """Uniform factor pulling a reweighted block's top eigenvalue down to ``T^2``."""
    hi_new, _ = _eig2(rn * rn * a, rm * rm * c, (rn * rm) ** 2 * b2)
    over = hi_new > threshold * threshold * (1.0 + NO_OP_SLACK)
    return np.where(over, threshold / np.sqrt(np.where(over, hi_new, 1.0)), 1.0), over


def _reference_step(kernel: QTensor, threshold: float, axis: Axis, enforce_bound: bool):
    """Steps 1-5 through LeftSpectrum/XiBlocks; returns (top eigenvalue, kernel, factors, rescaled)."""
    spec = left_spectrum(make_operator(kernel), -axis)
    xi = build_xi(spec, axis.perpendicular())
    t2 = threshold * threshold
    n = xi.size
    target = np.empty(n)

    # 1x1 blocks clip exactly
    target[xi.singletons] = np.minimum(xi.singleton_values, t2)

    # 2x2 blocks: clip the eigenvalues of Xi^{1/2} at T, read the new diagonal
    a, c = xi.diag_n, xi.diag_m
    hi, lo = xi.pair_eigenvalues()
    p, q = xi.pairs[:, 0], xi.pairs[:, 1]
    target[p], target[q] = _diag_targets(a, c, hi, lo, t2)
    factors = _real_factors(target, qabs2(vec(spec.values).data))

    rescaled = 0
    if enforce_bound and len(p):
        # diagonal weighting alone can leave a block's top eigenvalue above T^2;
        # shrink both factors of such a block uniformly
        shrink, over = _block_shrink(factors[p], factors[q], a, c, qabs2(xi.off), threshold)
        factors[p] *= shrink
        factors[q] *= shrink
        rescaled = int(over.sum())

    values = unvec(QTensor(vec(spec.values).data * factors[:, None]), spec.shape)
    plan = QftPlan(spec.shape, spec.axis, Side.RIGHT, True, Normalization.ASYMMETRIC)
    top = float(xi.eigenvalues()[0]) if n else 0.0
    return top, fast_transform(values, plan), _unvec_real(factors, spec.shape), rescaled


def _unvec_real(v: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if len(shape) == 1:
        return v.reshape(shape)
    return v.reshape(shape[1], shape[0]).T


@numba.njit(cache=True)
def _eig2_scalar(a, c, b2):
    mean = 0.5 * (a + c)
    rad = math.sqrt((0.5 * (a - c)) ** 2 + b2)
    hi = mean + rad
    lo = (a * c - b2) / hi if hi > 0.0 else mean - rad
    return hi, lo


@numba.njit(cache=True)
def _target_scalar(a, hi, lo, t2):
    gap = hi - lo
    if gap <= 0.0:
        return min(a, t2)
    pa = (a - lo) / gap
    return min(hi, t2) * pa + min(max(lo, 0.0), t2) * (1.0 - pa)


@numba.njit(cache=True)
def _fused_factors(l1, l2, threshold, slack, enforce):
    """Per-index real factors on a 2D grid (1D signals use one row)."""
    m, n = l1.shape
    t2 = threshold * threshold
    a = np.empty((m, n))
    for i in range(m):
        for j in range(n):
            a[i, j] = abs(l1[i, j]) ** 2 + abs(l2[i, j]) ** 2
    b2 = np.empty((m, n))
    factors = np.empty((m, n))
    top = 0.0
    for i in range(m):
        for j in range(n):
            pi = (m - i) % m
            pj = (n - j) % n
            off = l1[i, j].conjugate() * l2[pi, pj] - l2[i, j] * l1[pi, pj].conjugate()
            b2[i, j] = off.real * off.real + off.imag * off.imag
            hi, lo = _eig2_scalar(a[i, j], a[pi, pj], b2[i, j])
            top = max(top, hi)
            if a[i, j] > 0.0:
                factors[i, j] = min(1.0, math.sqrt(max(_target_scalar(a[i, j], hi, lo, t2), 0.0) / a[i, j]))
            else:
                factors[i, j] = 0.0
    rescaled = 0
    if not enforce:
        return factors, top, rescaled
    out = np.empty((m, n))
    for i in range(m):
        for j in range(n):
            pi = (m - i) % m
            pj = (n - j) % n
            rn = factors[i, j]
            rm = factors[pi, pj]
            hi, _ = _eig2_scalar(rn * rn * a[i, j], rm * rm * a[pi, pj], (rn * rm) ** 2 * b2[i, j])
            if hi > t2 * (1.0 + slack):
                out[i, j] = rn * threshold / math.sqrt(hi)
                if i * n + j <= pi * n + pj:
                    rescaled += 1
            else:
                out[i, j] = rn
    return out, top, rescaled


def _fused_step(kernel: QTensor, threshold: float, axis: Axis, enforce_bound: bool):
    """Same computation as the reference step, done on grid arrays in the (mu, mu2) frame.

    With ``x = z1 + z2 mu2``, the left eigenvalues at axis ``-mu`` are
    ``L1 + L2 mu2`` with ``L1 = sum z1 e^{+i..}`` and ``L2 = sum z2 e^{-i..}``;
    the perplex part of ``conj(lambda_n) lambda_m`` is
    ``(conj(L1_n) L2_m - L2_n conj(L1_m)) mu2``.
    """
    mu2 = axis.perpendicular()
    z1, z2 = to_symplectic(kernel.data, axis, mu2)
    size = z1.size
    spatial_axes = tuple(range(1, z1.ndim + 1))
    # one stacked FFT: sum z e^{+i..} = conj(FFT(conj z))
    spec = np.fft.fftn(np.stack([z1.conj(), z2]), axes=spatial_axes)
    l1, l2 = spec[0].conj(), spec[1]
    grid = l1.shape if l1.ndim == 2 else (1,) + l1.shape
    factors, top, rescaled = _fused_factors(
        l1.reshape(grid), l2.reshape(grid), float(threshold), NO_OP_SLACK, bool(enforce_bound)
    )
    factors = factors.reshape(l1.shape)
    # inverse: z1 = FFT(l1')/size, z2 = conj(FFT(conj l2'))/size
    back = np.fft.fftn(np.stack([l1 * factors, (l2 * factors).conj()]), axes=spatial_axes) / size
    out = from_symplectic(back[0], back[1].conj(), axis, mu2)
    return float(top), QTensor(out), factors, int(rescaled)


def clip_detailed(
    kernel,
    threshold: float,
    axis: Axis = DEFAULT_AXIS,
    *,
    padded_shape: tuple[int, ...] | None = None,
    support: tuple[int, ...] | None = None,
    spatial: bool = True,
    enforce_bound: bool = True,
    iterations: int = 1,
    reference: bool = False,
) -> ClipResult:
    """Clip the spectral norm of a 1D or 2D quaternion convolution to ``threshold``.

    If ``padded_shape`` is given, ``kernel`` is the support-sized filter and is
    zero-padded top-left to that shape; otherwise ``kernel`` is taken as
    already padded and ``support`` (default: the full shape) marks the region
    kept by the spatial step. ``iterations > 1`` alternates the spectral and
    spatial projections that many times. ``reference=True`` runs the
    spectral step through :class:`LeftSpectrum`/:class:`XiBlocks` instead of
    the fused array path.
    """
    if not threshold > 0.0:
        raise QuatDomainError(f"threshold must be positive, got {threshold}")
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    kernel = as_qtensor(kernel)
    if padded_shape is not None:
        support = kernel.shape if support is None else tuple(support)
        kernel = pad_kernel(kernel, padded_shape)
    support = kernel.shape if support is None else tuple(support)
    if len(support) != kernel.ndim or any(s > n for s, n in zip(support, kernel.shape)):
        raise ShapeMismatchError(f"support {support} larger than padded size {kernel.shape}")

    step = _reference_step if reference else _fused_step
    current = kernel
    for it in range(iterations):
        top, spectral, factors, rescaled = step(current, threshold, axis, enforce_bound)
        if it == 0 and top <= threshold * threshold * (1.0 + NO_OP_SLACK):
            return ClipResult(kernel, kernel, threshold, support, np.ones(kernel.shape), True)
        current = spatial_clip(spectral, support) if spatial else spectral
    return ClipResult(current, spectral, threshold, support, factors, False, rescaled, iterations)


def clip(kernel, threshold: float, axis: Axis = DEFAULT_AXIS, **kwargs) -> QTensor:
    """Clipped kernel; see :func:`clip_detailed` for the options."""
    return clip_detailed(kernel, threshold, axis, **kwargs).kernel


# ---------------------------------------------------------------------------
# oracle and Monte-Carlo checks


def oracle_clip(kernel, threshold: float, axis: Axis = DEFAULT_AXIS) -> QTensor:
    """Brute-force clip: QSVD of the materialized operator, singular values capped at T.

    ``axis`` is unused (the matrix route needs no transform axis); it is kept
    so the call mirrors :func:`clip`. Only kernels of at most 8 per side.
    """
    if not threshold > 0.0:
        raise QuatDomainError(f"threshold must be positive, got {threshold}")
    kernel = as_qtensor(kernel)
    if max(kernel.shape) > ORACLE_MAX_SIDE:
        raise OracleSizeError(f"oracle limited to {ORACLE_MAX_SIDE} per side, got {kernel.shape}")
    op = make_operator(kernel)
    x = to_complex_adjoint(op.materialize()).matrix
    u, s, vh = jacobi_svd(x)
    clipped = (u * np.minimum(s, threshold)) @ vh
    mat = from_complex_adjoint(clipped, tol=1e-8)
    return unvec(QTensor(mat.data[:, 0]), kernel.shape)


def _random_unit(shape: tuple[int, ...], samples: int, rng: np.random.Generator) -> np.ndarray:
    x = rng.standard_normal((samples,) + shape + (4,))
    norms = np.sqrt(np.sum(x * x, axis=tuple(range(1, x.ndim))))
    return x / norms.reshape((samples,) + (1,) * (x.ndim - 1))


def operator_norms(kernel, xs: np.ndarray) -> np.ndarray:
    """``||B x||`` for a batch of signals, by FFT circular convolution (16 real products)."""
    y = batch_apply(kernel, xs)
    return np.sqrt(np.sum(y * y, axis=tuple(range(1, y.ndim))))


_MC_CHUNK = 100


def violation_rate(
    kernel, threshold: float, tolerance: float = 0.1, samples: int = 1000, seed: int = 0
) -> float:
    """Fraction of random unit signals with ``||B x|| > (1 + tolerance) T``."""
    kernel = as_qtensor(kernel)
    rng = np.random.default_rng(seed)
    bound = (1.0 + tolerance) * threshold
    violations = 0
    for start in range(0, samples, _MC_CHUNK):
        count = min(_MC_CHUNK, samples - start)
        norms = operator_norms(kernel, _random_unit(kernel.shape, count, rng))
        violations += int(np.sum(norms > bound))
    return violations / samples


def adjoint_power_norm(kernel, iterations: int = 500, seed: int = 0) -> float:
    """Spectral norm estimate by power iteration on the complex adjoint of the operator."""
    kernel = as_qtensor(kernel)
    x = to_complex_adjoint(make_operator(kernel).materialize()).matrix
    g = x.conj().T @ x
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(g.shape[0]) + 1j * rng.standard_normal(g.shape[0])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(iterations):
        w = g @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        est = nw
    return float(math.sqrt(est))


def substitute_kernel(size: int = 9) -> QTensor:
    """Deterministic integer-pattern quaternion filter used for the clipping experiments."""
    i, j = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    w = (3 * i + 5 * j) % 7 - 3
    x = (i * j) % 5 - 2
    y = (i + 2 * j) % 9 - 4
    z = (2 * i + j * j) % 11 - 5
    return QTensor.from_components(w, x, y, z) * 10.0
