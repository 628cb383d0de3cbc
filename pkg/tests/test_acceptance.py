"""Acceptance suite: one test per criterion, each at its stated tolerance.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from quatspec import bench
from quatspec.circulant import (
    CONVOLUTION_VARIANTS,
    AlgebraOp,
    CirculantOp,
    algebra_predict,
    circular_convolve,
    convolution_theorem_check,
    inverse_implicit_residual,
    kernel_from_spectrum,
    left_spectrum,
    make_operator,
)
from quatspec.qft import QftPlan, qft_matrix, transform
from quatspec.quat_core import AXIS_I, Axis, Quaternion
from quatspec.quat_linalg import QTensor, qsvd
from quatspec.spectral_clip import (
    clip_detailed,
    pad_kernel,
    singular_values,
    spectral_norm,
    substitute_kernel,
    violation_rate,
    xi_for_kernel,
)


def _axes(rng, count):
    return [Axis(*rng.standard_normal(3)) for _ in range(count)]


@pytest.mark.criterion(1, "QFT unitarity, N=2..64, 20 axes, <=1e-10, <=10 s")
def test_c1_qft_unitarity(record_property):
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    for mu in _axes(rng, 20):
        for n in range(2, 65):
            q = qft_matrix(n, mu).entries
            eye = QTensor.identity(n).data
            worst = max(worst, np.abs((q.H @ q).data - eye).max(), np.abs((q @ q.H).data - eye).max())
    elapsed = time.perf_counter() - t0
    record_property("max_err", f"{worst:.2e}")
    record_property("seconds", f"{elapsed:.2f}")
    assert worst <= 1e-10
    assert elapsed <= 10.0


@pytest.mark.criterion(2, "DFT special case for axis i, N in {4,8,16}, <=1e-10")
def test_c2_dft_special_case(record_property):
    rng = np.random.default_rng(102)
    worst = 0.0
    for n in (4, 8, 16):
        for _ in range(10):
            z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            out = transform(QTensor.from_complex(z), QftPlan(n, AXIS_I))
            # classical DFT written out, not through numpy.fft
            k = np.arange(n)
            ref = np.exp(-2j * np.pi * np.outer(k, k) / n) @ z / math.sqrt(n)
            worst = max(worst, np.abs(out.w + 1j * out.x - ref).max())
            assert np.abs(out.data[:, 2:]).max() <= 1e-15
    record_property("max_err", f"{worst:.2e}")
    assert worst <= 1e-10


@pytest.mark.criterion(3, "eigen-residual, 100 kernels N=4..16 x 5 axes, <=1e-9, <=30 s")
def test_c3_eigen_residual(record_property):
    rng = np.random.default_rng(103)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        op = CirculantOp(QTensor.random(int(rng.integers(4, 17)), rng))
        for mu in _axes(rng, 5):
            worst = max(worst, left_spectrum(op, mu).residual(op))
    elapsed = time.perf_counter() - t0
    record_property("max_residual", f"{worst:.2e}")
    record_property("seconds", f"{elapsed:.2f}")
    assert worst <= 1e-9
    assert elapsed <= 30.0


@pytest.mark.criterion(4, "spectrum <-> kernel round trip, 100 kernels, <=1e-10")
def test_c4_bijection(record_property):
    rng = np.random.default_rng(104)
    worst = 0.0
    for i in range(100):
        shape = (int(rng.integers(2, 17)),) if i % 2 == 0 else tuple(int(s) for s in rng.integers(2, 7, 2))
        k = QTensor.random(shape, rng)
        mu = _axes(rng, 1)[0]
        worst = max(worst, kernel_from_spectrum(left_spectrum(k, mu)).kernel.max_abs_diff(k))
    record_property("max_err", f"{worst:.2e}")
    assert worst <= 1e-10


@pytest.mark.criterion(5, "circulant algebra rules incl. rotated axes and inverse eigenvector, N=4,6, <=1e-8")
def test_c5_algebra(record_property):
    rng = np.random.default_rng(105)
    worst = {op: 0.0 for op in AlgebraOp}
    implicit = 0.0
    for n in (4, 6):
        for _ in range(10):
            mu = _axes(rng, 1)[0]
            a = CirculantOp(QTensor.random(n, rng))
            b = CirculantOp(QTensor.random(n, rng))
            p = Quaternion(*rng.standard_normal(4))
            cases = {
                AlgebraOp.SUM: (a, b),
                AlgebraOp.SCALE_LEFT: (p, a),
                AlgebraOp.SCALE_RIGHT: (a, p),
                AlgebraOp.PRODUCT: (a, b),
                AlgebraOp.INVERSE: (a,),
            }
            for op, args in cases.items():
                worst[op] = max(worst[op], algebra_predict(op, *args, axis=mu).residual())
            implicit = max(implicit, inverse_implicit_residual(a, mu))
    for op, v in worst.items():
        record_property(op.value, f"{v:.2e}")
    record_property("inverse_implicit", f"{implicit:.2e}")
    assert max(worst.values()) <= 1e-8
    assert implicit <= 1e-8


@pytest.mark.criterion(6, "four convolution theorems, 50 pairs N=8, <=1e-8; real reduction <=1e-10")
def test_c6_convolution_theorems(record_property):
    rng = np.random.default_rng(106)
    worst = 0.0
    for _ in range(50):
        f, h = QTensor.random(8, rng), QTensor.random(8, rng)
        mu = _axes(rng, 1)[0]
        for variant in CONVOLUTION_VARIANTS:
            worst = max(worst, convolution_theorem_check(f, h, variant, mu))
    real_worst = 0.0
    for _ in range(10):
        f = QTensor.from_components(rng.standard_normal(8))
        h = QTensor.from_components(rng.standard_normal(8))
        for variant in CONVOLUTION_VARIANTS:
            real_worst = max(real_worst, convolution_theorem_check(f, h, variant, AXIS_I))
        # and the classical statement itself
        conv = circular_convolve(h, f, "left", fast=False).w
        real_worst = max(real_worst, np.abs(np.fft.fft(conv) - np.fft.fft(f.w) * np.fft.fft(h.w)).max())
    record_property("max_dev", f"{worst:.2e}")
    record_property("real_max_dev", f"{real_worst:.2e}")
    assert worst <= 1e-8
    assert real_worst <= 1e-10


@pytest.mark.criterion(7, "Xi singular values == QSVD oracle, 50 1D + 20 2D kernels, 1e-7 rel, <=120 s")
def test_c7_oracle_equivalence(record_property):
    rng = np.random.default_rng(107)
    t0 = time.perf_counter()
    worst = 0.0
    cases = [(int(n),) for n in rng.integers(2, 9, 50)] + [tuple(int(s) for s in rng.integers(2, 7, 2)) for _ in range(20)]
    cases[-1] = (6, 6)
    for shape in cases:
        k = QTensor.random(shape, rng)
        fast = singular_values(k, _axes(rng, 1)[0])
        slow = qsvd(make_operator(k).materialize())
        assert fast.shape == slow.shape
        worst = max(worst, np.abs(fast - slow).max() / slow[0])
    elapsed = time.perf_counter() - t0
    record_property("max_rel_dev", f"{worst:.2e}")
    record_property("seconds", f"{elapsed:.2f}")
    assert worst <= 1e-7
    assert elapsed <= 120.0


@pytest.mark.criterion(8, "substitute 9x9 kernel on 32x32: max sigma <= T(1+1e-6); ||Bx|| <= 1.1T for >=99.9%")
@pytest.mark.parametrize("fraction", [0.2, 0.5, 0.8])
def test_c8_clipping_contract(record_property, fraction):
    kernel = substitute_kernel(9)
    padded = pad_kernel(kernel, (32, 32))
    t = fraction * spectral_norm(padded)
    res = clip_detailed(kernel, t, padded_shape=(32, 32))
    ratio = spectral_norm(res.spectral_kernel) / t
    rate = violation_rate(res.kernel, t, tolerance=0.1, samples=1000, seed=0)
    record_property(f"T={fraction}max:sigma/T", f"{ratio:.12f}")
    record_property(f"T={fraction}max:violations", f"{rate:.3f}")
    assert ratio <= 1 + 1e-6
    assert rate <= 0.001


@pytest.mark.slow
@pytest.mark.criterion(9, "bench slopes: clip 2+-0.5 over N=16..256, oracle >=4 over N=4,6,8")
def test_c9_complexity(record_property):
    rows = bench.run_bench([16, 32, 64, 128, 256], seed=0, oracle_max=0)
    clip_slope, _ = bench.slopes(rows)
    oracle_rows = bench.run_bench([4, 6, 8], seed=0)
    _, oracle_slope = bench.slopes(oracle_rows)
    record_property("clip_slope", f"{clip_slope:.2f}")
    record_property("oracle_slope", f"{oracle_slope:.2f}")
    assert abs(clip_slope - 2.0) <= 0.5
    assert oracle_slope >= 4.0


@pytest.mark.criterion(10, "singleton blocks: 1/2 in 1D, 1/2/4 in 2D by parity")
def test_c10_structural_counts(record_property):
    rng = np.random.default_rng(110)
    checked = 0
    for n in range(1, 21):
        xi = xi_for_kernel(QTensor.random(n, rng))
        assert len(xi.singletons) == (2 if n % 2 == 0 else 1) <= 2
        assert xi.partition_ok()
        checked += 1
    for m in range(1, 9):
        for n in range(1, 9):
            xi = xi_for_kernel(QTensor.random((m, n), rng))
            expected = (2 if m % 2 == 0 else 1) * (2 if n % 2 == 0 else 1)
            assert len(xi.singletons) == expected <= 4
            assert xi.partition_ok()
            checked += 1
    record_property("shapes", checked)
