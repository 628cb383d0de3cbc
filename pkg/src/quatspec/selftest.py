"""Desk-scale invariant suite behind ``quatspec selftest``."""

from __future__ import annotations

import math
import sys
import time
from contextlib import ExitStack
from dataclasses import dataclass
from typing import Callable
from unittest import mock

import numpy as np

from . import circulant, qft, qtensor_io, quat_linalg, spectral_clip
from .quat_core import AXIS_I, Axis
from .quat_linalg import QTensor


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value)) and self.value <= self.tol


def _axes(rng: np.random.Generator, count: int) -> list[Axis]:
    return [Axis(*rng.standard_normal(3)) for _ in range(count)]


def check_qft_unitarity(rng) -> float:
    worst = 0.0
    for ax in _axes(rng, 3):
        for n in range(2, 17):
            q = qft.qft_matrix(n, ax).entries
            err = np.abs((q.H @ q).data - QTensor.identity(n).data).max()
            worst = max(worst, float(err))
    return worst


def check_dft_special_case(rng) -> float:
    worst = 0.0
    for n in (4, 8, 16):
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        out = qft.transform(QTensor.from_complex(z), qft.QftPlan((n,), AXIS_I))
        got = out.w + 1j * out.x
        worst = max(worst, float(np.abs(got - np.fft.fft(z, norm="ortho")).max()))
    return worst


def check_fast_transform(rng) -> float:
    worst = 0.0
    mu = _axes(rng, 1)[0]
    for shape in ((4,), (7,), (16,), (3, 5)):
        x = QTensor.random(shape, rng)
        for side in qft.Side:
            for inverse in (False, True):
                for norm in qft.Normalization:
                    plan = qft.QftPlan(shape, mu, side, inverse, norm)
                    ref = qft.transform(x, plan)
                    rel = ref.max_abs_diff(qft.fast_transform(x, plan)) / max(1.0, ref.norm())
                    back = qft.transform(ref, plan.inverted()).max_abs_diff(x)
                    worst = max(worst, rel, back)
    return worst


def check_adjoint_homomorphism(rng) -> float:
    a = QTensor.random((3, 3), rng)
    b = QTensor.random((3, 3), rng)
    lhs = quat_linalg.to_complex_adjoint(a @ b).matrix
    rhs = quat_linalg.to_complex_adjoint(a).matrix @ quat_linalg.to_complex_adjoint(b).matrix
    rt = quat_linalg.from_complex_adjoint(quat_linalg.to_complex_adjoint(a)).max_abs_diff(a)
    return float(max(np.abs(lhs - rhs).max(), rt))


def check_eigen_residual(rng) -> float:
    worst = 0.0
    for n in range(4, 9):
        op = circulant.CirculantOp(QTensor.random(n, rng))
        mu = _axes(rng, 1)[0]
        worst = max(worst, circulant.left_spectrum(op, mu).residual(op))
    op = circulant.DoublyBlockCirculantOp(QTensor.random((3, 4), rng))
    return max(worst, circulant.left_spectrum(op, _axes(rng, 1)[0]).residual(op))


def check_spectrum_bijection(rng) -> float:
    worst = 0.0
    for shape in ((8,), (5,), (4, 3)):
        k = QTensor.random(shape, rng)
        mu = _axes(rng, 1)[0]
        back = circulant.kernel_from_spectrum(circulant.left_spectrum(k, mu)).kernel
        worst = max(worst, back.max_abs_diff(k))
    return worst


def check_algebra_rules(rng) -> float:
    worst = 0.0
    mu = _axes(rng, 1)[0]
    for n in (4, 6):
        a = circulant.CirculantOp(QTensor.random(n, rng))
        b = circulant.CirculantOp(QTensor.random(n, rng))
        p = QTensor.random(1, rng)[0]
        cases = [
            (circulant.AlgebraOp.SUM, (a, b)),
            (circulant.AlgebraOp.SCALE_LEFT, (p, a)),
            (circulant.AlgebraOp.SCALE_RIGHT, (a, p)),
            (circulant.AlgebraOp.PRODUCT, (a, b)),
            (circulant.AlgebraOp.INVERSE, (a,)),
        ]
        for op, args in cases:
            worst = max(worst, circulant.algebra_predict(op, *args, axis=mu).residual())
    return worst


def check_convolution_theorems(rng) -> float:
    worst = 0.0
    mu = _axes(rng, 1)[0]
    for _ in range(3):
        f = QTensor.random(8, rng)
        h = QTensor.random(8, rng)
        for variant in circulant.CONVOLUTION_VARIANTS:
            worst = max(worst, circulant.convolution_theorem_check(f, h, variant, mu))
    return worst


def check_oracle_equivalence(rng) -> float:
    worst = 0.0
    for shape in ((4,), (5,), (8,), (3, 3), (4, 5)):
        k = QTensor.random(shape, rng)
        mu = _axes(rng, 1)[0]
        fast = spectral_clip.singular_values(k, mu)
        slow = quat_linalg.qsvd(circulant.make_operator(k).materialize())
        worst = max(worst, float(np.abs(fast - slow).max() / slow[0]))
    return worst


def check_singleton_counts(rng) -> float:
    bad = 0
    for shape in ((5,), (6,), (3, 5), (4, 5), (4, 6)):
        xi = spectral_clip.xi_for_kernel(QTensor.random(shape, rng))
        expected = math.prod(2 if s % 2 == 0 else 1 for s in shape)
        bad += int(len(xi.singletons) != expected or not xi.partition_ok())
    return float(bad)


def check_clip_bound(rng) -> float:
    k = QTensor.random((5, 5), rng)
    padded = spectral_clip.pad_kernel(k, (12, 12))
    norm = spectral_clip.spectral_norm(padded)
    t = 0.6 * norm
    res = spectral_clip.clip_detailed(k, t, padded_shape=(12, 12))
    over = spectral_clip.spectral_norm(res.spectral_kernel) / t - 1.0
    # a budget above the norm must leave the kernel untouched
    same = spectral_clip.clip(padded, 2.0 * norm).max_abs_diff(padded)
    return max(over, 0.0) + same


def check_file_roundtrip(rng) -> float:
    t = QTensor.random((3, 4), rng) * 1e3
    doc = qtensor_io.loads(qtensor_io.dumps(qtensor_io.QTensorFile(t, (2, 2))))
    again = qtensor_io.loads(qtensor_io.dumps(doc))
    return float(np.abs(again.tensor.data - t.data).max()) + float(doc.support != (2, 2))


CHECKS: list[tuple[str, Callable, float]] = [
    ("qft_unitarity", check_qft_unitarity, 1e-10),
    ("dft_special_case", check_dft_special_case, 1e-10),
    ("fast_transform", check_fast_transform, 1e-9),
    ("adjoint_homomorphism", check_adjoint_homomorphism, 1e-12),
    ("eigen_residual", check_eigen_residual, 1e-9),
    ("spectrum_bijection", check_spectrum_bijection, 1e-10),
    ("algebra_rules", check_algebra_rules, 1e-8),
    ("convolution_theorems", check_convolution_theorems, 1e-8),
    ("oracle_equivalence", check_oracle_equivalence, 1e-7),
    ("singleton_counts", check_singleton_counts, 0.0),
    ("clip_bound", check_clip_bound, 1e-6),
    ("file_roundtrip", check_file_roundtrip, 0.0),
]


def _faulty_qft_matrix(original):
    def corrupted(n, axis=qft.DEFAULT_AXIS):
        q = original(n, axis)
        data = np.array(q.entries.data)
        data[0, 0] *= 1.01
        return qft.QftMatrix(q.n, q.axis, QTensor(data))

    return corrupted


FAULTS = ("qft",)


def run_selftest(out=sys.stdout, seed: int = 0, inject_fault: str | None = None) -> bool:
    """Run every check, print a pass/fail table, return True iff all pass."""
    results = []
    with ExitStack() as stack:
        if inject_fault == "qft":
            stack.enter_context(mock.patch.object(qft, "qft_matrix", _faulty_qft_matrix(qft.qft_matrix)))
        elif inject_fault is not None:
            raise ValueError(f"unknown fault {inject_fault!r}")
        for name, fn, tol in CHECKS:
            rng = np.random.default_rng(seed)
            t0 = time.perf_counter()
            try:
                value = float(fn(rng))
            except Exception as exc:  # a crashing check is a failed check
                print(f"FAIL  {name:<22} error: {exc}", file=out)
                results.append(CheckResult(name, float("inf"), tol))
                continue
            res = CheckResult(name, value, tol)
            results.append(res)
            status = "PASS" if res.passed else "FAIL"
            print(
                f"{status}  {name:<22} value={value:.3e}  tol={tol:.0e}  ({time.perf_counter() - t0:.2f}s)",
                file=out,
            )
    ok = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed", file=out)
    return ok
