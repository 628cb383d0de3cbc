from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from quatspec._jacobi import jacobi_svd
from quatspec.circulant import CirculantOp, left_spectrum
from quatspec.errors import QuatDomainError, ShapeMismatchError
from quatspec.qft import qft_matrix
from quatspec.quat_core import DEFAULT_AXIS, Quaternion
from quatspec.quat_linalg import (
    ComplexAdjoint,
    QTensor,
    from_complex_adjoint,
    hermitian_eigen_2x2,
    hermitian_transpose,
    matmul,
    qsvd,
    rank_deficiency_witness,
    to_complex_adjoint,
)

from conftest import random_axis

I = Quaternion(0, 1, 0, 0)
J = Quaternion(0, 0, 1, 0)
K = Quaternion(0, 0, 0, 1)



def test_identity_product(rng):
    a = QTensor.random((3, 3), rng)
    assert (QTensor.identity(3) @ a).max_abs_diff(a) == 0.0


def test_product_hermitian_reverses(rng):
    a = QTensor.random((3, 3), rng)
    b = QTensor.random((3, 3), rng)
    lhs = hermitian_transpose(a @ b)
    rhs = hermitian_transpose(b) @ hermitian_transpose(a)
    assert lhs.max_abs_diff(rhs) < 1e-12


def test_ij_matrix_product():
    a = QTensor.from_quaternions([I], (1, 1))
    b = QTensor.from_quaternions([J], (1, 1))
    assert matmul(a, b)[0, 0] == K


def test_matmul_shape_mismatch(rng):
    with pytest.raises(ShapeMismatchError):
        QTensor.random((2, 3), rng) @ QTensor.random((2, 3), rng)


def test_hermitian_transpose_examples(rng):
    eye = QTensor.identity(4)
    assert hermitian_transpose(eye).max_abs_diff(eye) == 0.0
    a = QTensor.random((3, 5), rng)
    assert hermitian_transpose(hermitian_transpose(a)).max_abs_diff(a) == 0.0
    q = qft_matrix(4, DEFAULT_AXIS).entries
    q_neg = qft_matrix(4, -DEFAULT_AXIS).entries
    assert hermitian_transpose(q).max_abs_diff(q_neg) < 1e-15


def test_adjoint_of_j():
    X = to_complex_adjoint(QTensor.from_quaternions([J], (1, 1))).matrix
    np.testing.assert_array_equal(X, np.array([[0, 1], [-1, 0]], dtype=complex))


def test_adjoint_of_identity():
    np.testing.assert_array_equal(to_complex_adjoint(QTensor.identity(4)).matrix, np.eye(8))


def test_adjoint_homomorphism(rng):
    a = QTensor.random((3, 3), rng)
    b = QTensor.random((3, 3), rng)
    lhs = to_complex_adjoint(a @ b).matrix
    rhs = (to_complex_adjoint(a) @ to_complex_adjoint(b)).matrix
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_adjoint_roundtrip_exact(rng):
    a = QTensor.random((4, 3), rng)
    assert from_complex_adjoint(to_complex_adjoint(a)).max_abs_diff(a) == 0.0


def test_from_adjoint_rejects_broken_blocks(rng):
    X = to_complex_adjoint(QTensor.random((2, 2), rng)).matrix.copy()
    X[3, 3] += 1e-3
    with pytest.raises(QuatDomainError):
        from_complex_adjoint(ComplexAdjoint(X))
    with pytest.raises(QuatDomainError):
        from_complex_adjoint(np.zeros((3, 2)))


def test_jacobi_matches_lapack(rng):
    for m, n in ((6, 6), (8, 5), (3, 7), (16, 16)):
        a = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        s = jacobi_svd(a, compute_uv=False)
        ref = np.linalg.svd(a, compute_uv=False)
        np.testing.assert_allclose(s, ref, rtol=1e-10, atol=1e-12)
        u, s2, vh = jacobi_svd(a)
        np.testing.assert_allclose((u * s2) @ vh, a, atol=1e-11)


def test_qsvd_examples(rng):
    q = Quaternion(1.0, -2.0, 0.5, 3.0)
    np.testing.assert_allclose(qsvd(QTensor.from_quaternions([q], (1, 1))), [q.norm()], atol=1e-14)
    np.testing.assert_allclose(qsvd(qft_matrix(8, random_axis(rng)).entries), np.ones(8), atol=1e-12)
    d = QTensor.from_quaternions([2, 0, 0, 0, I, 0, 0, 0, K * 3.0], (3, 3))
    np.testing.assert_allclose(qsvd(d), [3.0, 2.0, 1.0], atol=1e-13)


def test_qsvd_zero_and_rectangular(rng):
    np.testing.assert_array_equal(qsvd(QTensor.zeros((3, 3))), np.zeros(3))
    a = QTensor.random((5, 3), rng)
    s = qsvd(a)
    assert s.shape == (3,)
    np.testing.assert_allclose(s, qsvd(hermitian_transpose(a)), atol=1e-9)


def test_qsvd_unitary_invariance(rng):
    a = QTensor.random((6, 6), rng)
    u = qft_matrix(6, random_axis(rng)).entries
    np.testing.assert_allclose(qsvd(u @ a), qsvd(a), atol=1e-8)
    np.testing.assert_allclose(qsvd(a @ u), qsvd(a), atol=1e-8)


def test_adjoint_singular_values_pair(rng):
    a = QTensor.random((5, 5), rng)
    s = np.linalg.svd(to_complex_adjoint(a).matrix, compute_uv=False)
    np.testing.assert_allclose(s[0::2], s[1::2], atol=1e-9)


def _eig_residual(h: QTensor, lam, vecs: QTensor) -> float:
    worst = 0.0
    for c in range(2):
        v = QTensor(vecs.data[:, c])
        worst = max(worst, (h @ v).max_abs_diff(v * float(lam[c])))
    return worst


def test_hermitian_eigen_examples():
    lam, _ = hermitian_eigen_2x2(QTensor.from_quaternions([5.0, 0, 0, -1.5], (2, 2)))
    np.testing.assert_allclose(lam, [-1.5, 5.0], atol=1e-14)
    h = QTensor.from_quaternions([1.0, J, -J, 1.0], (2, 2))
    lam, vecs = hermitian_eigen_2x2(h)
    np.testing.assert_allclose(lam, [0.0, 2.0], atol=1e-14)
    assert _eig_residual(h, lam, vecs) <= 1e-9


def test_hermitian_eigen_degenerate():
    h = QTensor.from_quaternions([2.0, 0, 0, 2.0], (2, 2))
    lam, vecs = hermitian_eigen_2x2(h)
    np.testing.assert_allclose(lam, [2.0, 2.0])
    assert _eig_residual(h, lam, vecs) == 0.0


def test_hermitian_eigen_rejects_non_hermitian():
    with pytest.raises(QuatDomainError):
        hermitian_eigen_2x2(QTensor.from_quaternions([1.0, J, J, 1.0], (2, 2)))


def _random_hermitian(rng) -> QTensor:
    a = QTensor.random((2, 2), rng)
    return a + hermitian_transpose(a)


def test_hermitian_eigen_random(rng):
    for _ in range(200):
        h = _random_hermitian(rng)
        lam, vecs = hermitian_eigen_2x2(h)
        assert lam.sum() == pytest.approx(h.w[0, 0] + h.w[1, 1], abs=1e-12)
        assert _eig_residual(h, lam, vecs) <= 1e-9
        np.testing.assert_allclose(np.sort(np.abs(lam))[::-1], qsvd(h), atol=1e-10)


def test_rank_deficiency_witness(rng):
    assert rank_deficiency_witness(QTensor.identity(4)) == pytest.approx(1.0, abs=1e-14)
    assert rank_deficiency_witness(QTensor.zeros((3, 3))) == 0.0
    op = CirculantOp(QTensor.random(6, rng))
    c = op.materialize()
    spec = left_spectrum(op, random_axis(rng))
    for k in range(6):
        lam = spec.values[k]
        assert rank_deficiency_witness(c - QTensor.identity(6) * lam) <= 1e-8


def test_qtensor_is_immutable(rng):
    a = QTensor.random((2, 2), rng)
    with pytest.raises(ValueError):
        a.data[0, 0, 0] = 1.0


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (3, 3, 4), elements=st.floats(-5, 5)))
def test_qsvd_matches_hermitian_transpose(data):
    a = QTensor(data)
    np.testing.assert_allclose(qsvd(a), qsvd(hermitian_transpose(a)), atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (3, 4, 4), elements=st.floats(-5, 5)))
def test_adjoint_roundtrip_property(data):
    a = QTensor(data)
    assert from_complex_adjoint(to_complex_adjoint(a)).max_abs_diff(a) == 0.0
