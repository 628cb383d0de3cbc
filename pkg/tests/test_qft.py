from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quatspec.errors import QuatDomainError, ShapeMismatchError
from quatspec.qft import (
    Normalization,
    QftPlan,
    Side,
    conjugate_by_rotation,
    coordinates_in_basis,
    fast_transform,
    qft_matrix,
    qft_self_product,
    self_product_error,
    transform,
)
from quatspec.quat_core import AXIS_I, AXIS_J, DEFAULT_AXIS, Quaternion, hamilton, qexp
from quatspec.quat_linalg import QTensor, hermitian_transpose, matmul

from conftest import axes, random_axis


def _plans(shape, mu):
    for side in Side:
        for inverse in (False, True):
            for norm in Normalization:
                yield QftPlan(shape, mu, side, inverse, norm)


def test_n2_matrix_is_axis_independent(rng):
    expected = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    for _ in range(5):
        q = qft_matrix(2, random_axis(rng)).entries
        np.testing.assert_allclose(q.w, expected, atol=1e-15)
        np.testing.assert_allclose(q.data[..., 1:], 0.0, atol=1e-15)


def test_axis_i_is_classical_dft_matrix():
    q = qft_matrix(4, AXIS_I).entries
    dft = np.fft.fft(np.eye(4), norm="ortho")
    np.testing.assert_allclose(q.w + 1j * q.x, dft, atol=1e-15)
    np.testing.assert_array_equal(q.y, 0.0)


def test_first_row_and_symmetry(rng):
    q = qft_matrix(7, random_axis(rng)).entries
    np.testing.assert_allclose(q.w[0], 1 / math.sqrt(7), atol=1e-15)
    np.testing.assert_array_equal(q.data, np.swapaxes(q.data, 0, 1))


def test_size_zero_rejected():
    with pytest.raises(ShapeMismatchError):
        qft_matrix(0)


def test_unitarity_and_inverse_axis(rng):
    for _ in range(4):
        mu = random_axis(rng)
        for n in (1, 3, 8, 17, 32):
            q = qft_matrix(n, mu).entries
            eye = QTensor.identity(n).data
            assert np.abs((q.H @ q).data - eye).max() <= 1e-10
            assert np.abs((q @ q.H).data - eye).max() <= 1e-10
            assert hermitian_transpose(q).max_abs_diff(qft_matrix(n, -mu).entries) <= 1e-15


def test_vandermonde_rows(rng):
    n = 9
    mu = random_axis(rng)
    q = qft_matrix(n, mu).entries.data * math.sqrt(n)
    row1 = q[1]
    power = np.tile(np.array([1.0, 0, 0, 0]), (n, 1))
    for r in range(n):
        np.testing.assert_allclose(q[r], power, atol=1e-12)
        power = hamilton(power, row1)


def test_impulse_to_flat_spectrum():
    delta = QTensor.from_components([1.0, 0, 0, 0])
    for fn in (transform, fast_transform):
        out = fn(delta, QftPlan(4))
        np.testing.assert_allclose(out.w, 0.5, atol=1e-15)
        np.testing.assert_allclose(out.data[:, 1:], 0.0, atol=1e-15)


def test_axis_flip_inverts(rng):
    x = QTensor.random(8, rng)
    mu = random_axis(rng)
    there = transform(x, QftPlan(8, mu))
    assert transform(there, QftPlan(8, -mu)).max_abs_diff(x) < 1e-12
    for side in Side:
        flipped = transform(x, QftPlan(8, -mu, side))
        inverse = transform(x, QftPlan(8, mu, side, inverse=True))
        assert flipped.max_abs_diff(inverse) < 1e-12


def test_complex_input_axis_i_is_dft(rng):
    for n in (4, 8, 16):
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        out = transform(QTensor.from_complex(z), QftPlan(n, AXIS_I))
        np.testing.assert_allclose(out.w + 1j * out.x, np.fft.fft(z, norm="ortho"), atol=1e-12)


def test_direct_matches_matrix(rng):
    mu = random_axis(rng)
    for n in (5, 12):
        x = QTensor.random(n, rng)
        q = qft_matrix(n, mu)
        assert transform(x, QftPlan(n, mu)).max_abs_diff(q @ x) < 1e-12
        # the right transform is the matrix applied from the other side
        right = QTensor(hamilton(x.data[None, :, :], q.entries.data).sum(axis=1))
        assert transform(x, QftPlan(n, mu, Side.RIGHT)).max_abs_diff(right) < 1e-12


def test_fast_matches_direct_many(rng):
    worst = 0.0
    count = 0
    for n in (4, 7, 16, 36):
        for _ in range(50):
            x = QTensor.random(n, rng)
            mu = random_axis(rng)
            plan = QftPlan(n, mu, Side.LEFT if count % 2 else Side.RIGHT, count % 3 == 0,
                           Normalization.ASYMMETRIC if count % 5 == 0 else Normalization.SYMMETRIC)
            ref = transform(x, plan)
            worst = max(worst, ref.max_abs_diff(fast_transform(x, plan)) / max(1.0, ref.norm()))
            count += 1
    assert count == 200
    assert worst <= 1e-8


def test_all_plans_roundtrip_1d_and_2d(rng):
    mu = random_axis(rng)
    for shape in ((6,), (4, 5), (3, 3)):
        x = QTensor.random(shape, rng)
        for plan in _plans(shape, mu):
            for fn in (transform, fast_transform):
                assert fn(fn(x, plan), plan.inverted()).max_abs_diff(x) <= 1e-9
            assert transform(x, plan).max_abs_diff(fast_transform(x, plan)) <= 1e-10


def test_asymmetric_scaling(rng):
    x = QTensor.random((3, 4), rng)
    mu = random_axis(rng)
    sym = transform(x, QftPlan((3, 4), mu))
    asym = transform(x, QftPlan((3, 4), mu, normalization=Normalization.ASYMMETRIC))
    assert asym.max_abs_diff(sym * math.sqrt(12)) < 1e-12


def test_2d_is_two_1d_passes(rng):
    m, n = 4, 6
    x = QTensor.random((m, n), rng)
    mu = random_axis(rng)
    for side in Side:
        full = transform(x, QftPlan((m, n), mu, side))
        rows = np.stack([transform(QTensor(x.data[i]), QftPlan(n, mu, side)).data for i in range(m)])
        cols = np.stack([transform(QTensor(rows[:, j]), QftPlan(m, mu, side)).data for j in range(n)], axis=1)
        assert full.max_abs_diff(QTensor(cols)) < 1e-12


def test_shape_mismatch(rng):
    with pytest.raises(ShapeMismatchError):
        transform(QTensor.random(5, rng), QftPlan(4))
    with pytest.raises(ShapeMismatchError):
        QftPlan((2, 2, 2))


def test_side_parse():
    assert Side.parse("L") is Side.LEFT and Side.parse("right") is Side.RIGHT
    with pytest.raises(ValueError):
        Side.parse("X")


def test_self_product():
    assert qft_self_product(4) == [0, 3, 2, 1]
    assert qft_self_product(5) == [0, 4, 3, 2, 1]
    assert self_product_error(16) <= 1e-10
    assert self_product_error(9, AXIS_J) <= 1e-10


def test_conjugate_by_rotation(rng):
    got = conjugate_by_rotation(qft_matrix(4, AXIS_J), AXIS_I)
    assert got.entries.max_abs_diff(qft_matrix(4, AXIS_I).entries) <= 1e-9
    for _ in range(10):
        mu, nu = random_axis(rng), random_axis(rng)
        got = conjugate_by_rotation(qft_matrix(7, nu), mu)
        assert got.entries[0, 0].isclose(Quaternion(1 / math.sqrt(7)), atol=1e-15)
        assert got.entries.max_abs_diff(qft_matrix(7, mu).entries) <= 1e-9
    with pytest.raises(QuatDomainError):
        conjugate_by_rotation(qft_matrix(4, DEFAULT_AXIS), DEFAULT_AXIS)


def test_coordinates_in_basis(rng):
    mu = random_axis(rng)
    q = qft_matrix(8, mu).entries
    first = QTensor(q.data[:, 0])
    e0 = np.zeros((8, 4))
    e0[0, 0] = 1.0
    assert coordinates_in_basis(first, mu).max_abs_diff(QTensor(e0)) <= 1e-12
    x = QTensor.random(8, rng)
    c = coordinates_in_basis(x, mu)
    assert matmul(q, c).max_abs_diff(x) <= 1e-9
    assert c.norm() == pytest.approx(x.norm(), abs=1e-12)


def test_coordinates_in_basis_2d(rng):
    mu = random_axis(rng)
    x = QTensor.random((3, 5), rng)
    c = coordinates_in_basis(x, mu)
    qm = qft_matrix(3, mu).entries.data
    qn = qft_matrix(5, mu).entries.data
    # x[i, j] = sum_{k, l} Qm[i, k] Qn[j, l] c[k, l]
    rebuilt = np.zeros((3, 5, 4))
    for k in range(3):
        for l in range(5):
            rebuilt += hamilton(hamilton(qm[:, None, k], qn[None, :, l]), c.data[k, l])
    assert np.abs(rebuilt - x.data).max() <= 1e-9
    assert c.norm() == pytest.approx(x.norm(), abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(axes(), st.integers(1, 24))
def test_unitarity_property(mu, n):
    q = qft_matrix(n, mu).entries
    assert np.abs((q.H @ q).data - QTensor.identity(n).data).max() <= 1e-10


@settings(max_examples=30, deadline=None)
@given(axes(), st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_fast_roundtrip_property(mu, n, seed):
    x = QTensor.random(n, np.random.default_rng(seed))
    for plan in _plans((n,), mu):
        assert fast_transform(fast_transform(x, plan), plan.inverted()).max_abs_diff(x) <= 1e-9


def test_exponential_entry_definition(rng):
    mu = random_axis(rng)
    n = 6
    q = qft_matrix(n, mu).entries
    for i in range(n):
        for j in range(n):
            expected = qexp(mu.quaternion * (-2 * math.pi * i * j / n)) / math.sqrt(n)
            assert q[i, j].isclose(expected, atol=1e-14)
