"""Quaternion scalars, pure unit axes and the array kernels built on them.

Scalars are :class:`Quaternion` values. Everything that works on many
quaternions at once (QTensor, transforms, spectra) stores them as float64
arrays whose trailing dimension holds the ``(w, x, y, z)`` components; the
``hamilton``/``qconj``/``qabs2`` helpers below operate on such arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import QuatDomainError
from .tolerances import (
    AXIS_MIN_NORM,
    COLLINEAR_TOL,
    ORTHO_TOL,
    QEXP_SERIES_CUTOFF,
    UNIT_TOL,
)

__all__ = [
    "Quaternion",
    "Axis",
    "AXIS_I",
    "AXIS_J",
    "AXIS_K",
    "DEFAULT_AXIS",
    "mul",
    "conj",
    "norm",
    "inverse",
    "qexp",
    "polar",
    "rotate",
    "symplectic_split",
    "axis_rotation_between",
    "hamilton",
    "qconj",
    "qabs2",
    "left_matrix",
    "exp_axis",
    "to_symplectic",
    "from_symplectic",
]


# ---------------------------------------------------------------------------
# array kernels, trailing axis = (w, x, y, z)


def hamilton(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Broadcasting Hamilton product of two component arrays."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    pw, px, py, pz = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    qw, qx, qy, qz = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        [
            pw * qw - px * qx - py * qy - pz * qz,
            pw * qx + px * qw + py * qz - pz * qy,
            pw * qy - px * qz + py * qw + pz * qx,
            pw * qz + px * qy - py * qx + pz * qw,
        ],
        axis=-1,
    )


def qconj(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    out = -q
    out[..., 0] = q[..., 0]
    return out


def qabs2(q: np.ndarray) -> np.ndarray:
    """Squared modulus of every quaternion in a component array."""
    q = np.asarray(q, dtype=float)
    return np.einsum("...i,...i->...", q, q)


def left_matrix(q: np.ndarray) -> np.ndarray:
    """Real 4x4 matrices ``L`` with ``L @ r == hamilton(q, r)`` for every r."""
    q = np.asarray(q, dtype=float)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    rows = [
        [w, -x, -y, -z],
        [x, w, -z, y],
        [y, z, w, -x],
        [z, -y, x, w],
    ]
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def exp_axis(angle, axis: Axis) -> np.ndarray:
    """Component array of ``exp(axis * angle)`` for an array of real angles."""
    angle = np.asarray(angle, dtype=float)
    out = np.empty(angle.shape + (4,))
    s = np.sin(angle)
    out[..., 0] = np.cos(angle)
    out[..., 1] = s * axis.x
    out[..., 2] = s * axis.y
    out[..., 3] = s * axis.z
    return out


def _frame(mu: Axis, mu2: Axis) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    _check_orthogonal(mu, mu2)
    v3 = np.array(
        [
            mu.y * mu2.z - mu.z * mu2.y,
            mu.z * mu2.x - mu.x * mu2.z,
            mu.x * mu2.y - mu.y * mu2.x,
        ]
    )
    return mu.vector, mu2.vector, v3


def to_symplectic(q: np.ndarray, mu: Axis, mu2: Axis) -> tuple[np.ndarray, np.ndarray]:
    """Complex pair ``(z1, z2)`` with ``q = z1 + z2 mu2`` once ``i`` is read as ``mu``.

    Both parts live in span{1, mu}; the frame is (1, mu, mu2, mu mu2).
    """
    q = np.asarray(q, dtype=float)
    v1, v2, v3 = _frame(mu, mu2)
    vec = q[..., 1:]
    z1 = q[..., 0] + 1j * (vec @ v1)
    z2 = (vec @ v2) + 1j * (vec @ v3)
    return z1, z2


def from_symplectic(z1, z2, mu: Axis, mu2: Axis) -> np.ndarray:
    """Inverse of :func:`to_symplectic`."""
    v1, v2, v3 = _frame(mu, mu2)
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    out = np.empty(np.broadcast_shapes(z1.shape, z2.shape) + (4,))
    out[..., 0] = z1.real
    out[..., 1:] = (
        z1.imag[..., None] * v1 + z2.real[..., None] * v2 + z2.imag[..., None] * v3
    )
    return out


# ---------------------------------------------------------------------------
# scalars


@dataclass(frozen=True, slots=True)
class Quaternion:
    """A real quaternion ``w + x i + y j + z k``."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, arr) -> Quaternion:
        w, x, y, z = (float(v) for v in np.asarray(arr, dtype=float).reshape(4))
        return cls(w, x, y, z)

    @classmethod
    def coerce(cls, value) -> Quaternion:
        """Accept a Quaternion, an Axis, a real number or a length-4 sequence."""
        if isinstance(value, Quaternion):
            return value
        if isinstance(value, Axis):
            return value.quaternion
        if isinstance(value, (int, float, np.integer, np.floating)):
            return cls(float(value))
        return cls.from_array(value)

    def to_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    @property
    def scalar(self) -> float:
        return self.w

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def is_pure(self, tol: float = 0.0) -> bool:
        return abs(self.w) <= tol

    def conj(self) -> Quaternion:
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return math.sqrt(self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z)

    def inverse(self) -> Quaternion:
        n2 = self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
        if n2 == 0.0:
            raise QuatDomainError("zero quaternion has no inverse")
        return Quaternion(self.w / n2, -self.x / n2, -self.y / n2, -self.z / n2)

    def isclose(self, other, atol: float = 1e-12) -> bool:
        other = Quaternion.coerce(other)
        return bool(np.max(np.abs(self.to_array() - other.to_array())) <= atol)

    def __add__(self, other):
        try:
            o = Quaternion.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return Quaternion(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = Quaternion.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return Quaternion(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)

    def __rsub__(self, other):
        return Quaternion.coerce(other) - self

    def __neg__(self) -> Quaternion:
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.integer, np.floating)):
            s = float(other)
            return Quaternion(self.w * s, self.x * s, self.y * s, self.z * s)
        if isinstance(other, (Quaternion, Axis)):
            return mul(self, Quaternion.coerce(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.integer, np.floating)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.integer, np.floating)):
            return self * (1.0 / float(other))
        return NotImplemented

    def __abs__(self) -> float:
        return self.norm()

    def __repr__(self) -> str:
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"

    def __str__(self) -> str:
        return f"{self.w:g} {self.x:+g}i {self.y:+g}j {self.z:+g}k"


class Axis:
    """A pure unit quaternion used as the imaginary unit of a transform.

    The constructor takes the three vector components (or any quaternion-like
    value, whose scalar part is dropped) and normalizes them.
    """

    __slots__ = ("x", "y", "z")

    def __init__(self, x, y: float | None = None, z: float | None = None) -> None:
        if y is None and z is None:
            q = Quaternion.coerce(x)
            vx, vy, vz = q.x, q.y, q.z
        else:
            vx, vy, vz = float(x), float(y), float(z)
        n = math.sqrt(vx * vx + vy * vy + vz * vz)
        if not np.isfinite(n) or n < AXIS_MIN_NORM:
            raise QuatDomainError(f"axis vector part too short to normalize (|v| = {n:.3g})")
        object.__setattr__(self, "x", vx / n)
        object.__setattr__(self, "y", vy / n)
        object.__setattr__(self, "z", vz / n)

    def __setattr__(self, name, value):
        raise AttributeError("Axis is immutable")

    @property
    def quaternion(self) -> Quaternion:
        return Quaternion(0.0, self.x, self.y, self.z)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def to_array(self) -> np.ndarray:
        return np.array([0.0, self.x, self.y, self.z])

    def dot(self, other: Axis) -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def __neg__(self) -> Axis:
        return Axis(-self.x, -self.y, -self.z)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Axis):
            return NotImplemented
        return (self.x, self.y, self.z) == (other.x, other.y, other.z)

    def __hash__(self) -> int:
        return hash((self.x, self.y, self.z))

    def __repr__(self) -> str:
        return f"Axis({self.x!r}, {self.y!r}, {self.z!r})"

    def perpendicular(self) -> Axis:
        """Deterministic unit axis orthogonal to this one.

        The component of ``i`` orthogonal to the axis, or of ``j`` when the
        axis is (anti)parallel to ``i``.
        """
        ref = np.array([1.0, 0.0, 0.0])
        if abs(self.x) > 1.0 - COLLINEAR_TOL:
            ref = np.array([0.0, 1.0, 0.0])
        v = self.vector
        perp = ref - np.dot(ref, v) * v
        return Axis(*perp)


AXIS_I = Axis(1.0, 0.0, 0.0)
AXIS_J = Axis(0.0, 1.0, 0.0)
AXIS_K = Axis(0.0, 0.0, 1.0)
DEFAULT_AXIS = Axis(1.0, 1.0, 1.0)


# ---------------------------------------------------------------------------
# scalar operations


def mul(p, q) -> Quaternion:
    p = Quaternion.coerce(p)
    q = Quaternion.coerce(q)
    return Quaternion(
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    )


def conj(q) -> Quaternion:
    return Quaternion.coerce(q).conj()


def norm(q) -> float:
    return Quaternion.coerce(q).norm()


def inverse(q) -> Quaternion:
    return Quaternion.coerce(q).inverse()


def qexp(q) -> Quaternion:
    """Quaternion exponential ``e^a (cos|v| + v/|v| sin|v|)`` for ``q = a + v``."""
    q = Quaternion.coerce(q)
    ea = math.exp(q.w)
    vn = math.sqrt(q.x * q.x + q.y * q.y + q.z * q.z)
    if vn < QEXP_SERIES_CUTOFF:
        sinc = 1.0 - vn * vn / 6.0
    else:
        sinc = math.sin(vn) / vn
    return Quaternion(ea * math.cos(vn), ea * sinc * q.x, ea * sinc * q.y, ea * sinc * q.z)


def polar(q) -> tuple[float, Axis, float]:
    """Split ``q`` into ``(magnitude, axis, angle)`` with ``q = magnitude * exp(axis * angle)``.

    The angle lies in ``[0, pi]``. Real quaternions get the canonical axis ``i``
    (angle 0 when positive, pi when negative).
    """
    q = Quaternion.coerce(q)
    mag = q.norm()
    if mag == 0.0:
        raise QuatDomainError("polar form of the zero quaternion is undefined")
    vn = math.sqrt(q.x * q.x + q.y * q.y + q.z * q.z)
    if vn < AXIS_MIN_NORM:
        return mag, AXIS_I, (0.0 if q.w > 0 else math.pi)
    return mag, Axis(q.x, q.y, q.z), math.atan2(vn, q.w)


def rotate(p, q) -> Quaternion:
    """Rotate ``q`` by the unit quaternion ``p``: returns ``p q conj(p)``."""
    p = Quaternion.coerce(p)
    if abs(p.norm() - 1.0) > UNIT_TOL:
        raise QuatDomainError(f"rotor must be a unit quaternion, |p| = {p.norm():.12g}")
    return mul(mul(p, q), p.conj())


def _check_orthogonal(mu1: Axis, mu2: Axis) -> None:
    if abs(mu1.dot(mu2)) > ORTHO_TOL:
        raise QuatDomainError(
            f"axes are not orthogonal (V(mu1).V(mu2) = {mu1.dot(mu2):.3g})"
        )


def symplectic_split(q, mu1: Axis, mu2: Axis) -> tuple[Quaternion, Quaternion]:
    """Split ``q`` into a part in span{1, mu1} and a part in span{mu2, mu1 mu2}."""
    _check_orthogonal(mu1, mu2)
    q = Quaternion.coerce(q)
    a = q.x * mu1.x + q.y * mu1.y + q.z * mu1.z
    parallel = Quaternion(q.w, a * mu1.x, a * mu1.y, a * mu1.z)
    return parallel, q - parallel


def axis_rotation_between(mu: Axis, nu: Axis) -> Quaternion:
    """Unit quaternion ``p`` with ``p nu conj(p) = mu``.

    ``p = exp(xi theta / 2)`` where ``xi`` is the normalized ``nu mu + V(nu).V(mu)``
    (the cross product ``nu x mu``) and ``theta = arccos(V(mu).V(nu))``.
    """
    d = mu.dot(nu)
    if abs(d) >= 1.0 - COLLINEAR_TOL:
        raise QuatDomainError("axes are collinear; the rotation axis is undefined")
    xi = mul(nu.quaternion, mu.quaternion) + d
    theta = math.acos(max(-1.0, min(1.0, d)))
    return qexp(Axis(xi).quaternion * (theta / 2.0))
