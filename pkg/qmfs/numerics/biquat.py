"""
Complex quaternions H(C).

An element is a = a0 + a1 i1 + a2 i2 + a3 i3 with complex coefficients. The
imaginary unit i of C commutes with the quaternionic units; i1, i2, i3 follow
Hamilton's rules (i1 i2 = i3, i_k^2 = -1).

Two representations are offered:

* ``Biquaternion`` / ``ComplexVector3``: immutable value objects used by the
  point-wise API;
* ``(..., 4)`` / ``(..., 3)`` complex numpy arrays used by the vectorised
  collocation and evaluation code (``qmul_arrays``, ``left_matrix``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from qmfs.core.config import settings
from qmfs.core.errors import ZeroDivisorError

Number = Union[int, float, complex]


@dataclass(frozen=True)
class ComplexVector3:
    v1: complex = 0j
    v2: complex = 0j
    v3: complex = 0j

    def __post_init__(self) -> None:
        for field in ("v1", "v2", "v3"):
            object.__setattr__(self, field, complex(getattr(self, field)))

    @classmethod
    def from_array(cls, values: Iterable[Number]) -> "ComplexVector3":
        v1, v2, v3 = (complex(v) for v in values)
        return cls(v1, v2, v3)

    def as_array(self) -> np.ndarray:
        return np.array([self.v1, self.v2, self.v3], dtype=complex)

    def to_biquaternion(self) -> "Biquaternion":
        return Biquaternion(0j, self.v1, self.v2, self.v3)

    def __add__(self, other: "ComplexVector3") -> "ComplexVector3":
        return ComplexVector3(self.v1 + other.v1, self.v2 + other.v2, self.v3 + other.v3)

    def __sub__(self, other: "ComplexVector3") -> "ComplexVector3":
        return ComplexVector3(self.v1 - other.v1, self.v2 - other.v2, self.v3 - other.v3)

    def __neg__(self) -> "ComplexVector3":
        return ComplexVector3(-self.v1, -self.v2, -self.v3)

    def __mul__(self, scalar: Number) -> "ComplexVector3":
        if not isinstance(scalar, (int, float, complex)):
            return NotImplemented
        return ComplexVector3(self.v1 * scalar, self.v2 * scalar, self.v3 * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Number) -> "ComplexVector3":
        return ComplexVector3(self.v1 / scalar, self.v2 / scalar, self.v3 / scalar)

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))


@dataclass(frozen=True)
class Biquaternion:
    """Four complex coefficients; never normalised implicitly."""

    a0: complex = 0j
    a1: complex = 0j
    a2: complex = 0j
    a3: complex = 0j

    def __post_init__(self) -> None:
        for field in ("a0", "a1", "a2", "a3"):
            object.__setattr__(self, field, complex(getattr(self, field)))

    @classmethod
    def from_array(cls, values: Iterable[Number]) -> "Biquaternion":
        a0, a1, a2, a3 = (complex(v) for v in values)
        return cls(a0, a1, a2, a3)

    @classmethod
    def scalar(cls, value: Number) -> "Biquaternion":
        return cls(value, 0j, 0j, 0j)

    @classmethod
    def from_parts(cls, scalar: Number, vector: ComplexVector3) -> "Biquaternion":
        return cls(scalar, vector.v1, vector.v2, vector.v3)

    def as_array(self) -> np.ndarray:
        return np.array([self.a0, self.a1, self.a2, self.a3], dtype=complex)

    @property
    def sc(self) -> complex:
        return self.a0

    @property
    def vec(self) -> ComplexVector3:
        return ComplexVector3(self.a1, self.a2, self.a3)

    def conj(self) -> "Biquaternion":
        return qconj(self)

    def inverse(self) -> "Biquaternion":
        return qinv(self)

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    def is_zero(self) -> bool:
        return self.a0 == 0 and self.a1 == 0 and self.a2 == 0 and self.a3 == 0

    def __add__(self, other: "Biquaternion") -> "Biquaternion":
        if isinstance(other, (int, float, complex)):
            other = Biquaternion.scalar(other)
        return Biquaternion(
            self.a0 + other.a0, self.a1 + other.a1, self.a2 + other.a2, self.a3 + other.a3
        )

    __radd__ = __add__

    def __sub__(self, other: "Biquaternion") -> "Biquaternion":
        if isinstance(other, (int, float, complex)):
            other = Biquaternion.scalar(other)
        return Biquaternion(
            self.a0 - other.a0, self.a1 - other.a1, self.a2 - other.a2, self.a3 - other.a3
        )

    def __neg__(self) -> "Biquaternion":
        return Biquaternion(-self.a0, -self.a1, -self.a2, -self.a3)

    def __mul__(self, other: Union["Biquaternion", Number]) -> "Biquaternion":
        if isinstance(other, Biquaternion):
            return qmul(self, other)
        if isinstance(other, (int, float, complex)):
            return Biquaternion(self.a0 * other, self.a1 * other, self.a2 * other, self.a3 * other)
        return NotImplemented

    def __rmul__(self, other: Number) -> "Biquaternion":
        # complex scalars commute with every unit
        if isinstance(other, (int, float, complex)):
            return self * other
        return NotImplemented

    def __truediv__(self, scalar: Number) -> "Biquaternion":
        return Biquaternion(self.a0 / scalar, self.a1 / scalar, self.a2 / scalar, self.a3 / scalar)


I0 = Biquaternion(1, 0, 0, 0)
I1 = Biquaternion(0, 1, 0, 0)
I2 = Biquaternion(0, 0, 1, 0)
I3 = Biquaternion(0, 0, 0, 1)
UNITS = (I0, I1, I2, I3)


def sc(a: Biquaternion) -> complex:
    return a.a0


def vec(a: Biquaternion) -> ComplexVector3:
    return a.vec


def dot(u: ComplexVector3, v: ComplexVector3) -> complex:
    """Bilinear sum u1 v1 + u2 v2 + u3 v3 (no complex conjugation)."""
    return u.v1 * v.v1 + u.v2 * v.v2 + u.v3 * v.v3


def cross(u: ComplexVector3, v: ComplexVector3) -> ComplexVector3:
    return ComplexVector3(
        u.v2 * v.v3 - u.v3 * v.v2,
        u.v3 * v.v1 - u.v1 * v.v3,
        u.v1 * v.v2 - u.v2 * v.v1,
    )


def qmul(a: Biquaternion, b: Biquaternion) -> Biquaternion:
    """a·b = a0 b0 - <a, b> + [a x b] + a0 b + b0 a."""
    av, bv = a.vec, b.vec
    scalar = a.a0 * b.a0 - dot(av, bv)
    vector = cross(av, bv) + bv * a.a0 + av * b.a0
    return Biquaternion.from_parts(scalar, vector)


def qconj(a: Biquaternion) -> Biquaternion:
    return Biquaternion(a.a0, -a.a1, -a.a2, -a.a3)


def zero_tolerance(a: Biquaternion) -> float:
    largest = max(abs(a.a0), abs(a.a1), abs(a.a2), abs(a.a3))
    return settings.zero_tol_scale * (1.0 + largest**2)


def _norm_form(a: Biquaternion) -> complex:
    # a·ā is purely scalar: a0^2 + a1^2 + a2^2 + a3^2
    return qmul(a, qconj(a)).a0


def is_zero_divisor(a: Biquaternion) -> bool:
    if a.is_zero():
        return False
    return abs(_norm_form(a)) <= zero_tolerance(a)


def qinv(a: Biquaternion) -> Biquaternion:
    """a^-1 = ā / (a·ā); raises ZeroDivisorError for zero divisors and zero."""
    if a.is_zero():
        raise ZeroDivisorError("zero has no inverse")
    norm_form = _norm_form(a)
    if abs(norm_form) <= zero_tolerance(a):
        raise ZeroDivisorError(f"{a} is a zero divisor (a·ā = {norm_form})")
    return qconj(a) / norm_form


# ---------------------------------------------------------------------------
# Array forms
# ---------------------------------------------------------------------------

def _structure_constants() -> np.ndarray:
    table = np.zeros((4, 4, 4))
    for k in range(4):
        table[0, k, k] = 1.0
        table[k, 0, k] = 1.0
    for k in range(1, 4):
        table[k, k, 0] = -1.0
    for j, k, m in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        table[j, k, m] = 1.0
        table[k, j, m] = -1.0
    table.flags.writeable = False
    return table


# STRUCTURE[j, k, m]: coefficient of i_m in i_j i_k
STRUCTURE = _structure_constants()


def qmul_arrays(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Broadcasting product of (..., 4) arrays using the vector formula."""
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    p0, pv = p[..., 0], p[..., 1:]
    q0, qv = q[..., 0], q[..., 1:]
    scalar = p0 * q0 - np.sum(pv * qv, axis=-1)
    vector = np.cross(pv, qv) + p0[..., None] * qv + q0[..., None] * pv
    return np.concatenate([scalar[..., None], vector], axis=-1)


def qmul_structure(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Same product expanded through the structure constants."""
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    return np.einsum("...j,...k,jkm->...m", p, q, STRUCTURE)


def qconj_arrays(p: np.ndarray) -> np.ndarray:
    out = np.array(p, dtype=complex, copy=True)
    out[..., 1:] *= -1
    return out


def left_matrix(p: np.ndarray) -> np.ndarray:
    """Matrix L with L @ a == p·a for every a; shape (..., 4, 4)."""
    p = np.asarray(p, dtype=complex)
    return np.einsum("...j,jkm->...mk", p, STRUCTURE)
