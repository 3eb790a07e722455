"""
Helmholtz and quaternionic fundamental solutions, the magnetic-dipole field,
and finite-difference application of the Dirac-type operators D ± alpha.

Conventions (one source of truth, the explicit component formula):

    theta_a(x)  = -exp(i a |x|) / (4 pi |x|)
    grad theta  = (i a x/|x| - x/|x|^2) theta_a(x)
    K_{±a}(x)   = (±a + x/|x|^2 - i a x/|x|) theta_a(x)
                  i.e. Sc K = ±a theta,  Vec K = -grad theta

so that (D ± a) K_{±a} = 0 away from the origin, with D = sum_k i_k d_k acting
from the left.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from qmfs.core.config import settings
from qmfs.core.errors import SingularPointError, WaveNumberError
from qmfs.models.enums import KernelSign
from qmfs.numerics.biquat import UNITS, Biquaternion, ComplexVector3, qmul

logger = logging.getLogger(__name__)

Point = Union[Sequence[float], np.ndarray]
Sampler = Callable[[np.ndarray], Biquaternion]


@dataclass(frozen=True)
class WaveNumber:
    alpha: complex

    def __post_init__(self) -> None:
        alpha = complex(self.alpha)
        if alpha == 0:
            raise WaveNumberError("wave number must be non-zero")
        if alpha.imag < 0:
            raise WaveNumberError(f"wave number {alpha} has negative imaginary part")
        object.__setattr__(self, "alpha", alpha)

    def __complex__(self) -> complex:
        return self.alpha


def as_wave_number(alpha: Union[WaveNumber, complex, float]) -> WaveNumber:
    return alpha if isinstance(alpha, WaveNumber) else WaveNumber(alpha)


def _shift(alpha: Union[WaveNumber, complex, float, None]) -> complex:
    # operator shifts may be zero (plain D), unlike kernel wave numbers
    if alpha is None:
        return 0j
    return complex(alpha.alpha if isinstance(alpha, WaveNumber) else alpha)


def _radii(x: np.ndarray) -> np.ndarray:
    r = np.linalg.norm(x, axis=-1)
    if np.any(r <= settings.r_min):
        raise SingularPointError(
            f"evaluation within r_min={settings.r_min:g} of the source"
        )
    return r


def _as_point(x: Point) -> np.ndarray:
    point = np.asarray(x, dtype=float)
    if point.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {point.shape}")
    return point


# ---------------------------------------------------------------------------
# Batch evaluators, x of shape (..., 3)
# ---------------------------------------------------------------------------

def theta_batch(alpha: WaveNumber, x: np.ndarray) -> np.ndarray:
    a = alpha.alpha
    r = _radii(np.asarray(x, dtype=float))
    return -np.exp(1j * a * r) / (4.0 * np.pi * r)


def grad_theta_batch(alpha: WaveNumber, x: np.ndarray) -> np.ndarray:
    a = alpha.alpha
    x = np.asarray(x, dtype=float)
    r = _radii(x)
    theta = -np.exp(1j * a * r) / (4.0 * np.pi * r)
    radial = (1j * a / r - 1.0 / r**2) * theta
    return radial[..., None] * x


def kernel_batch(alpha: WaveNumber, sign: KernelSign, x: np.ndarray) -> np.ndarray:
    """K_{±alpha} at every point; returns (..., 4) complex."""
    x = np.asarray(x, dtype=float)
    theta = theta_batch(alpha, x)
    grad = grad_theta_batch(alpha, x)
    scalar = sign.factor * alpha.alpha * theta
    return np.concatenate([scalar[..., None], -grad], axis=-1)


def dipole_field_batch(
    alpha: WaveNumber,
    c: np.ndarray,
    x: np.ndarray,
    position: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Magnetic dipole E = rot(c theta), H = -(1/i alpha) rot E, both (..., 3).

    rot E is expanded as Hess(theta) c + alpha^2 theta c, using
    (Delta + alpha^2) theta = 0 off the dipole.
    """
    a = alpha.alpha
    c = np.asarray(c, dtype=float)
    x = np.asarray(x, dtype=float)
    if position is not None:
        x = x - np.asarray(position, dtype=float)
    r = _radii(x)
    theta = -np.exp(1j * a * r) / (4.0 * np.pi * r)
    d1 = theta * (1j * a - 1.0 / r)  # theta'(r)
    d2 = theta * ((1j * a - 1.0 / r) ** 2 + 1.0 / r**2)  # theta''(r)
    xhat = x / r[..., None]

    grad = d1[..., None] * xhat
    e_field = np.cross(grad, np.broadcast_to(c, grad.shape))

    c_radial = np.sum(xhat * c, axis=-1)
    hessian_c = (d2 * c_radial)[..., None] * xhat + (d1 / r)[..., None] * (
        c - c_radial[..., None] * xhat
    )
    rot_e = hessian_c + (a**2 * theta)[..., None] * c
    h_field = -rot_e / (1j * a)
    return e_field, h_field


# ---------------------------------------------------------------------------
# Point-wise API
# ---------------------------------------------------------------------------

def theta(alpha: WaveNumber, x: Point) -> complex:
    """Helmholtz fundamental solution, (Delta + alpha^2) theta = delta."""
    return complex(theta_batch(as_wave_number(alpha), _as_point(x)))


def grad_theta(alpha: WaveNumber, x: Point) -> ComplexVector3:
    return ComplexVector3.from_array(grad_theta_batch(as_wave_number(alpha), _as_point(x)))


def K(alpha: WaveNumber, sign: KernelSign, x: Point) -> Biquaternion:
    """Quaternionic fundamental solution of D + sign*alpha."""
    return Biquaternion.from_array(
        kernel_batch(as_wave_number(alpha), KernelSign(sign), _as_point(x))
    )


def dipole_field(
    alpha: WaveNumber,
    c: Point,
    x: Point,
    position: Optional[Point] = None,
) -> Tuple[ComplexVector3, ComplexVector3]:
    c = _as_point(c)
    if not np.any(c):
        raise ValueError("dipole moment must be non-zero")
    e_field, h_field = dipole_field_batch(as_wave_number(alpha), c, _as_point(x), position)
    return ComplexVector3.from_array(e_field), ComplexVector3.from_array(h_field)


# ---------------------------------------------------------------------------
# Finite-difference operators
# ---------------------------------------------------------------------------

def default_step(x: Point) -> float:
    return settings.fd_step * max(1.0, float(np.linalg.norm(x)))


def partials_fd(f: Sampler, x: Point, h: float) -> Tuple[Biquaternion, Biquaternion, Biquaternion]:
    """Second-order central differences d_k f(x), k = 1..3."""
    x = _as_point(x)
    out = []
    for k in range(3):
        step = np.zeros(3)
        step[k] = h
        out.append((f(x + step) - f(x - step)) / (2.0 * h))
    return tuple(out)


def dirac_fd(f: Sampler, x: Point, h: Optional[float] = None) -> Biquaternion:
    """D f = sum_k i_k d_k f, i.e. -div f + grad f0 + rot f."""
    h = default_step(x) if h is None else h
    result = Biquaternion()
    for unit, derivative in zip(UNITS[1:], partials_fd(f, x, h)):
        result = result + qmul(unit, derivative)
    return result


def laplacian_fd(f: Sampler, x: Point, h: Optional[float] = None) -> Biquaternion:
    x = _as_point(x)
    h = default_step(x) if h is None else h
    centre = f(x)
    result = Biquaternion()
    for k in range(3):
        step = np.zeros(3)
        step[k] = h
        result = result + (f(x + step) - centre * 2.0 + f(x - step)) / h**2
    return result


def dirac_apply_fd(
    alpha: Union[WaveNumber, complex, float, None],
    sign: KernelSign,
    f: Sampler,
    x: Point,
    h: Optional[float] = None,
) -> Biquaternion:
    """(D ± alpha) f at x; alpha may be 0 for the plain operator D."""
    shift = KernelSign(sign).factor * _shift(alpha)
    return dirac_fd(f, x, h) + f(_as_point(x)) * shift


def dirac_field(
    alpha: Union[WaveNumber, complex, float, None],
    sign: KernelSign,
    f: Sampler,
    h: Optional[float] = None,
) -> Sampler:
    """Sampler y -> (D ± alpha) f(y), for nested application."""

    def sampler(y: np.ndarray) -> Biquaternion:
        return dirac_apply_fd(alpha, sign, f, y, h)

    return sampler


def projection_apply_fd(
    alpha: WaveNumber,
    sign: KernelSign,
    f: Sampler,
    x: Point,
    h: Optional[float] = None,
) -> Biquaternion:
    """Pi_{±alpha} f = ∓(1/2 alpha) D_{∓alpha} f."""
    sign = KernelSign(sign)
    a = as_wave_number(alpha).alpha
    applied = dirac_apply_fd(a, sign.opposite, f, x, h)
    return applied * (-sign.factor / (2.0 * a))


def projection_field(
    alpha: WaveNumber,
    sign: KernelSign,
    f: Sampler,
    h: Optional[float] = None,
) -> Sampler:
    def sampler(y: np.ndarray) -> Biquaternion:
        return projection_apply_fd(alpha, sign, f, y, h)

    return sampler


def kernel_sampler(alpha: WaveNumber, sign: KernelSign, source: Optional[Point] = None) -> Sampler:
    """y -> K_{±alpha}(y - source)."""
    origin = np.zeros(3) if source is None else _as_point(source)

    def sampler(y: np.ndarray) -> Biquaternion:
        return K(alpha, sign, np.asarray(y, dtype=float) - origin)

    return sampler
