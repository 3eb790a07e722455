"""
Numerical oracles for the operator identities, the Cauchy-type integral
representation and the radiation conditions.

Every check returns plain residual numbers; `CheckOutcome` pairs a residual
with its tolerance for the CLI verification table.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from qmfs.core.config import settings
from qmfs.core.errors import QuadratureError
from qmfs.models.enums import CheckName, KernelSign
from qmfs.numerics.biquat import Biquaternion, ComplexVector3, qmul
from qmfs.numerics.chiral import WaveNumberPair, chiral_dipole_field, fields_to_phi_psi
from qmfs.numerics.geometry import SampleSet, SurfaceGeometry, fibonacci_directions, sample_surface
from qmfs.numerics.kernels import (
    K,
    WaveNumber,
    as_wave_number,
    dirac_apply_fd,
    dirac_fd,
    dirac_field,
    kernel_sampler,
    laplacian_fd,
    partials_fd,
    projection_apply_fd,
    projection_field,
    theta,
)

logger = logging.getLogger(__name__)

Sampler = Callable[[np.ndarray], Biquaternion]
VectorField = Callable[[np.ndarray], np.ndarray]

MIN_QUADRATURE_SAMPLES = 16


class FdCheckConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    step: float = Field(default_factory=lambda: settings.nested_fd_step, gt=0)
    points: List[Tuple[float, float, float]] = Field(default_factory=list)
    tolerance: float = Field(1e-3, gt=0)

    def arrays(self) -> List[np.ndarray]:
        return [np.asarray(p, dtype=float) for p in self.points]


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    value: float
    tolerance: float
    passed: bool

    @classmethod
    def below(cls, name: str, value: float, tolerance: float) -> "CheckOutcome":
        return cls(name, float(value), tolerance, bool(np.isfinite(value)) and value < tolerance)


@dataclass(frozen=True)
class DecayTable:
    radii: Tuple[float, ...]
    values: Tuple[float, ...]

    def ratios(self) -> List[float]:
        return [a / b if b > 0 else float("inf") for a, b in zip(self.values, self.values[1:])]

    def decays(self, factor: float = 1.5) -> bool:
        """Each step (a radius doubling) shrinks the product by at least `factor`."""
        return all(ratio >= factor for ratio in self.ratios())


def _relative(residual: Biquaternion, reference: Biquaternion) -> float:
    return residual.norm() / max(reference.norm(), np.finfo(float).tiny)


def random_shell_points(count: int, r_min: float, r_max: float, seed: int = 0) -> List[np.ndarray]:
    """Reproducible points with r_min <= |x| <= r_max."""
    rng = np.random.default_rng(seed)
    directions = rng.normal(size=(count, 3))
    directions /= np.linalg.norm(directions, axis=-1, keepdims=True)
    radii = rng.uniform(r_min, r_max, size=count)
    return list(directions * radii[:, None])


# ---------------------------------------------------------------------------
# Operator identities
# ---------------------------------------------------------------------------

def check_factorization(alpha: WaveNumber, f: Sampler, cfg: FdCheckConfig) -> float:
    """max relative |(Delta + a^2) f + D_a D_-a f|, both composition orders."""
    a = as_wave_number(alpha).alpha
    worst = 0.0
    for x in cfg.arrays():
        value = f(x)
        helmholtz = laplacian_fd(f, x, cfg.step) + value * a**2
        for first, second in ((KernelSign.MINUS, KernelSign.PLUS), (KernelSign.PLUS, KernelSign.MINUS)):
            inner = dirac_field(a, first, f, cfg.step)
            nested = dirac_apply_fd(a, second, inner, x, cfg.step)
            worst = max(worst, _relative(helmholtz + nested, value))
    return worst


def check_moisil_theodoresco(
    f: Sampler, cfg: FdCheckConfig, alpha: Optional[complex] = None
) -> Tuple[float, float]:
    """
    Residuals of div f = 0 and grad f0 + rot f = 0 (plain D).

    With a shift alpha the lines become -div f + alpha f0 = 0 and
    grad f0 + rot f + alpha f = 0, i.e. (D + alpha) f = 0 split by part.
    """
    shift = 0j if alpha is None else complex(alpha)
    div_worst = 0.0
    vec_worst = 0.0
    for x in cfg.arrays():
        d1, d2, d3 = partials_fd(f, x, cfg.step)
        value = f(x)
        divergence = d1.a1 + d2.a2 + d3.a3
        gradient = np.array([d1.a0, d2.a0, d3.a0])
        rotation = np.array([d2.a3 - d3.a2, d3.a1 - d1.a3, d1.a2 - d2.a1])
        scalar_line = -divergence + shift * value.a0
        vector_line = gradient + rotation + shift * value.vec.as_array()
        div_worst = max(div_worst, abs(scalar_line))
        vec_worst = max(vec_worst, float(np.linalg.norm(vector_line)))
    return div_worst, vec_worst


def check_projections(alpha: WaveNumber, u: Sampler, cfg: FdCheckConfig) -> Tuple[float, float, float]:
    """Relative residuals of Pi_a + Pi_-a = I, Pi_a^2 = Pi_a, Pi_a Pi_-a = 0 on a Helmholtz solution."""
    alpha = as_wave_number(alpha)
    plus = projection_field(alpha, KernelSign.PLUS, u, cfg.step)
    minus = projection_field(alpha, KernelSign.MINUS, u, cfg.step)
    total = idempotent = orthogonal = 0.0
    for x in cfg.arrays():
        value = u(x)
        p_value = plus(x)
        total = max(total, _relative(p_value + minus(x) - value, value))
        squared = projection_apply_fd(alpha, KernelSign.PLUS, plus, x, cfg.step)
        idempotent = max(idempotent, _relative(squared - p_value, value))
        crossed = projection_apply_fd(alpha, KernelSign.PLUS, minus, x, cfg.step)
        orthogonal = max(orthogonal, _relative(crossed, value))
    return total, idempotent, orthogonal


def check_kernel_annihilation(
    alpha: WaveNumber, sign: KernelSign, points: Sequence[np.ndarray], h: Optional[float] = None
) -> float:
    """max relative |(D ± a) K_{±a}(x)| over the points."""
    sign = KernelSign(sign)

    def kernel(y: np.ndarray) -> Biquaternion:
        return K(alpha, sign, y)

    return max(
        (_relative(dirac_apply_fd(alpha, sign, kernel, x, h), kernel(np.asarray(x))) for x in points),
        default=0.0,
    )


def _curl_fd(field: VectorField, x: np.ndarray, h: float) -> np.ndarray:
    jac = np.zeros((3, 3), dtype=complex)  # jac[k] = d_k field
    for k in range(3):
        step = np.zeros(3)
        step[k] = h
        jac[k] = (field(x + step) - field(x - step)) / (2 * h)
    return np.array([jac[1, 2] - jac[2, 1], jac[2, 0] - jac[0, 2], jac[0, 1] - jac[1, 0]])


def _div_fd(field: VectorField, x: np.ndarray, h: float) -> complex:
    total = 0j
    for k in range(3):
        step = np.zeros(3)
        step[k] = h
        total += (field(x + step)[k] - field(x - step)[k]) / (2 * h)
    return total


def check_maxwell(
    e_field: VectorField,
    h_field: VectorField,
    alpha: WaveNumber,
    beta: float,
    cfg: FdCheckConfig,
) -> Tuple[float, float]:
    """Relative residuals of rot E = -i a (H + b rot H) and rot H = i a (E + b rot E)."""
    a = as_wave_number(alpha).alpha
    first = second = 0.0
    for x in cfg.arrays():
        e_value, h_value = e_field(x), h_field(x)
        rot_e = _curl_fd(e_field, x, cfg.step)
        rot_h = _curl_fd(h_field, x, cfg.step)
        scale = max(np.linalg.norm(rot_e), np.linalg.norm(rot_h), np.finfo(float).tiny)
        first = max(first, float(np.linalg.norm(rot_e + 1j * a * (h_value + beta * rot_h)) / scale))
        second = max(second, float(np.linalg.norm(rot_h - 1j * a * (e_value + beta * rot_e)) / scale))
    return first, second


def check_divergence_free(field: VectorField, cfg: FdCheckConfig) -> float:
    worst = 0.0
    for x in cfg.arrays():
        magnitude = max(float(np.linalg.norm(_curl_fd(field, x, cfg.step))), np.finfo(float).tiny)
        worst = max(worst, abs(_div_fd(field, x, cfg.step)) / magnitude)
    return worst


# ---------------------------------------------------------------------------
# Cauchy-type integral
# ---------------------------------------------------------------------------

def cauchy_integral(
    alpha: WaveNumber,
    sign: KernelSign,
    trace: Sampler,
    samples: SampleSet,
    x: np.ndarray,
) -> Biquaternion:
    """K_{±a} f(x) = -int_Gamma K_{±a}(x - y) n(y) f(y) dGamma_y by weighted summation."""
    if len(samples) < MIN_QUADRATURE_SAMPLES:
        raise QuadratureError(
            f"need at least {MIN_QUADRATURE_SAMPLES} surface samples, got {len(samples)}"
        )
    x = np.asarray(x, dtype=float)
    total = Biquaternion()
    for sample in samples:
        normal = ComplexVector3.from_array(sample.normal).to_biquaternion()
        integrand = qmul(qmul(K(alpha, sign, x - sample.point), normal), trace(sample.point))
        total = total + integrand * sample.weight
    return -total


def cauchy_reproduce(
    alpha: WaveNumber,
    sign: KernelSign,
    source: Sequence[float],
    samples: SampleSet,
    x_exterior: Sequence[float],
) -> Tuple[Biquaternion, Biquaternion, float]:
    """f(x) = -K f(x) outside Gamma for f = K(. - source) with the source inside."""
    source = np.asarray(source, dtype=float)

    def trace(y: np.ndarray) -> Biquaternion:
        return K(alpha, sign, y - source)

    reproduced = -cauchy_integral(alpha, sign, trace, samples, x_exterior)
    reference = trace(np.asarray(x_exterior, dtype=float))
    return reproduced, reference, _relative(reproduced - reference, reference)


def cauchy_reproduce_interior(
    alpha: WaveNumber,
    sign: KernelSign,
    source: Sequence[float],
    samples: SampleSet,
    x_interior: Sequence[float],
) -> Tuple[Biquaternion, Biquaternion, float]:
    """f(x) = K f(x) inside Gamma for f = K(. - source) with the source outside."""
    source = np.asarray(source, dtype=float)

    def trace(y: np.ndarray) -> Biquaternion:
        return K(alpha, sign, y - source)

    reproduced = cauchy_integral(alpha, sign, trace, samples, x_interior)
    reference = trace(np.asarray(x_interior, dtype=float))
    return reproduced, reference, _relative(reproduced - reference, reference)


# ---------------------------------------------------------------------------
# Radiation conditions
# ---------------------------------------------------------------------------

def _sphere_points(radius: float, directions: int, center: Sequence[float]) -> np.ndarray:
    return np.asarray(center, dtype=float) + radius * fibonacci_directions(directions)


def radiation_decay(
    f: Sampler,
    sign: KernelSign,
    radii: Sequence[float],
    directions: int = 64,
    center: Sequence[float] = (0.0, 0.0, 0.0),
) -> DecayTable:
    """r * max over directions of |(1 ± i x/|x|)·f(x)|; decays for radiating fields."""
    sign = KernelSign(sign)
    values = []
    for radius in radii:
        worst = 0.0
        for point in _sphere_points(radius, directions, center):
            unit = (point - np.asarray(center)) / radius
            factor = Biquaternion(1.0, *(sign.factor * 1j * unit))
            worst = max(worst, qmul(factor, f(point)).norm())
        values.append(radius * worst)
    return DecayTable(tuple(float(r) for r in radii), tuple(values))


def helmholtz_radiation_decay(
    u: Sampler,
    alpha: WaveNumber,
    radii: Sequence[float],
    directions: int = 64,
    h: Optional[float] = None,
) -> DecayTable:
    """r * max |i a u(x) + (x/|x|)·Du(x)| with D applied by finite differences."""
    a = as_wave_number(alpha).alpha
    values = []
    for radius in radii:
        worst = 0.0
        for point in _sphere_points(radius, directions, (0.0, 0.0, 0.0)):
            unit = ComplexVector3.from_array(point / radius).to_biquaternion()
            residual = u(point) * (1j * a) + qmul(unit, dirac_fd(u, point, h))
            worst = max(worst, residual.norm())
        values.append(radius * worst)
    return DecayTable(tuple(float(r) for r in radii), tuple(values))


def silver_muller_decay(
    fields: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]],
    radii: Sequence[float],
    directions: int = 64,
) -> DecayTable:
    """r * max |E - (x/|x|) x H| for a callable returning (E, H) on (P, 3) points."""
    values = []
    for radius in radii:
        points = _sphere_points(radius, directions, (0.0, 0.0, 0.0))
        e_field, h_field = fields(points)
        units = points / radius
        residual = e_field - np.cross(units, h_field)
        values.append(radius * float(np.max(np.linalg.norm(residual, axis=-1))))
    return DecayTable(tuple(float(r) for r in radii), tuple(values))


# ---------------------------------------------------------------------------
# Suite
# ---------------------------------------------------------------------------

DECAY_RADII = (10.0, 20.0, 40.0)
DECAY_FACTOR = 1.5
ANNIHILATION_TOL = 1e-6
DIAGONALIZATION_TOL = 1e-5
CAUCHY_TOL = 1e-3
CAUCHY_SAMPLES = 2000


def _plane_wave(a: complex) -> Sampler:
    def sampler(x: np.ndarray) -> Biquaternion:
        return Biquaternion.scalar(np.exp(1j * a * x[2]))

    return sampler


def _point_source(alpha: WaveNumber) -> Sampler:
    def sampler(x: np.ndarray) -> Biquaternion:
        return Biquaternion.scalar(theta(alpha, x))

    return sampler


def _check_factorization(alpha: WaveNumber, pair: WaveNumberPair, cfg: FdCheckConfig, wrong_sign: bool):
    residual = max(
        check_factorization(alpha, _plane_wave(alpha.alpha), cfg),
        check_factorization(alpha, _point_source(alpha), cfg),
    )
    return [CheckOutcome.below("factorization", residual, cfg.tolerance)]


def _check_kernel_annihilation(alpha, pair, cfg, wrong_sign):
    points = cfg.arrays()
    return [
        CheckOutcome.below(
            f"kernel_annihilation[{sign.value}]",
            check_kernel_annihilation(alpha, sign, points),
            ANNIHILATION_TOL,
        )
        for sign in KernelSign
    ]


def _check_moisil_theodoresco(alpha, pair, cfg, wrong_sign):
    plain = FdCheckConfig(step=settings.fd_step, points=cfg.points, tolerance=cfg.tolerance)
    div_residual, vec_residual = check_moisil_theodoresco(
        kernel_sampler(alpha, KernelSign.PLUS), plain, alpha=alpha.alpha
    )
    return [
        CheckOutcome.below("moisil_theodoresco[div]", div_residual, ANNIHILATION_TOL),
        CheckOutcome.below("moisil_theodoresco[grad+rot]", vec_residual, ANNIHILATION_TOL),
    ]


def _check_projections(alpha, pair, cfg, wrong_sign):
    total, idempotent, orthogonal = check_projections(alpha, _plane_wave(alpha.alpha), cfg)
    return [
        CheckOutcome.below("projections[sum]", total, cfg.tolerance),
        CheckOutcome.below("projections[idempotent]", idempotent, cfg.tolerance),
        CheckOutcome.below("projections[orthogonal]", orthogonal, cfg.tolerance),
    ]


def _check_diagonalization(alpha, pair, cfg, wrong_sign):
    c = np.array([0.0, 0.0, 1.0])

    def phi(x: np.ndarray) -> Biquaternion:
        E, H = chiral_dipole_field(pair, c, x)
        return fields_to_phi_psi(E, H)[0]

    def psi(x: np.ndarray) -> Biquaternion:
        E, H = chiral_dipole_field(pair, c, x)
        return fields_to_phi_psi(E, H)[1]

    phi_worst = psi_worst = 0.0
    for x in cfg.arrays():
        phi_worst = max(phi_worst, _relative(dirac_apply_fd(pair.alpha1, KernelSign.PLUS, phi, x), phi(x)))
        psi_worst = max(psi_worst, _relative(dirac_apply_fd(pair.alpha2, KernelSign.MINUS, psi, x), psi(x)))
    return [
        CheckOutcome.below("diagonalization[phi]", phi_worst, DIAGONALIZATION_TOL),
        CheckOutcome.below("diagonalization[psi]", psi_worst, DIAGONALIZATION_TOL),
    ]


def _check_cauchy(alpha, pair, cfg, wrong_sign):
    samples = sample_surface(SurfaceGeometry.sphere(1.0), CAUCHY_SAMPLES)
    _, _, error = cauchy_reproduce(alpha, KernelSign.PLUS, (0.0, 0.0, 0.1), samples, (0.0, 0.0, 3.0))
    return [CheckOutcome.below("cauchy", error, CAUCHY_TOL)]


def _check_radiation(alpha, pair, cfg, wrong_sign):
    outcomes = []
    for sign in KernelSign:
        field_sign = sign.opposite if wrong_sign else sign
        table = radiation_decay(kernel_sampler(alpha, field_sign), sign, DECAY_RADII)
        worst = min(table.ratios())
        outcomes.append(
            CheckOutcome(f"radiation[{sign.value}]", worst, DECAY_FACTOR, table.decays(DECAY_FACTOR))
        )
    table = helmholtz_radiation_decay(_point_source(alpha), alpha, DECAY_RADII)
    outcomes.append(
        CheckOutcome("radiation[helmholtz]", min(table.ratios()), DECAY_FACTOR, table.decays(DECAY_FACTOR))
    )
    return outcomes


CHECKS = {
    CheckName.FACTORIZATION: _check_factorization,
    CheckName.KERNEL_ANNIHILATION: _check_kernel_annihilation,
    CheckName.MOISIL_THEODORESCO: _check_moisil_theodoresco,
    CheckName.PROJECTIONS: _check_projections,
    CheckName.DIAGONALIZATION: _check_diagonalization,
    CheckName.CAUCHY: _check_cauchy,
    CheckName.RADIATION: _check_radiation,
}


def run_checks(
    names: Sequence[CheckName],
    alpha: WaveNumber,
    pair: WaveNumberPair,
    cfg: FdCheckConfig,
    wrong_sign: bool = False,
) -> List[CheckOutcome]:
    """Run the named checks in order; wrong_sign swaps the kernel fed to the radiation test."""
    alpha = as_wave_number(alpha)
    outcomes: List[CheckOutcome] = []
    for name in names:
        results = CHECKS[CheckName(name)](alpha, pair, cfg, wrong_sign)
        for outcome in results:
            logger.info(
                "check=%s value=%.3e tolerance=%.1e passed=%s",
                outcome.name,
                outcome.value,
                outcome.tolerance,
                outcome.passed,
            )
        outcomes.extend(results)
    return outcomes
