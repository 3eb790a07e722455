"""
Chiral medium parameters and the (E, H) <-> (phi, psi) diagonalisation.

In a homogeneous chiral medium

    rot E = -i alpha (H + beta rot H),   rot H = i alpha (E + beta rot E)

splits into (D + alpha1) phi = 0 and (D - alpha2) psi = 0 for
phi = E + iH, psi = E - iH, alpha1 = alpha/(1 + alpha beta),
alpha2 = alpha/(1 - alpha beta).
"""

from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from qmfs.core.config import settings
from qmfs.core.errors import BranchError, ChiralSingularityError, NonVectorialError, WaveNumberError
from qmfs.numerics.biquat import Biquaternion, ComplexVector3
from qmfs.numerics.kernels import WaveNumber, dipole_field_batch

logger = logging.getLogger(__name__)

SINGULARITY_TOL = 1e-12


class MediumParams(BaseModel):
    """Frequency, complex permittivity/permeability and real chirality measure."""

    model_config = ConfigDict(frozen=True)

    omega: float = Field(1.0, gt=0, description="Angular frequency")
    epsilon: complex = Field(1.0, description="Permittivity")
    mu: complex = Field(1.0, description="Permeability")
    beta: float = Field(0.0, description="Chirality measure (length units)")


@dataclass(frozen=True)
class WaveNumberPair:
    alpha1: WaveNumber
    alpha2: WaveNumber


def _branch_sqrt(value: complex) -> complex:
    root = cmath.sqrt(value)
    return -root if root.imag < 0 else root


def derive_wave_numbers(m: MediumParams) -> Tuple[WaveNumber, WaveNumberPair]:
    """alpha = omega sqrt(eps mu) with Im alpha >= 0, and the pair (alpha1, alpha2)."""
    alpha = m.omega * _branch_sqrt(complex(m.epsilon) * complex(m.mu))
    if alpha == 0:
        raise BranchError("epsilon*mu = 0 admits no non-zero wave number")
    if alpha.imag < 0:
        alpha = -alpha
    wave = WaveNumber(alpha)

    if m.beta == 0:
        return wave, WaveNumberPair(wave, wave)

    plus = 1 + alpha * m.beta
    minus = 1 - alpha * m.beta
    if abs(plus) < SINGULARITY_TOL or abs(minus) < SINGULARITY_TOL:
        raise ChiralSingularityError(
            f"1 ± alpha*beta vanishes for alpha={alpha}, beta={m.beta}"
        )
    try:
        pair = WaveNumberPair(WaveNumber(alpha / plus), WaveNumber(alpha / minus))
    except WaveNumberError as exc:
        raise BranchError(f"derived wave number outside the upper half-plane: {exc}") from exc
    logger.debug("wave numbers alpha=%s alpha1=%s alpha2=%s", alpha, pair.alpha1.alpha, pair.alpha2.alpha)
    return wave, pair


def fields_to_phi_psi(E: ComplexVector3, H: ComplexVector3) -> Tuple[Biquaternion, Biquaternion]:
    phi = (E + H * 1j).to_biquaternion()
    psi = (E - H * 1j).to_biquaternion()
    return phi, psi


def _sc_tolerance(phi: Biquaternion, psi: Biquaternion) -> float:
    magnitude = max(np.max(np.abs(phi.as_array())), np.max(np.abs(psi.as_array())))
    return settings.sc_tol_scale * (1.0 + float(magnitude))


def recover_EH(
    phi: Biquaternion, psi: Biquaternion, tol: Optional[float] = None
) -> Tuple[ComplexVector3, ComplexVector3]:
    """E = (phi + psi)/2, H = (phi - psi)/2i; both arguments must be purely vectorial."""
    tol = _sc_tolerance(phi, psi) if tol is None else tol
    if abs(phi.sc) > tol or abs(psi.sc) > tol:
        raise NonVectorialError(
            f"scalar parts {phi.sc:.3e}, {psi.sc:.3e} exceed tolerance {tol:.3e}"
        )
    E = (phi.vec + psi.vec) * 0.5
    H = (phi.vec - psi.vec) / 2j
    return E, H


def _material_roots(m: MediumParams) -> Tuple[complex, complex]:
    if complex(m.epsilon) == 0 or complex(m.mu) == 0:
        raise BranchError("epsilon and mu must be non-zero")
    return _branch_sqrt(complex(m.epsilon)), _branch_sqrt(complex(m.mu))


def scale_physical_fields(
    Etilde: ComplexVector3, Htilde: ComplexVector3, m: MediumParams
) -> Tuple[ComplexVector3, ComplexVector3]:
    """E = -Etilde/sqrt(mu), H = Htilde/sqrt(eps)."""
    root_eps, root_mu = _material_roots(m)
    return -Etilde / root_mu, Htilde / root_eps


def unscale_physical_fields(
    E: ComplexVector3, H: ComplexVector3, m: MediumParams
) -> Tuple[ComplexVector3, ComplexVector3]:
    root_eps, root_mu = _material_roots(m)
    return -E * root_mu, H * root_eps


def chiral_dipole_field_batch(
    pair: WaveNumberPair,
    c: np.ndarray,
    x: np.ndarray,
    position: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Exact chiral field: phi from the dipole at alpha1, psi from the dipole at alpha2.

    Reduces to the achiral dipole when alpha1 == alpha2.
    """
    e1, h1 = dipole_field_batch(pair.alpha1, c, x, position)
    if pair.alpha1 == pair.alpha2:
        return e1, h1
    e2, h2 = dipole_field_batch(pair.alpha2, c, x, position)
    phi = e1 + 1j * h1
    psi = e2 - 1j * h2
    return 0.5 * (phi + psi), (phi - psi) / 2j


def chiral_dipole_field(
    pair: WaveNumberPair,
    c: Sequence[float],
    x: Sequence[float],
    position: Optional[Sequence[float]] = None,
) -> Tuple[ComplexVector3, ComplexVector3]:
    e_field, h_field = chiral_dipole_field_batch(pair, np.asarray(c, float), np.asarray(x, float), position)
    return ComplexVector3.from_array(e_field), ComplexVector3.from_array(h_field)
