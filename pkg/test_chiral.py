import numpy as np
import pytest

from qmfs.core.errors import BranchError, ChiralSingularityError, NonVectorialError
from qmfs.models.enums import KernelSign
from qmfs.numerics.biquat import Biquaternion, ComplexVector3
from qmfs.numerics.chiral import (
    MediumParams,
    WaveNumberPair,
    chiral_dipole_field,
    chiral_dipole_field_batch,
    derive_wave_numbers,
    fields_to_phi_psi,
    recover_EH,
    scale_physical_fields,
    unscale_physical_fields,
)
from qmfs.numerics.kernels import WaveNumber, dipole_field_batch, dirac_apply_fd
from qmfs.numerics.verify import FdCheckConfig, check_maxwell, random_shell_points


def test_achiral_medium():
    alpha, pair = derive_wave_numbers(MediumParams(omega=1, epsilon=1, mu=1, beta=0))
    assert alpha.alpha == 1
    assert pair.alpha1 == pair.alpha2 == alpha


def test_chiral_wave_numbers():
    alpha, pair = derive_wave_numbers(MediumParams(omega=2, epsilon=1, mu=1, beta=0.25))
    assert alpha.alpha == 2
    assert pair.alpha1.alpha == pytest.approx(4 / 3, rel=1e-15)
    assert pair.alpha2.alpha == pytest.approx(4, rel=1e-15)


def test_chiral_singularity():
    with pytest.raises(ChiralSingularityError):
        derive_wave_numbers(MediumParams(omega=1, epsilon=1, mu=1, beta=1))


def test_lossy_medium_picks_the_upper_branch():
    alpha, pair = derive_wave_numbers(MediumParams(omega=1, epsilon=2 + 0.5j, mu=1, beta=0.1))
    assert alpha.alpha.imag >= 0
    assert pair.alpha1.alpha.imag >= 0 and pair.alpha2.alpha.imag >= 0
    assert alpha.alpha**2 == pytest.approx(2 + 0.5j)


def test_vanishing_permittivity_has_no_branch():
    with pytest.raises(BranchError):
        derive_wave_numbers(MediumParams(epsilon=0, mu=1))


def test_complex_parameters_from_strings():
    medium = MediumParams.model_validate({"omega": 1, "epsilon": "2+0.5j", "mu": 1.0, "beta": 0})
    assert medium.epsilon == 2 + 0.5j


def test_phi_psi_round_trip():
    E = ComplexVector3(1, 2j, -0.5)
    H = ComplexVector3(0.3j, 1, 1 + 1j)
    phi, psi = fields_to_phi_psi(E, H)
    assert phi.sc == 0 and psi.sc == 0
    E_back, H_back = recover_EH(phi, psi)
    np.testing.assert_allclose(E_back.as_array(), E.as_array(), atol=1e-15)
    np.testing.assert_allclose(H_back.as_array(), H.as_array(), atol=1e-15)


def test_phi_psi_of_zero_and_pure_electric_fields():
    zero = ComplexVector3()
    assert fields_to_phi_psi(zero, zero) == (Biquaternion(), Biquaternion())
    phi, psi = fields_to_phi_psi(ComplexVector3(1, 0, 0), zero)
    assert phi == psi == Biquaternion(0, 1, 0, 0)


def test_recover_rejects_scalar_parts():
    with pytest.raises(NonVectorialError):
        recover_EH(Biquaternion(1e-3, 1, 0, 0), Biquaternion(0, 1, 0, 0))


def test_physical_scaling_round_trip():
    medium = MediumParams(epsilon=4, mu=9)
    E, H = ComplexVector3(1, 0, 2j), ComplexVector3(0, 3, 1)
    E_phys, H_phys = scale_physical_fields(E, H, medium)
    np.testing.assert_allclose(E_phys.as_array(), -E.as_array() / 3)
    np.testing.assert_allclose(H_phys.as_array(), H.as_array() / 2)
    E_back, H_back = unscale_physical_fields(E_phys, H_phys, medium)
    np.testing.assert_allclose(E_back.as_array(), E.as_array())
    np.testing.assert_allclose(H_back.as_array(), H.as_array())


def test_chiral_dipole_reduces_to_the_achiral_dipole():
    alpha = WaveNumber(1.0)
    c = np.array([0.0, 1.0, 1.0])
    x = np.array([0.8, -1.1, 0.4])
    expected = dipole_field_batch(alpha, c, x)
    actual = chiral_dipole_field_batch(WaveNumberPair(alpha, alpha), c, x)
    np.testing.assert_array_equal(actual[0], expected[0])
    np.testing.assert_array_equal(actual[1], expected[1])


@pytest.mark.parametrize("beta", [0.0, 0.25])
def test_dipole_diagonalization(beta):
    _, pair = derive_wave_numbers(MediumParams(omega=2 if beta else 1, beta=beta))
    c = (0.0, 0.0, 1.0)

    def phi(x):
        return fields_to_phi_psi(*chiral_dipole_field(pair, c, x))[0]

    def psi(x):
        return fields_to_phi_psi(*chiral_dipole_field(pair, c, x))[1]

    for x in random_shell_points(20, 0.5, 3.0, seed=21):
        plus = dirac_apply_fd(pair.alpha1, KernelSign.PLUS, phi, x)
        minus = dirac_apply_fd(pair.alpha2, KernelSign.MINUS, psi, x)
        assert plus.norm() / phi(x).norm() < 1e-5
        assert minus.norm() / psi(x).norm() < 1e-5


def test_chiral_dipole_solves_the_chiral_maxwell_system():
    medium = MediumParams(omega=2, beta=0.25)
    alpha, pair = derive_wave_numbers(medium)
    c = np.array([0.2, 0.0, 1.0])
    cfg = FdCheckConfig(step=1e-5, points=[tuple(p) for p in random_shell_points(10, 0.8, 3.0, seed=5)])

    def e_field(x):
        return chiral_dipole_field_batch(pair, c, x)[0]

    def h_field(x):
        return chiral_dipole_field_batch(pair, c, x)[1]

    first, second = check_maxwell(e_field, h_field, alpha, medium.beta, cfg)
    assert first < 1e-4
    assert second < 1e-4
