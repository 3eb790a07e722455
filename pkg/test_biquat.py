import numpy as np
import pytest

from qmfs.core.errors import ZeroDivisorError
from qmfs.numerics.biquat import (
    I0,
    I1,
    I2,
    I3,
    STRUCTURE,
    Biquaternion,
    ComplexVector3,
    cross,
    dot,
    is_zero_divisor,
    left_matrix,
    qconj,
    qconj_arrays,
    qinv,
    qmul,
    qmul_arrays,
    qmul_structure,
)


def random_quaternions(rng, count):
    return rng.normal(size=(count, 4)) + 1j * rng.normal(size=(count, 4))


def assert_quaternion_close(actual, expected, atol=1e-14):
    np.testing.assert_allclose(actual.as_array(), expected.as_array(), atol=atol, rtol=0)


MULTIPLICATION_TABLE = [
    (I0, I0, I0), (I0, I1, I1), (I0, I2, I2), (I0, I3, I3),
    (I1, I0, I1), (I1, I1, -I0), (I1, I2, I3), (I1, I3, -I2),
    (I2, I0, I2), (I2, I1, -I3), (I2, I2, -I0), (I2, I3, I1),
    (I3, I0, I3), (I3, I1, I2), (I3, I2, -I1), (I3, I3, -I0),
]


@pytest.mark.parametrize("left,right,product", MULTIPLICATION_TABLE)
def test_unit_multiplication_table(left, right, product):
    assert qmul(left, right) == product


def test_qmul_examples():
    assert qmul(I1, I2) == I3
    assert qmul(I2, I1) == -I3
    a = Biquaternion(1.5 - 2j, 0.3j, -4, 2 + 1j)
    assert qmul(a, I0) == a
    assert qmul(I0 + I1, I0 + I2) == Biquaternion(1, 1, 1, 1)


def test_qmul_is_not_commutative():
    a = Biquaternion(1, 2j, 0, 1)
    b = Biquaternion(0, 1, 1j, -1)
    assert not np.allclose(qmul(a, b).as_array(), qmul(b, a).as_array())


def test_associativity_on_random_triples():
    rng = np.random.default_rng(7)
    a, b, c = (random_quaternions(rng, 1000) for _ in range(3))
    left = qmul_arrays(qmul_arrays(a, b), c)
    right = qmul_arrays(a, qmul_arrays(b, c))
    scale = np.max(np.abs(left), axis=-1, keepdims=True)
    assert np.max(np.abs(left - right) / scale) < 1e-12


def test_conjugation_is_an_anti_automorphism():
    rng = np.random.default_rng(11)
    a, b = random_quaternions(rng, 1000), random_quaternions(rng, 1000)
    np.testing.assert_allclose(
        qconj_arrays(qmul_arrays(a, b)),
        qmul_arrays(qconj_arrays(b), qconj_arrays(a)),
        atol=1e-12,
    )


def test_product_with_conjugate_is_scalar():
    rng = np.random.default_rng(3)
    a = random_quaternions(rng, 1000)
    product = qmul_arrays(a, qconj_arrays(a))
    scale = np.max(np.abs(a), axis=-1) ** 2
    assert np.max(np.abs(product[:, 1:]) / scale[:, None]) < 1e-13
    np.testing.assert_allclose(product[:, 0], np.sum(a**2, axis=-1), rtol=1e-12, atol=1e-12)


def test_vector_formula_matches_structure_constants():
    rng = np.random.default_rng(5)
    a, b = random_quaternions(rng, 200), random_quaternions(rng, 200)
    np.testing.assert_allclose(qmul_arrays(a, b), qmul_structure(a, b), atol=1e-14 * 20)


def test_scalar_api_agrees_with_array_api():
    rng = np.random.default_rng(9)
    a, b = random_quaternions(rng, 2)
    expected = qmul_arrays(a, b)
    actual = qmul(Biquaternion.from_array(a), Biquaternion.from_array(b)).as_array()
    np.testing.assert_allclose(actual, expected, atol=1e-14)


def test_left_matrix_reproduces_left_multiplication():
    rng = np.random.default_rng(13)
    p, a = random_quaternions(rng, 50), random_quaternions(rng, 50)
    np.testing.assert_allclose(
        np.einsum("nmk,nk->nm", left_matrix(p), a), qmul_arrays(p, a), atol=1e-13
    )


def test_structure_constants_are_read_only():
    with pytest.raises(ValueError):
        STRUCTURE[0, 0, 0] = 2.0


def test_conjugate_examples():
    assert qconj(I1) == -I1
    assert qconj(Biquaternion(3, 0, 2, 0)) == Biquaternion(3, 0, -2, 0)
    a = Biquaternion(1 + 1j, 2, -1j, 0.5)
    assert qconj(qconj(a)) == a


def test_zero_divisor_detection():
    divisor = Biquaternion(1, 1j, 0, 0)
    assert qmul(divisor, qconj(divisor)).is_zero()
    assert is_zero_divisor(divisor)
    assert not is_zero_divisor(I1)
    assert not is_zero_divisor(Biquaternion())


def test_inverse_examples():
    assert_quaternion_close(qinv(I1), -I1)
    assert_quaternion_close(qinv(Biquaternion(2)), Biquaternion(0.5))
    assert_quaternion_close(qinv(I0 + I1), Biquaternion(0.5, -0.5, 0, 0))


def test_inverse_is_two_sided():
    a = Biquaternion(0.3 + 1j, -2, 0.5j, 1.25)
    assert_quaternion_close(qmul(a, qinv(a)), I0, atol=1e-13)
    assert_quaternion_close(qmul(qinv(a), a), I0, atol=1e-13)


@pytest.mark.parametrize("value", [Biquaternion(), Biquaternion(1, 1j, 0, 0), Biquaternion(0, 1, 1j, 0)])
def test_inverse_rejects_zero_and_zero_divisors(value):
    with pytest.raises(ZeroDivisorError):
        qinv(value)


def test_dot_and_cross_are_bilinear():
    e1, e2 = ComplexVector3(1, 0, 0), ComplexVector3(0, 1, 0)
    assert dot(e1, e2) == 0
    assert cross(e1, e2) == ComplexVector3(0, 0, 1)
    assert dot(ComplexVector3(1j, 0, 0), ComplexVector3(1j, 0, 0)) == -1


def test_scalar_and_vector_parts_reconstruct():
    a = Biquaternion(2 - 1j, 1, 1j, -3)
    assert Biquaternion.from_parts(a.sc, a.vec) == a
    v = ComplexVector3(1j, 2, -1)
    assert v.to_biquaternion().vec == v
    assert v.to_biquaternion().sc == 0
