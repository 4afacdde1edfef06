import pytest

from app.errors import FieldMismatch, InvalidPart, NoCoprimeSplit, NotMonic, ZeroInverse, ZeroPolynomial
from app.models.field import (
    Polynomial, PrimeField, crt_split_polynomial, multiply_factors, poly_factor,
    poly_gcd, poly_lcm, scalar_inverse
)


@pytest.mark.parametrize('p', [0, 1, 4, 9, 2**31])
def test_rejects_non_prime_characteristic(p):
    with pytest.raises(ValueError):
        PrimeField(p)


def test_large_prime_uses_object_arrays():
    assert PrimeField(2**31 - 1).dtype is object
    assert PrimeField(7).array([8, -1]).tolist() == [1, 6]


def test_scalar_arithmetic():
    F7 = PrimeField(7)
    a, b = F7.scalar(3), F7.scalar(5)
    assert int(a + b) == 1
    assert int(a - b) == 5
    assert int(a * b) == 1
    assert int(scalar_inverse(a)) == 5
    assert not F7.scalar(14)


def test_zero_has_no_inverse():
    with pytest.raises(ZeroInverse):
        PrimeField(5).scalar(0).inverse()


def test_scalars_from_different_fields_do_not_mix():
    with pytest.raises(FieldMismatch):
        PrimeField(3).scalar(1) + PrimeField(5).scalar(1)


def test_polynomial_strips_trailing_zeros(F2):
    f = Polynomial(F2, (1, 0, 2, 0))
    assert f.coefficients == (1,)
    assert f.degree == 0
    assert Polynomial(F2).degree == -1
    assert str(Polynomial(F2, (1, 1, 1))) == 't^2 + t + 1'


def test_gcd_and_lcm():
    F3 = PrimeField(3)
    t = Polynomial.monomial(F3, 1)
    one = Polynomial.one(F3)
    f = t * (t + one)
    g = t * (t - one)
    assert poly_gcd(f, g) == t
    assert poly_lcm(f, g) == (t * (t + one) * (t - one)).monic()
    assert poly_gcd(Polynomial(F3), Polynomial(F3)).is_zero


def test_factor_is_sorted_and_reassembles(F2):
    t = Polynomial.monomial(F2, 1)
    one = Polynomial.one(F2)
    m = t * t * (t + one) * (t * t + t + one)
    factors = poly_factor(m)
    assert [(g.coefficients, k) for g, k in factors] == [((0, 1), 2), ((1, 1), 1), ((1, 1, 1), 1)]
    assert multiply_factors(factors, F2) == m


def test_factor_rejects_zero_and_non_monic():
    F5 = PrimeField(5)
    with pytest.raises(ZeroPolynomial):
        poly_factor(Polynomial(F5))
    with pytest.raises(NotMonic):
        poly_factor(Polynomial(F5, (1, 2)))


def test_crt_projector(F2):
    m = Polynomial(F2, (0, 1, 1))            # t(t + 1)
    h = crt_split_polynomial(m, [0])
    assert h.coefficients == (1, 1)
    assert h.degree < m.degree
    factors = poly_factor(m)
    assert (h % factors[0][0]) == Polynomial.one(F2)
    assert (h % factors[1][0]).is_zero


def test_crt_projector_is_idempotent_modulo_m():
    F5 = PrimeField(5)
    t = Polynomial.monomial(F5, 1)
    one = Polynomial.one(F5)
    m = (t - one) ** 2 * (t + one) * t
    for part in ([0], [1], [0, 2]):
        h = crt_split_polynomial(m, part)
        assert (h * h) % m == h


def test_crt_rejects_prime_power_and_bad_parts(F2):
    t = Polynomial.monomial(F2, 1)
    with pytest.raises(NoCoprimeSplit):
        crt_split_polynomial(t ** 3, [0])
    m = Polynomial(F2, (0, 1, 1))
    with pytest.raises(InvalidPart):
        crt_split_polynomial(m, [])
    with pytest.raises(InvalidPart):
        crt_split_polynomial(m, [0, 1])
    with pytest.raises(InvalidPart):
        crt_split_polynomial(m, [2])
