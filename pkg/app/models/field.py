"""Prime fields, their scalars, and univariate polynomials over them."""
from dataclasses import dataclass, field as dataclass_field
from typing import Iterable, Sequence

import numpy as np
from sympy import isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import (
    gf_add, gf_factor, gf_gcd, gf_gcdex, gf_monic, gf_mul, gf_pow, gf_quo, gf_rem, gf_sub
)

from app.errors import (
    FieldMismatch, InvalidPart, NoCoprimeSplit, NotMonic, ZeroInverse, ZeroPolynomial
)

MAX_CHARACTERISTIC = 2**31 - 1

# Above this characteristic products of two residues overflow the int64
# accumulator of a dense matrix product, so arrays fall back to Python ints.
_INT64_LIMIT = 2**24


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_p."""
    characteristic: int

    def __post_init__(self):
        p = self.characteristic
        if not isinstance(p, (int, np.integer)) or isinstance(p, bool):
            raise ValueError(f"Characteristic must be an integer, got {p!r}")
        if not 2 <= p <= MAX_CHARACTERISTIC:
            raise ValueError(f"Characteristic {p} outside [2, 2^31 - 1]")
        if not isprime(int(p)):
            raise ValueError(f"Characteristic {p} is not prime")
        object.__setattr__(self, 'characteristic', int(p))

    @property
    def p(self) -> int:
        return self.characteristic

    @property
    def dtype(self):
        """numpy dtype used for dense arrays over this field."""
        return np.int64 if self.characteristic < _INT64_LIMIT else object

    def array(self, data) -> np.ndarray:
        """Build a reduced numpy array over this field."""
        arr = np.array(data, dtype=object if self.dtype is object else np.int64)
        if self.dtype is object:
            return np.vectorize(lambda v: int(v) % self.characteristic, otypes=[object])(arr) \
                if arr.size else arr
        return arr % self.characteristic

    def zeros(self, shape) -> np.ndarray:
        if self.dtype is object:
            arr = np.empty(shape, dtype=object)
            arr.fill(0)
            return arr
        return np.zeros(shape, dtype=np.int64)

    def reduce(self, arr: np.ndarray) -> np.ndarray:
        return arr % self.characteristic

    def inverse(self, value: int) -> int:
        value = int(value) % self.characteristic
        if value == 0:
            raise ZeroInverse(f"0 has no inverse in F_{self.characteristic}")
        return pow(value, self.characteristic - 2, self.characteristic)

    def scalar(self, value: int) -> 'Scalar':
        return Scalar(int(value), self)

    def __str__(self):
        return f"F_{self.characteristic}"


@dataclass(frozen=True)
class Scalar:
    """An element of a prime field, stored fully reduced."""
    value: int
    field: PrimeField

    def __post_init__(self):
        object.__setattr__(self, 'value', int(self.value) % self.field.characteristic)

    def _coerce(self, other) -> int:
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other.value
        return int(other)

    def __add__(self, other):
        return Scalar(self.value + self._coerce(other), self.field)

    def __sub__(self, other):
        return Scalar(self.value - self._coerce(other), self.field)

    def __mul__(self, other):
        return Scalar(self.value * self._coerce(other), self.field)

    def __neg__(self):
        return Scalar(-self.value, self.field)

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def inverse(self) -> 'Scalar':
        return Scalar(self.field.inverse(self.value), self.field)


def scalar_inverse(a: Scalar) -> Scalar:
    """Multiplicative inverse in F_p; raises ZeroInverse for 0."""
    return a.inverse()


@dataclass(frozen=True)
class Polynomial:
    """
    Dense univariate polynomial over F_p.

    ``coefficients[i]`` is the coefficient of t^i; trailing zeros are stripped,
    so the zero polynomial has an empty coefficient tuple.
    """
    field: PrimeField
    coefficients: tuple = dataclass_field(default=())

    def __post_init__(self):
        p = self.field.characteristic
        coeffs = [int(c) % p for c in self.coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, 'coefficients', tuple(coeffs))

    @classmethod
    def from_gf(cls, field: PrimeField, dense: Sequence) -> 'Polynomial':
        """Build from a high-to-low coefficient list (galoistools layout)."""
        return cls(field, tuple(int(c) for c in reversed(list(dense))))

    @classmethod
    def monomial(cls, field: PrimeField, degree: int, coefficient: int = 1) -> 'Polynomial':
        return cls(field, (0,) * degree + (coefficient,))

    @classmethod
    def one(cls, field: PrimeField) -> 'Polynomial':
        return cls(field, (1,))

    def to_gf(self) -> list:
        return [ZZ(c) for c in reversed(self.coefficients)]

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def is_monic(self) -> bool:
        return bool(self.coefficients) and self.coefficients[-1] == 1

    @property
    def p(self) -> int:
        return self.field.characteristic

    def _check(self, other: 'Polynomial'):
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def __add__(self, other: 'Polynomial') -> 'Polynomial':
        self._check(other)
        return Polynomial.from_gf(self.field, gf_add(self.to_gf(), other.to_gf(), self.p, ZZ))

    def __sub__(self, other: 'Polynomial') -> 'Polynomial':
        self._check(other)
        return Polynomial.from_gf(self.field, gf_sub(self.to_gf(), other.to_gf(), self.p, ZZ))

    def __mul__(self, other: 'Polynomial') -> 'Polynomial':
        self._check(other)
        return Polynomial.from_gf(self.field, gf_mul(self.to_gf(), other.to_gf(), self.p, ZZ))

    def __mod__(self, other: 'Polynomial') -> 'Polynomial':
        self._check(other)
        if other.is_zero:
            raise ZeroPolynomial("Remainder modulo the zero polynomial")
        return Polynomial.from_gf(self.field, gf_rem(self.to_gf(), other.to_gf(), self.p, ZZ))

    def __pow__(self, exponent: int) -> 'Polynomial':
        return Polynomial.from_gf(self.field, gf_pow(self.to_gf(), exponent, self.p, ZZ))

    def monic(self) -> 'Polynomial':
        if self.is_zero:
            return self
        _, monic = gf_monic(self.to_gf(), self.p, ZZ)
        return Polynomial.from_gf(self.field, monic)

    def sort_key(self) -> tuple:
        return (self.degree, self.coefficients)

    def __str__(self):
        if self.is_zero:
            return '0'
        terms = []
        for degree in range(self.degree, -1, -1):
            c = self.coefficients[degree]
            if c == 0:
                continue
            power = '' if degree == 0 else ('t' if degree == 1 else f't^{degree}')
            if not power:
                terms.append(str(c))
            elif c == 1:
                terms.append(power)
            else:
                terms.append(f'{c}{power}')
        return ' + '.join(terms)


def poly_gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    """Monic greatest common divisor; gcd(0, 0) = 0."""
    f._check(g)
    return Polynomial.from_gf(f.field, gf_gcd(f.to_gf(), g.to_gf(), f.p, ZZ))


def poly_lcm(f: Polynomial, g: Polynomial) -> Polynomial:
    f._check(g)
    if f.is_zero or g.is_zero:
        return Polynomial(f.field)
    quotient = gf_quo((f * g).to_gf(), poly_gcd(f, g).to_gf(), f.p, ZZ)
    return Polynomial.from_gf(f.field, quotient).monic()


def poly_factor(f: Polynomial) -> list[tuple[Polynomial, int]]:
    """
    Factor a monic polynomial into monic irreducibles.

    Returns (factor, multiplicity) pairs sorted by degree, then by the
    coefficient sequence; their product reassembles ``f`` exactly.
    """
    if f.is_zero:
        raise ZeroPolynomial("Cannot factor the zero polynomial")
    if not f.is_monic:
        raise NotMonic(f"Polynomial {f} is not monic")
    if f.degree < 1:
        raise ValueError("Polynomial must have degree at least 1")

    _, factors = gf_factor(f.to_gf(), f.p, ZZ)
    result = [(Polynomial.from_gf(f.field, g), int(k)) for g, k in factors]
    result.sort(key=lambda pair: pair[0].sort_key())
    return result


def multiply_factors(factors: Iterable[tuple[Polynomial, int]], field: PrimeField) -> Polynomial:
    product = Polynomial.one(field)
    for g, k in factors:
        product = product * (g ** k)
    return product


def crt_split_polynomial(m: Polynomial, part: Iterable[int],
                         factors: list[tuple[Polynomial, int]] = None) -> Polynomial:
    """
    CRT projector for a coprime split of ``m``.

    ``part`` holds indices into ``poly_factor(m)``. The result h has
    deg h < deg m, h = 1 modulo the selected prime powers and h = 0 modulo
    the rest, so h(x) is idempotent whenever x has minimal polynomial m.
    """
    if factors is None:
        factors = poly_factor(m)
    if len(factors) < 2:
        raise NoCoprimeSplit(f"{m} is a power of a single irreducible")

    selected = set(part)
    if not selected or len(selected) >= len(factors) or \
            any(not 0 <= i < len(factors) for i in selected):
        raise InvalidPart(f"Part {sorted(selected)} is not a nonempty proper subset "
                          f"of {len(factors)} factors")

    inside = multiply_factors((factors[i] for i in sorted(selected)), m.field)
    outside = multiply_factors(
        (factors[i] for i in range(len(factors)) if i not in selected), m.field
    )
    # s*inside + t*outside = 1, so t*outside is 1 mod inside and 0 mod outside
    _, t, gcd = gf_gcdex(inside.to_gf(), outside.to_gf(), m.p, ZZ)
    if Polynomial.from_gf(m.field, gcd) != Polynomial.one(m.field):
        raise NoCoprimeSplit("Selected factors are not coprime to the rest")
    return (Polynomial.from_gf(m.field, t) * outside) % m
