"""Finite-dimensional associative unital algebras given by structure constants."""
from dataclasses import dataclass, field as dataclass_field
from typing import Optional, Sequence

import numpy as np

from app.errors import AlgebraMismatch, InvalidAlgebra, NotIdempotent, ZeroIdempotent
from app.models.field import Polynomial, PrimeField
from app.models.matrix import MatrixFp, array_key, coordinate_block, echelon_basis, matmul


@dataclass
class ValidationReport:
    """Outcome of an invariant check: ok iff no violations were recorded."""
    subject: str
    violations: list[str] = dataclass_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            'subject': self.subject,
            'ok': self.ok,
            'violations': list(self.violations),
        }


@dataclass(frozen=True, eq=False)
class StructureAlgebra:
    """
    An algebra over F_p with basis b_0..b_{n-1}.

    constants[i, j, k] is the coefficient of b_k in b_i * b_j. Construction
    checks shapes only; the algebra laws are checked by validate_algebra.
    """
    field: PrimeField
    constants: np.ndarray
    unit: np.ndarray
    basis_names: Optional[tuple] = None

    def __post_init__(self):
        c = self.field.array(self.constants)
        u = self.field.array(self.unit)
        n = u.shape[0] if u.ndim == 1 else -1
        if n < 1:
            raise InvalidAlgebra("Algebra dimension must be at least 1")
        if c.shape != (n, n, n):
            raise InvalidAlgebra(f"Structure constants have shape {c.shape}, expected {(n, n, n)}")
        if self.basis_names is not None:
            names = tuple(str(s) for s in self.basis_names)
            if len(names) != n:
                raise InvalidAlgebra(f"{len(names)} basis names for dimension {n}")
            object.__setattr__(self, 'basis_names', names)
        c.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, 'constants', c)
        object.__setattr__(self, 'unit', u)
        object.__setattr__(self, '_key', (self.field.characteristic, array_key(c), array_key(u)))

    @property
    def dim(self) -> int:
        return self.unit.shape[0]

    @property
    def p(self) -> int:
        return self.field.characteristic

    def key(self) -> tuple:
        return self._key

    def __eq__(self, other) -> bool:
        if not isinstance(other, StructureAlgebra):
            return NotImplemented
        return self is other or self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def element(self, coeffs) -> 'AlgebraElement':
        return AlgebraElement(self, coeffs)

    def zero(self) -> 'AlgebraElement':
        return AlgebraElement(self, self.field.zeros((self.dim,)))

    def one(self) -> 'AlgebraElement':
        return AlgebraElement(self, self.unit)

    def basis_element(self, i: int) -> 'AlgebraElement':
        coeffs = self.field.zeros((self.dim,))
        coeffs[i] = 1
        return AlgebraElement(self, coeffs)

    def basis(self) -> list['AlgebraElement']:
        return [self.basis_element(i) for i in range(self.dim)]

    def random_element(self, rng: np.random.Generator) -> 'AlgebraElement':
        return AlgebraElement(self, [int(v) for v in rng.integers(0, self.p, self.dim)])

    def flat_constants(self) -> np.ndarray:
        """constants reshaped to n x n^2, the left factor's index first."""
        return self.constants.reshape(self.dim, self.dim * self.dim)

    def multiply_many(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """Row-wise products X[b] * Y[b] of two stacks of coordinate vectors."""
        n = self.dim
        left = matmul(X, self.flat_constants(), self.p).reshape(-1, n, n)
        return (Y[:, None, :] @ left)[:, 0, :] % self.p

    def __repr__(self):
        return f"StructureAlgebra({self.field}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """An element of a StructureAlgebra in coordinates."""
    algebra: StructureAlgebra
    coeffs: np.ndarray

    def __post_init__(self):
        arr = self.algebra.field.array(self.coeffs).reshape(-1)
        if arr.shape[0] != self.algebra.dim:
            raise AlgebraMismatch(f"{arr.shape[0]} coefficients for an algebra of dimension "
                                  f"{self.algebra.dim}")
        arr.setflags(write=False)
        object.__setattr__(self, 'coeffs', arr)

    @property
    def field(self) -> PrimeField:
        return self.algebra.field

    def _check(self, other: 'AlgebraElement'):
        if not isinstance(other, AlgebraElement) or other.algebra != self.algebra:
            raise AlgebraMismatch("Elements belong to different algebras")

    def __add__(self, other: 'AlgebraElement') -> 'AlgebraElement':
        self._check(other)
        return AlgebraElement(self.algebra, (self.coeffs + other.coeffs) % self.algebra.p)

    def __sub__(self, other: 'AlgebraElement') -> 'AlgebraElement':
        self._check(other)
        return AlgebraElement(self.algebra, (self.coeffs - other.coeffs) % self.algebra.p)

    def __neg__(self) -> 'AlgebraElement':
        return AlgebraElement(self.algebra, (-self.coeffs) % self.algebra.p)

    def __mul__(self, other: 'AlgebraElement') -> 'AlgebraElement':
        return multiply(self, other)

    def scale(self, c: int) -> 'AlgebraElement':
        return AlgebraElement(self.algebra, (self.coeffs * (int(c) % self.algebra.p)) % self.algebra.p)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.algebra == other.algebra and bool(np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.algebra, tuple(self.tolist())))

    @property
    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def is_one(self) -> bool:
        return bool(np.array_equal(self.coeffs, self.algebra.unit))

    def is_idempotent(self) -> bool:
        return self * self == self

    def tolist(self) -> list[int]:
        return [int(v) for v in self.coeffs]

    def __repr__(self):
        return f"AlgebraElement({self.tolist()})"


@dataclass(frozen=True)
class IdempotentSetFlags:
    each_idempotent: bool
    pairwise_orthogonal: bool
    complete: bool

    @property
    def all(self) -> bool:
        return self.each_idempotent and self.pairwise_orthogonal and self.complete

    def to_dict(self) -> dict:
        return {
            'each_idempotent': self.each_idempotent,
            'pairwise_orthogonal': self.pairwise_orthogonal,
            'complete': self.complete,
        }


@dataclass(frozen=True)
class CornerAlgebra:
    """
    The corner eAe as an algebra in its own right.

    ``embed`` has the corner basis as rows in parent coordinates, so a corner
    coordinate vector v maps to v @ embed; ``project`` selects the pivot
    coordinates, so embed @ project is the identity.
    """
    parent: StructureAlgebra
    idempotent: AlgebraElement
    algebra: StructureAlgebra
    embed: MatrixFp
    project: MatrixFp

    def embed_element(self, x: AlgebraElement) -> AlgebraElement:
        if x.algebra != self.algebra:
            raise AlgebraMismatch("Element is not in the corner algebra")
        return self.parent.element(matmul(x.coeffs[None, :], self.embed.data, self.parent.p)[0])

    def project_element(self, x: AlgebraElement) -> AlgebraElement:
        if x.algebra != self.parent:
            raise AlgebraMismatch("Element is not in the parent algebra")
        return self.algebra.element(matmul(x.coeffs[None, :], self.project.data, self.parent.p)[0])


def validate_algebra(A: StructureAlgebra) -> ValidationReport:
    """Check associativity on every basis quadruple and the two-sided unit law."""
    report = ValidationReport(subject=f"algebra over {A.field} of dimension {A.dim}")
    c = A.constants
    p = A.p
    n = A.dim
    for i in range(n):
        # (b_i b_j) b_k against b_i (b_j b_k), indexed [j, k, l]
        left = np.tensordot(c[i], c, axes=([1], [0])) % p
        right = np.tensordot(c, c[i], axes=([2], [0])) % p
        for j, k, l in zip(*np.nonzero(left != right)):
            report.violations.append(f"associativity fails at (i,j,k,l)=({i},{int(j)},{int(k)},{int(l)})")

    identity = np.eye(n, dtype=np.int64)
    unit_left = np.tensordot(A.unit, c, axes=([0], [0])) % p
    unit_right = np.tensordot(c, A.unit, axes=([1], [0])) % p
    for i in range(n):
        if not np.array_equal(np.asarray(unit_left[i], dtype=np.int64), identity[i]):
            report.violations.append(f"unit law fails on the left at index {i}")
        if not np.array_equal(np.asarray(unit_right[i], dtype=np.int64), identity[i]):
            report.violations.append(f"unit law fails on the right at index {i}")
    return report


def multiply(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    x._check(y)
    A = x.algebra
    return A.element(A.multiply_many(x.coeffs[None, :], y.coeffs[None, :])[0])


def left_mul_matrix(x: AlgebraElement) -> MatrixFp:
    """Matrix of y -> x*y acting on column coordinate vectors."""
    A = x.algebra
    n = A.dim
    rows = matmul(x.coeffs[None, :], A.flat_constants(), A.p).reshape(n, n)
    return MatrixFp(A.field, rows.T.copy())


def right_mul_matrix(x: AlgebraElement) -> MatrixFp:
    """Matrix of y -> y*x acting on row coordinate vectors: coords(y*x) = y @ R."""
    A = x.algebra
    n = A.dim
    # R[i, k] = sum_j x_j c[i, j, k]
    rows = (np.tensordot(A.constants, x.coeffs, axes=([1], [0])) % A.p).reshape(n, n)
    return MatrixFp(A.field, rows)


def check_idempotent_set(A: StructureAlgebra, S: Sequence[AlgebraElement]) -> IdempotentSetFlags:
    for e in S:
        if e.algebra != A:
            raise AlgebraMismatch("Idempotent set contains an element of another algebra")
    each = all(e * e == e for e in S)
    orthogonal = all(
        (S[a] * S[b]).is_zero
        for a in range(len(S)) for b in range(len(S)) if a != b
    )
    total = A.zero()
    for e in S:
        total = total + e
    return IdempotentSetFlags(each, orthogonal, total.is_one())


def corner_algebra(A: StructureAlgebra, e: AlgebraElement) -> CornerAlgebra:
    if e.algebra != A:
        raise AlgebraMismatch("Idempotent belongs to another algebra")
    if e * e != e:
        raise NotIdempotent(f"{e.tolist()} is not idempotent")
    if e.is_zero:
        raise ZeroIdempotent("The corner of the zero idempotent is the zero ring")

    n = A.dim
    p = A.p
    basis = np.eye(n, dtype=np.int64)
    stack_e = np.broadcast_to(e.coeffs, (n, n))
    spanning = A.multiply_many(A.multiply_many(stack_e, basis), stack_e)
    B, pivots = echelon_basis(spanning, p)
    r = B.shape[0]

    # products of corner basis vectors, read back at the pivot coordinates
    left = np.repeat(B, r, axis=0)
    right = np.tile(B, (r, 1))
    products = A.multiply_many(left, right)[:, pivots].reshape(r, r, r)
    corner = StructureAlgebra(A.field, products, e.coeffs[pivots])

    project = A.field.zeros((n, r))
    for j, col in enumerate(pivots):
        project[col, j] = 1
    return CornerAlgebra(
        parent=A,
        idempotent=e,
        algebra=corner,
        embed=MatrixFp(A.field, B),
        project=MatrixFp(A.field, project),
    )


# Builders for the standard algebras of the corpus

def _from_products(field: PrimeField, dim: int, product, unit: Sequence[int],
                   names: Optional[Sequence[str]] = None) -> StructureAlgebra:
    constants = field.zeros((dim, dim, dim))
    for i in range(dim):
        for j in range(dim):
            for k, v in product(i, j).items():
                constants[i, j, k] = (constants[i, j, k] + v) % field.characteristic
    return StructureAlgebra(field, constants, field.array(list(unit)),
                            tuple(names) if names else None)


def polynomial_quotient(field: PrimeField, modulus: Polynomial) -> StructureAlgebra:
    """F_p[x]/(modulus) on the basis 1, x, ..., x^(d-1)."""
    d = modulus.degree
    if d < 1 or not modulus.is_monic:
        raise InvalidAlgebra("Quotient modulus must be monic of degree at least 1")

    def product(i, j):
        r = Polynomial.monomial(field, i + j) % modulus
        return {k: c for k, c in enumerate(r.coefficients) if c}

    unit = [1] + [0] * (d - 1)
    names = ['1', 'x'] + [f'x^{k}' for k in range(2, d)]
    return _from_products(field, d, product, unit, names[:d])


def product_algebra(field: PrimeField, copies: int) -> StructureAlgebra:
    """F_p x ... x F_p with componentwise multiplication."""
    return _from_products(field, copies, lambda i, j: {i: 1} if i == j else {},
                          [1] * copies, [f'e{i + 1}' for i in range(copies)])


def matrix_algebra(field: PrimeField, n: int) -> StructureAlgebra:
    """n x n matrices over F_p on the matrix units E_ab in row-major order."""
    units = [(a, b) for a in range(n) for b in range(n)]
    index = {u: k for k, u in enumerate(units)}

    def product(i, j):
        (a, b), (c, d) = units[i], units[j]
        return {index[(a, d)]: 1} if b == c else {}

    unit = [1 if a == b else 0 for a, b in units]
    return _from_products(field, len(units), product, unit,
                          [f'E{a + 1}{b + 1}' for a, b in units])


def upper_triangular_algebra(field: PrimeField, n: int) -> StructureAlgebra:
    """Upper-triangular n x n matrices on the units E_ab, a <= b, row-major."""
    units = [(a, b) for a in range(n) for b in range(a, n)]
    index = {u: k for k, u in enumerate(units)}

    def product(i, j):
        (a, b), (c, d) = units[i], units[j]
        return {index[(a, d)]: 1} if b == c else {}

    unit = [1 if a == b else 0 for a, b in units]
    return _from_products(field, len(units), product, unit,
                          [f'E{a + 1}{b + 1}' for a, b in units])


def iter_idempotents(A: StructureAlgebra, chunk: int = 4096):
    """Every idempotent of A, scanning all p^dim elements in canonical order."""
    total = A.p ** A.dim
    for start in range(0, total, chunk):
        X = coordinate_block(A.p, A.dim, start, min(total, start + chunk))
        squares = A.multiply_many(X, X)
        for h in np.nonzero(np.all(squares == X, axis=1))[0]:
            yield A.element(X[h])
