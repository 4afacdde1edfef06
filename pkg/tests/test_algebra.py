import numpy as np
import pytest

from app.errors import AlgebraMismatch, InvalidAlgebra, NotIdempotent, ZeroIdempotent
from app.models.algebra import (
    StructureAlgebra, check_idempotent_set, corner_algebra, iter_idempotents,
    left_mul_matrix, right_mul_matrix, validate_algebra
)
from app.models.field import PrimeField


def test_builtin_algebras_satisfy_the_laws(f2, dual_numbers, f4, f2xf2, m2, ut2):
    for A in (f2, dual_numbers, f4, f2xf2, m2, ut2):
        assert validate_algebra(A).ok, A


def test_wrong_unit_is_reported(F2):
    constants = np.zeros((2, 2, 2), dtype=np.int64)
    constants[0, 0, 0] = 1
    constants[0, 1, 1] = 1
    constants[1, 0, 1] = 1
    constants[1, 1, 1] = 1
    report = validate_algebra(StructureAlgebra(F2, constants, [0, 1]))
    assert not report.ok
    assert any('unit law' in v for v in report.violations)


def test_associativity_violation(F2):
    # b_0 is the unit; (b_1 b_1) b_1 = b_2 b_1 = b_1 but b_1 (b_1 b_1) = b_1 b_2 = 0
    constants = np.zeros((3, 3, 3), dtype=np.int64)
    for j in range(3):
        constants[0, j, j] = 1
        constants[j, 0, j] = 1
    constants[1, 1, 2] = 1
    constants[2, 1, 1] = 1
    report = validate_algebra(StructureAlgebra(F2, constants, [1, 0, 0]))
    assert not report.ok
    assert all(v.startswith('associativity') for v in report.violations)


def test_shape_errors(F2):
    with pytest.raises(InvalidAlgebra):
        StructureAlgebra(F2, np.zeros((2, 2, 3), dtype=np.int64), [1, 0])
    with pytest.raises(InvalidAlgebra):
        StructureAlgebra(F2, np.zeros((0, 0, 0), dtype=np.int64), [])
    with pytest.raises(InvalidAlgebra):
        StructureAlgebra(F2, np.zeros((1, 1, 1), dtype=np.int64), [1], basis_names=('a', 'b'))


def test_matrix_algebra_multiplication(m2):
    E11, E12, E21, E22 = m2.basis()
    assert E12 * E21 == E11
    assert (E21 * E21).is_zero
    assert (E11 + E22).is_one()


def test_elements_of_different_algebras_do_not_mix(m2, ut2):
    with pytest.raises(AlgebraMismatch):
        m2.one() + ut2.one()


def test_multiplication_matrices(ut2):
    x = ut2.element([1, 1, 0])
    y = ut2.element([1, 1, 1])
    product = x * y
    assert (left_mul_matrix(x).data @ y.coeffs % 2).tolist() == product.tolist()
    assert (x.coeffs @ right_mul_matrix(y).data % 2).tolist() == product.tolist()


@pytest.mark.parametrize('name, count', [
    ('dual_numbers', 2), ('f2xf2', 4), ('m2', 8), ('ut2', 6), ('f4', 2),
])
def test_idempotent_counts(request, name, count):
    A = request.getfixturevalue(name)
    idempotents = list(iter_idempotents(A))
    assert len(idempotents) == count
    assert all(e.is_idempotent() for e in idempotents)


def test_check_idempotent_set(m2):
    E11, E12, E21, E22 = m2.basis()
    assert check_idempotent_set(m2, [E11, E22]).all
    flags = check_idempotent_set(m2, [E11])
    assert flags.each_idempotent and flags.pairwise_orthogonal and not flags.complete
    flags = check_idempotent_set(m2, [E11, E11 + E12])
    assert not flags.pairwise_orthogonal


def test_corner_algebra(m2):
    E11 = m2.basis_element(0)
    corner = corner_algebra(m2, E11)
    assert corner.algebra.dim == 1
    assert validate_algebra(corner.algebra).ok
    assert corner.embed_element(corner.algebra.one()) == E11
    assert corner.project_element(E11) == corner.algebra.one()

    full = corner_algebra(m2, m2.one())
    assert full.algebra.dim == 4


def test_corner_rejects_non_idempotents(m2):
    with pytest.raises(NotIdempotent):
        corner_algebra(m2, m2.basis_element(1))
    with pytest.raises(ZeroIdempotent):
        corner_algebra(m2, m2.zero())


def test_algebra_equality_ignores_names(F2):
    constants = np.ones((1, 1, 1), dtype=np.int64)
    A = StructureAlgebra(F2, constants, [1], basis_names=('one',))
    B = StructureAlgebra(F2, constants, [1])
    assert A == B
    assert hash(A) == hash(B)
    assert StructureAlgebra(PrimeField(3), constants, [1]) != A


@pytest.mark.parametrize('name', ['m2', 'ut2', 'f2xf2', 'dual_numbers', 'f4'])
def test_left_multiplication_is_multiplicative(request, name):
    A = request.getfixturevalue(name)
    rng = np.random.default_rng(3)
    for _ in range(20):
        x, y = A.random_element(rng), A.random_element(rng)
        assert left_mul_matrix(x * y) == left_mul_matrix(x) @ left_mul_matrix(y)


@pytest.mark.parametrize('name', ['m2', 'ut2', 'f2xf2'])
def test_corner_embedding_is_multiplicative(request, name):
    A = request.getfixturevalue(name)
    rng = np.random.default_rng(5)
    for e in iter_idempotents(A):
        if e.is_zero:
            continue
        corner = corner_algebra(A, e)
        C = corner.algebra
        assert corner.embed_element(C.one()) == e
        for _ in range(10):
            x, y = C.random_element(rng), C.random_element(rng)
            assert corner.embed_element(x * y) == corner.embed_element(x) * corner.embed_element(y)
