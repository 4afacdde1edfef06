import numpy as np
import pytest

from app.errors import (
    AlgebraMismatch, InvalidDecomposition, MatchingFailed, NotCompleteOrthogonalPrimitive, NotIdempotent
)
from app.models.algebra import check_idempotent_set, left_mul_matrix
from app.models.matrix import MatrixFp, solve_linear
from app.models.module import ModuleMorphism, RightModule, regular_module
from app.services.corpus_service import CorpusService
from app.services.krs_service import KrsService, child_seed, root_seed
from app.services.oracle_service import OracleService


@pytest.mark.parametrize('name, dims', [
    ('f2', [1]),
    ('f4', [2]),
    ('dual_numbers', [2]),
    ('f2xf2', [1, 1]),
    ('ut2', [1, 2]),
    ('m2', [2, 2]),
])
def test_decompose_regular_modules(request, krs, name, dims):
    A = request.getfixturevalue(name)
    D = krs.krs_decompose(regular_module(A))
    assert sorted(D.dims) == dims
    assert D.validate().ok
    assert D.conclusive
    assert sum(D.dims) == A.dim


def test_decompose_zero_module(krs, f2):
    D = krs.krs_decompose(RightModule.zero(f2))
    assert D.length == 0
    assert D.validate().ok


def test_decompose_semisimple_module(krs, ut2_semisimple, f2_plane):
    assert krs.krs_decompose(ut2_semisimple).dims == [1, 1]
    assert krs.krs_decompose(f2_plane).dims == [1, 1]


def test_decomposition_is_deterministic(krs, m2):
    R = regular_module(m2)
    first = krs.krs_decompose(R, seed=5)
    second = KrsService(seed=5).krs_decompose(R)
    assert [i.matrix for i in first.injections] == [i.matrix for i in second.injections]
    assert first.seed == second.seed == 5


def test_seeds_follow_the_recursion():
    assert child_seed(7, ()) == 7
    assert child_seed(7, (0, 1)) == [7, 0, 1]
    assert child_seed([7, 0], (1,)) == [7, 0, 1]
    assert root_seed([7, 0, 1]) == 7


def test_decompositions_are_equivalent(krs, m2, ut2):
    for A in (m2, ut2):
        R = regular_module(A)
        D1 = krs.krs_decompose(R, seed=1)
        D2 = krs.krs_decompose(R, seed=2)
        cert = krs.check_equivalence(D1, D2)
        assert cert.violations(D1, D2) == []
        assert sorted(cert.sigma) == list(range(D2.length))
        for j, iso in enumerate(cert.isos):
            assert iso.source.dim == D2.summands[cert.sigma[j]].dim


def test_equivalence_fails_on_different_summands(krs, ut2_regular, ut2_semisimple):
    with pytest.raises(MatchingFailed):
        krs.check_equivalence(krs.krs_decompose(ut2_regular), krs.krs_decompose(ut2_semisimple))


def test_equivalence_fails_on_different_lengths(krs, m2):
    R = regular_module(m2)
    with pytest.raises(MatchingFailed):
        krs.check_equivalence(krs.krs_decompose(R), krs.krs_decompose(RightModule.zero(m2)))


def test_idempotents_from_decomposition(krs, module_service, ut2_regular):
    D = krs.krs_decompose(ut2_regular)
    es = krs.idempotents_from_decomposition(D)
    end = module_service.end_algebra(ut2_regular)
    assert len(es) == D.length
    assert check_idempotent_set(end.algebra, es).all


def test_algebra_idempotents_are_primitive(krs, m2):
    es, D = krs.algebra_idempotents(m2)
    assert len(es) == 2 == D.length
    assert check_idempotent_set(m2, es).all
    oracle = OracleService()
    assert all(oracle.oracle_is_primitive(m2, e) for e in es)


def test_conjugator(krs, m2):
    E = [m2.element([1, 0, 0, 0]), m2.element([0, 0, 0, 1])]
    F = [m2.element([1, 1, 0, 0]), m2.element([0, 1, 0, 1])]
    cert = krs.conjugator(m2, E, F)
    assert cert.violations() == []
    assert (cert.a * cert.a_inv).is_one()
    for j, e in enumerate(E):
        assert cert.a * e * cert.a_inv == F[cert.sigma[j]]


def test_conjugator_on_commutative_algebra_is_a_permutation(krs, f2xf2):
    E = [f2xf2.element([1, 0]), f2xf2.element([0, 1])]
    cert = krs.conjugator(f2xf2, E, list(reversed(E)))
    assert cert.sigma == (1, 0)
    assert cert.a.is_one()


def test_conjugator_rejects_non_primitive_sets(krs, m2, f2xf2):
    with pytest.raises(NotCompleteOrthogonalPrimitive):
        krs.conjugator(m2, [m2.one()], [m2.element([1, 0, 0, 0]), m2.element([0, 0, 0, 1])])
    with pytest.raises(NotCompleteOrthogonalPrimitive):
        krs.conjugator(f2xf2, [f2xf2.element([1, 0])], [f2xf2.element([0, 1])])


def test_conjugator_on_upper_triangular_matrices(krs, ut2):
    E = [ut2.element([1, 0, 0]), ut2.element([0, 0, 1])]
    assert krs.conjugator(ut2, E, E).sigma == (0, 1)

    # E11 + E12 and E12 + E22 generate ideals isomorphic to E11 A and E22 A
    F = [ut2.element([1, 1, 0]), ut2.element([0, 1, 1])]
    cert = krs.conjugator(ut2, E, F)
    assert cert.sigma == (0, 1)
    assert cert.violations() == []

    with pytest.raises(NotCompleteOrthogonalPrimitive):
        krs.conjugator(ut2, E, [ut2.element([1, 0, 0])])


def test_cancel_complement(krs, idempotent_service, ut2_regular):
    D = krs.krs_decompose(ut2_regular)
    small = D.dims.index(1)
    X_prime, _ = idempotent_service.split_idempotent(ut2_regular, D.idempotent(small))
    cert = krs.cancel_complement(D, X_prime)
    assert [D.dims[j] for j in cert.indices] == [2]
    assert cert.iso.is_isomorphism and cert.iso.is_intertwining()
    assert cert.complement.length == 1


def test_cancel_complement_of_everything(krs, idempotent_service, ut2_regular):
    D = krs.krs_decompose(ut2_regular)
    X_prime, _ = idempotent_service.split_idempotent(ut2_regular, ut2_regular.identity())
    cert = krs.cancel_complement(D, X_prime)
    assert cert.indices == ()
    assert cert.complement.length == 0


def test_split_through_decomposition(krs, ut2_regular):
    D = krs.krs_decompose(ut2_regular)
    for j in range(D.length):
        datum = krs.split_through_decomposition(D, D.idempotent(j))
        assert datum.violations() == []
        assert datum.Y.dim == D.dims[j]

    whole = krs.split_through_decomposition(D, ut2_regular.identity())
    assert whole.Y.dim == ut2_regular.dim
    assert whole.violations() == []


def test_split_through_another_decomposition(krs, ut2_regular):
    D1 = krs.krs_decompose(ut2_regular, seed=1)
    D2 = krs.krs_decompose(ut2_regular, seed=4)
    for j in range(D2.length):
        datum = krs.split_through_decomposition(D1, D2.idempotent(j))
        assert datum.violations() == []
        assert datum.Y.dim == D2.dims[j]


def test_split_through_decomposition_rejects_non_idempotent(krs, ut2_regular, F2):
    D = krs.krs_decompose(ut2_regular)
    nilpotent = ModuleMorphism(ut2_regular, ut2_regular,
                               MatrixFp.from_rows(F2, [[0, 0, 0], [0, 0, 0], [0, 1, 0]]))
    with pytest.raises(NotIdempotent):
        krs.split_through_decomposition(D, nilpotent)


def test_semiperfect_decomposition(krs, ut2_regular, ut2_semisimple):
    for M in (ut2_regular, ut2_semisimple):
        semi = krs.semiperfect_decomposition(M)
        assert semi.validate().ok
        assert semi.length == krs.krs_decompose(M).length


def test_main_theorem_on_small_corpus(krs, ut2_regular, ut2_semisimple, f2_plane, f2, dual_numbers):
    corpus = [ut2_regular, ut2_semisimple, f2_plane, regular_module(dual_numbers), RightModule.zero(f2)]
    report = krs.verify_main_theorem(corpus)
    assert report.ok, [r.to_dict() for r in report.failures()]
    checks = {r.check for r in report.results}
    assert checks == {'krs-decomposition', 'split-idempotents', 'locality-indecomposability',
                      'idempotent-set-size', 'semi-perfect'}
    assert len(report.results) == 5 * len(corpus)


@pytest.mark.parametrize('name', ['m2', 'ut2', 'f2xf2'])
def test_conjugator_recovers_random_conjugates(request, krs, name):
    A = request.getfixturevalue(name)
    corpus = CorpusService(module_service=krs.modules)
    E, _ = krs.algebra_idempotents(A)
    rng = np.random.default_rng(9)
    for _ in range(20):
        u = corpus.random_unit(A, rng)
        u_inv = A.element(solve_linear(left_mul_matrix(u), A.unit))
        F = [u * e * u_inv for e in E]
        cert = krs.conjugator(A, E, F)
        assert cert.violations() == []
        for j, e in enumerate(E):
            assert cert.a * e * cert.a_inv == F[cert.sigma[j]]


def test_random_modules_decompose_uniquely(krs):
    corpus = CorpusService(module_service=krs.modules).random_corpus(15, seed=7)
    for M in corpus:
        D1, D2, D3 = (krs.krs_decompose(M, seed=s) for s in (1, 2, 3))
        assert sum(D1.dims) == M.dim
        for first, second in ((D1, D2), (D2, D3), (D1, D3)):
            assert krs.check_equivalence(first, second).violations(first, second) == []


def test_main_theorem_on_the_fixed_corpus(krs, documents):
    corpus = CorpusService(documents, krs.modules).fixed_corpus()
    report = krs.verify_main_theorem(corpus)
    assert report.ok, [r.to_dict() for r in report.failures()]
    assert len(report.results) == 5 * len(corpus)


def test_main_theorem_cross_checks_locality_by_enumeration(krs, monkeypatch, ut2_regular):
    assert krs.verify_main_theorem([ut2_regular]).ok

    # an enumeration that finds a third idempotent everywhere contradicts the local summands
    monkeypatch.setattr(krs.oracle, 'enumerate_idempotents',
                        lambda A, budget=None: [A.zero(), A.one(), A.zero()])
    report = krs.verify_main_theorem([ut2_regular])
    failed = {r.check: r.detail for r in report.failures()}
    assert set(failed) == {'locality-indecomposability'}
    assert 'exhaustive scan local=False length=1' in failed['locality-indecomposability']


def test_equivalence_across_an_isomorphism(krs, module_service, m2, F2):
    R = regular_module(m2)
    g = MatrixFp.from_rows(F2, [[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 1, 1]])
    C, phi = module_service.conjugate_module(R, g)
    D1, D2 = krs.krs_decompose(R, seed=1), krs.krs_decompose(C, seed=2)

    moved = krs.transport(D1, phi)
    assert moved.parent == C
    assert moved.validate().ok
    cert = krs.check_equivalence(D1, D2, parent_iso=phi)
    assert cert.violations(moved, D2) == []

    with pytest.raises(AlgebraMismatch):
        krs.check_equivalence(D2, D1, parent_iso=phi)
    with pytest.raises(InvalidDecomposition):
        krs.transport(D1, ModuleMorphism.zero(R, C))
