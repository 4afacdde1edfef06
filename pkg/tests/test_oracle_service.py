import numpy as np
import pytest

from app.errors import BudgetExceeded
from app.models.algebra import corner_algebra
from app.models.certificate import LocalityMethod
from app.models.module import regular_module
from app.services.corpus_service import CorpusService, random_family
from app.services.oracle_service import OracleService


@pytest.fixture
def oracle(module_service):
    return OracleService(module_service, budget=65536)


def test_enumerate_idempotents(oracle, m2, f2xf2):
    assert len(oracle.enumerate_idempotents(m2)) == 8
    assert [e.tolist() for e in oracle.enumerate_idempotents(f2xf2)] == [[0, 0], [1, 0], [0, 1], [1, 1]]


def test_enumeration_respects_the_budget(oracle, m2):
    with pytest.raises(BudgetExceeded) as info:
        oracle.enumerate_idempotents(m2, budget=15)
    assert info.value.exit_code == 4


def test_oracle_primitivity(oracle, m2, ut2):
    assert oracle.oracle_is_primitive(m2, m2.element([1, 0, 0, 0]))
    assert oracle.oracle_is_primitive(m2, m2.element([1, 1, 0, 0]))
    assert not oracle.oracle_is_primitive(m2, m2.one())
    assert not oracle.oracle_is_primitive(ut2, ut2.one())


def test_oracle_decompose(oracle, ut2_regular, ut2_semisimple, f4):
    D = oracle.oracle_decompose(ut2_regular)
    assert sorted(D.dims) == [1, 2]
    assert D.validate().ok
    assert all(v.method is LocalityMethod.EXHAUSTIVE and v.is_local for v in D.locality)

    assert oracle.oracle_decompose(ut2_semisimple).dims == [1, 1]
    assert oracle.oracle_decompose(regular_module(f4)).length == 1


def test_oracle_agrees_with_engine(oracle, krs, m2, ut2, f2xf2, dual_numbers):
    for A in (m2, ut2, f2xf2, dual_numbers):
        R = regular_module(A)
        assert sorted(oracle.oracle_decompose(R).dims) == sorted(krs.krs_decompose(R).dims)


def test_lemma3_on_product_algebra(oracle, f2xf2):
    report = oracle.lemma3_check(f2xf2)
    assert report.idempotent_count == 4
    assert report.ok
    entries = {tuple(entry.idempotent.tolist()): entry for entry in report.entries}
    assert set(entries) == {(1, 0), (0, 1), (1, 1)}
    first = entries[(1, 0)]
    assert first.primitive and first.corner_trivial and first.indecomposable
    whole = entries[(1, 1)]
    assert not (whole.primitive or whole.corner_trivial or whole.indecomposable)


@pytest.mark.parametrize('name', ['m2', 'ut2', 'dual_numbers', 'f4'])
def test_lemma3_predicates_agree(request, oracle, name):
    report = oracle.lemma3_check(request.getfixturevalue(name))
    assert report.ok
    assert report.to_dict()['ok'] is True
    assert len(report.entries) == report.idempotent_count - 1


def test_oracle_decompositions_are_equivalent_to_the_engine(oracle, krs):
    corpus = CorpusService(module_service=krs.modules)
    rng = np.random.default_rng(12)
    compared = 0
    for p, max_dim in ((2, 4), (3, 2)):
        for A in random_family(p).values():
            M = corpus.random_module(A, rng, max_dim=max_dim)
            E = krs.modules.end_algebra(M).algebra
            if E.p ** E.dim > oracle.budget:
                continue
            engine_D, oracle_D = krs.krs_decompose(M), oracle.oracle_decompose(M)
            assert oracle_D.validate().ok
            assert krs.check_equivalence(engine_D, oracle_D).violations(engine_D, oracle_D) == []
            compared += 1
    assert compared >= 8


@pytest.mark.parametrize('name', ['m2', 'ut2', 'f2xf2', 'dual_numbers', 'f4'])
def test_engine_predicates_agree_with_enumeration(request, oracle, krs, idempotent_service, module_service,
                                                  name):
    A = request.getfixturevalue(name)
    idempotents = oracle.enumerate_idempotents(A)
    assert idempotent_service.is_local(A).is_local == (len(idempotents) == 2)
    for e in idempotents:
        if e.is_zero:
            continue
        primitive = idempotent_service.is_primitive(A, e).primitive
        assert primitive == oracle.oracle_is_primitive(A, e)
        corner_local = idempotent_service.is_local(corner_algebra(A, e).algebra).is_local
        P, _ = module_service.right_ideal(A, e)
        assert primitive == corner_local == (krs.krs_decompose(P).length == 1)


def test_locality_of_endomorphism_algebras(oracle, idempotent_service, module_service,
                                           ut2_regular, ut2_semisimple, f2_plane):
    for M in (ut2_regular, ut2_semisimple, f2_plane):
        E = module_service.end_algebra(M).algebra
        verdict = idempotent_service.is_local(E, trusted=True)
        assert verdict.is_local == (len(oracle.enumerate_idempotents(E)) == 2)
