import numpy as np
import pytest

from app.models.algebra import left_mul_matrix
from app.models.matrix import is_invertible
from app.models.module import validate_module
from app.services.corpus_service import CorpusService, builtin_algebras, random_family
from app.services.document_service import DocumentService


@pytest.fixture
def corpus(documents, module_service):
    return CorpusService(documents, module_service)


def test_fixed_corpus(corpus):
    modules = corpus.fixed_corpus()
    assert len(modules) == len(builtin_algebras()) + 4
    assert all(validate_module(M).ok for M in modules)
    assert [M.dim for M in modules[:len(builtin_algebras())]] == \
        [A.dim for A in corpus.algebras().values()]


def test_algebras_are_read_from_the_database(corpus):
    assert set(corpus.algebras()) == set(builtin_algebras())


def test_builtin_fallback(tmp_path, module_service):
    corpus = CorpusService(DocumentService(str(tmp_path)), module_service)
    modules = corpus.fixed_corpus()
    assert len(modules) == len(builtin_algebras())
    assert all(M.label == 'regular' for M in modules)


def test_random_family():
    family = random_family(3)
    assert set(family) == {'f3', 'f3-dual-numbers', 'f3-x-f3', 'ut2-f3', 'm2-f3'}
    assert all(A.p == 3 for A in family.values())


def test_random_corpus(corpus):
    modules = corpus.random_corpus(15, seed=11)
    assert len(modules) == 15
    for M in modules:
        assert validate_module(M).ok
        assert 0 < M.dim <= 8
        assert M.label == 'random'
    assert {M.p for M in modules} == {2, 3, 5}


def test_random_corpus_is_deterministic(corpus):
    assert corpus.random_corpus(5, seed=2) == corpus.random_corpus(5, seed=2)


def test_random_module_respects_max_dim(corpus, m2):
    rng = np.random.default_rng(0)
    for _ in range(5):
        M = corpus.random_module(m2, rng, max_dim=4)
        assert M.dim <= 4
        assert validate_module(M).ok


def test_cyclic_module(corpus, ut2):
    assert corpus.cyclic_module(ut2, ut2.one()).dim == 3
    # E22 A is spanned by E22
    assert corpus.cyclic_module(ut2, ut2.element([0, 0, 1])).dim == 1


def test_random_units_are_invertible(corpus, m2):
    rng = np.random.default_rng(4)
    x = corpus.random_unit(m2, rng)
    assert is_invertible(left_mul_matrix(x))
