import json
import os

import pytest

from app import create_app
from app.models.algebra import (
    matrix_algebra, polynomial_quotient, product_algebra, upper_triangular_algebra
)
from app.models.field import Polynomial, PrimeField
from app.models.module import RightModule, regular_module
from app.services.document_service import DocumentService, dumps
from app.services.idempotent_service import IdempotentService
from app.services.krs_service import KrsService
from app.services.module_service import ModuleService

CORPUS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'corpus-db')


@pytest.fixture
def app():
    app = create_app('testing')
    app.config['CORPUS_DIR'] = CORPUS_DIR
    return app


@pytest.fixture
def runner(app):
    return app.test_cli_runner()


@pytest.fixture
def documents():
    return DocumentService(CORPUS_DIR)


@pytest.fixture
def corpus_path():
    def path(*parts):
        return os.path.join(CORPUS_DIR, *parts)
    return path


@pytest.fixture
def write_doc(tmp_path):
    """Write a document into the test directory and return its path."""
    def write(name, doc):
        target = tmp_path / name
        target.write_text(doc if isinstance(doc, str) else dumps(doc), encoding='utf-8')
        return str(target)
    return write


@pytest.fixture
def roundtrip():
    """A document as it reads back from disk."""
    return lambda doc: json.loads(dumps(doc))


# Algebras

@pytest.fixture
def F2():
    return PrimeField(2)


@pytest.fixture
def f2(F2):
    return polynomial_quotient(F2, Polynomial(F2, (0, 1)))


@pytest.fixture
def dual_numbers(F2):
    return polynomial_quotient(F2, Polynomial(F2, (0, 0, 1)))


@pytest.fixture
def f4(F2):
    return polynomial_quotient(F2, Polynomial(F2, (1, 1, 1)))


@pytest.fixture
def f2xf2(F2):
    return product_algebra(F2, 2)


@pytest.fixture
def m2(F2):
    return matrix_algebra(F2, 2)


@pytest.fixture
def ut2(F2):
    return upper_triangular_algebra(F2, 2)


# Modules

@pytest.fixture
def ut2_regular(ut2):
    return regular_module(ut2)


@pytest.fixture
def ut2_semisimple(ut2, F2):
    action = [
        [[1, 0], [0, 0]],
        [[0, 0], [0, 0]],
        [[0, 0], [0, 1]],
    ]
    return RightModule(ut2, F2.array(action), label='S1 + S2')


@pytest.fixture
def f2_plane(f2, F2):
    return RightModule(f2, F2.array([[[1, 0], [0, 1]]]))


# Services

@pytest.fixture
def module_service():
    return ModuleService(seed=0)


@pytest.fixture
def idempotent_service(module_service):
    return IdempotentService(module_service, seed=0, budget=65536, trials=16)


@pytest.fixture
def krs(module_service, idempotent_service):
    return KrsService(module_service, idempotent_service, seed=0, budget=65536)
