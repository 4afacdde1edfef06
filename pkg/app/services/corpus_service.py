"""Corpus service: the fixed corpus of algebras and modules, and random modules."""
import logging
import os
from typing import Iterable

import numpy as np

from app.config import setting
from app.models.algebra import (
    AlgebraElement, StructureAlgebra, left_mul_matrix, matrix_algebra, polynomial_quotient,
    product_algebra, upper_triangular_algebra
)
from app.models.field import Polynomial, PrimeField
from app.models.matrix import MatrixFp, is_invertible
from app.models.module import RightModule, regular_module
from app.services.document_service import DocumentService
from app.services.module_service import ModuleService

logger = logging.getLogger(__name__)


def builtin_algebras() -> dict[str, StructureAlgebra]:
    """The corpus algebras, built in code; keys match the documents in corpus-db/algebras."""
    F2, F3 = PrimeField(2), PrimeField(3)
    return {
        'f2': polynomial_quotient(F2, Polynomial(F2, (0, 1))),
        'f3': polynomial_quotient(F3, Polynomial(F3, (0, 1))),
        'f2-dual-numbers': polynomial_quotient(F2, Polynomial(F2, (0, 0, 1))),
        'f2-x-f2': product_algebra(F2, 2),
        'f4': polynomial_quotient(F2, Polynomial(F2, (1, 1, 1))),
        'm2-f2': matrix_algebra(F2, 2),
        'ut2-f2': upper_triangular_algebra(F2, 2),
        'ut2-f3': upper_triangular_algebra(F3, 2),
    }


def random_family(p: int) -> dict[str, StructureAlgebra]:
    """Small algebras over F_p used for random modules."""
    F = PrimeField(p)
    return {
        f'f{p}': polynomial_quotient(F, Polynomial(F, (0, 1))),
        f'f{p}-dual-numbers': polynomial_quotient(F, Polynomial(F, (0, 0, 1))),
        f'f{p}-x-f{p}': product_algebra(F, 2),
        f'ut2-f{p}': upper_triangular_algebra(F, 2),
        f'm2-f{p}': matrix_algebra(F, 2),
    }


class CorpusService:
    """
    Service for the module corpus.

    The fixed corpus is read from ``<CORPUS_DIR>/algebras`` and
    ``<CORPUS_DIR>/modules``; when the database is missing the built-in
    algebras and their regular modules stand in.
    """

    def __init__(self, documents: DocumentService = None, module_service: ModuleService = None):
        self.documents = documents or DocumentService()
        self.modules = module_service or ModuleService()

    def _listing(self, folder: str) -> list[str]:
        directory = os.path.join(self.documents.corpus_dir, folder)
        if not os.path.isdir(directory):
            return []
        return sorted(os.path.join(directory, name) for name in os.listdir(directory) if name.endswith('.json'))

    def algebras(self) -> dict[str, StructureAlgebra]:
        paths = self._listing('algebras')
        if not paths:
            logger.debug("No algebra documents under %s, using built-in algebras", self.documents.corpus_dir)
            return builtin_algebras()
        return {os.path.splitext(os.path.basename(path))[0]: self.documents.load_algebra(path)
                for path in paths}

    def fixed_corpus(self) -> list[RightModule]:
        """Regular modules of the corpus algebras, then the module documents."""
        corpus = [regular_module(A) for A in self.algebras().values()]
        corpus.extend(self.documents.load_module(path) for path in self._listing('modules'))
        return corpus

    # Random modules

    def random_unit(self, A: StructureAlgebra, rng: np.random.Generator) -> AlgebraElement:
        while True:
            x = A.random_element(rng)
            if is_invertible(left_mul_matrix(x)):
                return x

    def random_invertible(self, field: PrimeField, n: int, rng: np.random.Generator) -> MatrixFp:
        while True:
            g = MatrixFp(field, rng.integers(0, field.p, (n, n)))
            if is_invertible(g):
                return g

    def cyclic_module(self, A: StructureAlgebra, v: AlgebraElement) -> RightModule:
        """vA as a submodule of the regular module."""
        R = regular_module(A, validate=False)
        stack_v = np.broadcast_to(v.coeffs, (A.dim, A.dim))
        rows = A.multiply_many(stack_v, np.eye(A.dim, dtype=np.int64))
        S, _ = self.modules.submodule(R, rows)
        return S

    def random_module(self, A: StructureAlgebra, rng: np.random.Generator, max_dim: int = 8,
                      parts: int = 3) -> RightModule:
        """
        A direct sum of up to ``parts`` nonzero cyclic modules vA, dimension at
        most ``max_dim``, in a random basis.
        """
        summands = []
        total = 0
        for _ in range(parts):
            v = A.random_element(rng)
            if v.is_zero:
                continue
            S = self.cyclic_module(A, v)
            if total + S.dim > max_dim:
                continue
            summands.append(S)
            total += S.dim
        if not summands:
            summands.append(self.cyclic_module(A, A.one()))
        M, _, _ = self.modules.direct_sum(summands)
        C, _ = self.modules.conjugate_module(M, self.random_invertible(A.field, M.dim, rng))
        return RightModule(C.algebra, C.action, label='random')

    def random_corpus(self, count: int, seed=None, primes: Iterable[int] = (2, 3, 5),
                      max_dim: int = 8) -> list[RightModule]:
        """``count`` random modules cycling through algebras over the given primes."""
        rng = np.random.default_rng(setting('KRS_SEED', 0) if seed is None else seed)
        algebras = [A for p in primes for A in random_family(p).values()]
        return [self.random_module(algebras[k % len(algebras)], rng, max_dim) for k in range(count)]
