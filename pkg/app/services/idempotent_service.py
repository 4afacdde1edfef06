"""Idempotent service: splitting, discovery, locality and primitivity."""
import logging
from itertools import product
from typing import Iterator, Optional

import numpy as np

from app.config import setting
from app.errors import AlgebraMismatch, InvalidAlgebra, NotIdempotent, ZeroIdempotent
from app.models.algebra import (
    AlgebraElement, StructureAlgebra, corner_algebra, iter_idempotents,
    left_mul_matrix, validate_algebra
)
from app.models.certificate import (
    DichotomyReport, LocalityMethod, LocalityVerdict, PrimitivityVerdict, SplitDatum, Verdict
)
from app.models.field import crt_split_polynomial, poly_factor
from app.models.matrix import MatrixFp, is_invertible, min_poly, poly_at_matrix
from app.models.module import ModuleMorphism, RightModule
from app.services.module_service import ModuleService

logger = logging.getLogger(__name__)


def nontrivial(w: AlgebraElement) -> bool:
    return not w.is_zero and not w.is_one() and w * w == w


def split_by_min_poly(x: AlgebraElement) -> Optional[AlgebraElement]:
    """
    A nontrivial idempotent polynomial in x, if the minimal polynomial of x
    has two coprime factors.

    The CRT projector for all factors but the first (in canonical order) is
    evaluated at x through the left multiplication matrix.
    """
    L = left_mul_matrix(x)
    m = min_poly(L)
    if m.degree < 1:
        return None
    factors = poly_factor(m)
    if len(factors) < 2:
        return None
    h = crt_split_polynomial(m, range(1, len(factors)), factors)
    H = poly_at_matrix(h, L)
    w = x.algebra.element(H.data @ x.algebra.unit % x.algebra.p)
    return w if nontrivial(w) else None


class IdempotentService:
    """
    Service for finding and splitting idempotents.

    The search is deterministic on basis elements and their pairwise
    products; random draws come from a numpy generator seeded per call.
    """

    def __init__(self, module_service: ModuleService = None, seed: int = None,
                 budget: int = None, trials: int = None):
        self.modules = module_service or ModuleService(seed=seed)
        self._seed = seed
        self._budget = budget
        self._trials = trials

    @property
    def seed(self):
        if self._seed is None:
            self._seed = setting('KRS_SEED', 0)
        return self._seed

    @property
    def budget(self) -> int:
        if self._budget is None:
            self._budget = setting('KRS_BUDGET', 65536)
        return self._budget

    @property
    def trials(self) -> int:
        if self._trials is None:
            self._trials = setting('KRS_TRIALS', 64)
        return self._trials

    def trials_for_budget(self, budget: int) -> int:
        """Random draws used by a Monte Carlo locality test under ``budget``."""
        return max(self.trials, 4 * int(budget).bit_length())

    # Splitting

    def split_idempotent(self, X: RightModule, e: ModuleMorphism) -> tuple[SplitDatum, SplitDatum]:
        """Split e and id - e through Ker(id - e) and Ker(e)."""
        if e.source != X or e.target != X:
            raise NotIdempotent("Idempotent must be an endomorphism of the module")
        if e @ e != e:
            raise NotIdempotent("Morphism is not idempotent")

        data = []
        for f in (e, X.identity() - e):
            Y, s = self.modules.kernel_module(X.identity() - f)
            # f has image Y, so its rows are read off at the pivot columns of s
            pivots = [int(np.nonzero(row)[0][0]) for row in s.matrix.data]
            r = ModuleMorphism(X, Y, MatrixFp(X.field, f.matrix.data[:, pivots]))
            data.append(SplitDatum(e=f, Y=Y, r=r, s=s))
        logger.debug("Split a %d-dimensional module into %d + %d",
                     X.dim, data[0].Y.dim, data[1].Y.dim)
        return data[0], data[1]

    # Discovery

    def _candidates(self, E: StructureAlgebra, seed, trials: int) -> Iterator[AlgebraElement]:
        basis = E.basis()
        yield from basis
        for a, b in product(basis, basis):
            yield a * b
        rng = np.random.default_rng(seed)
        for _ in range(trials):
            yield E.random_element(rng)

    def _check_algebra(self, E: StructureAlgebra):
        report = validate_algebra(E)
        if not report.ok:
            raise InvalidAlgebra('; '.join(report.violations[:5]))

    def find_nontrivial_idempotent(self, E: StructureAlgebra, seed=None, trials: int = None,
                                   trusted: bool = False) -> Optional[AlgebraElement]:
        """
        A nontrivial idempotent of E, or None once the deterministic sweep and
        ``trials`` random draws are exhausted.

        ``trusted`` skips validation for algebras built by the engine itself.
        """
        if not trusted:
            self._check_algebra(E)
        seed = self.seed if seed is None else seed
        trials = self.trials if trials is None else trials
        seen = set()
        for x in self._candidates(E, seed, trials):
            key = tuple(x.tolist())
            if key in seen or x.is_zero:
                continue
            seen.add(key)
            if nontrivial(x):
                return x
            w = split_by_min_poly(x)
            if w is not None:
                logger.debug("Idempotent %s found from candidate %s", w.tolist(), x.tolist())
                return w
        return None

    def is_local(self, E: StructureAlgebra, budget: int = None, seed=None,
                 trusted: bool = False) -> LocalityVerdict:
        """
        Decide locality by idempotents: a finite-dimensional algebra is local
        iff 0 and 1 are its only idempotents.

        Within budget the verdict is exhaustive; beyond it a Local verdict is
        Monte Carlo with failure bound (3/4)^trials.
        """
        if not trusted:
            self._check_algebra(E)
        budget = self.budget if budget is None else budget
        seed = self.seed if seed is None else seed
        exhaustive = E.p ** E.dim <= budget

        if exhaustive:
            witness = self.find_nontrivial_idempotent(E, seed, trials=0, trusted=True)
            if witness is None:
                scanned = 0
                for w in iter_idempotents(E):
                    scanned += 1
                    if not w.is_zero and not w.is_one():
                        witness = w
                        break
            if witness is not None:
                return LocalityVerdict(E, Verdict.NOT_LOCAL, LocalityMethod.EXHAUSTIVE, witness)
            return LocalityVerdict(E, Verdict.LOCAL, LocalityMethod.EXHAUSTIVE, scanned=E.p ** E.dim)

        trials = self.trials_for_budget(budget)
        witness = self.find_nontrivial_idempotent(E, seed, trials, trusted=True)
        if witness is not None:
            return LocalityVerdict(E, Verdict.NOT_LOCAL, LocalityMethod.MONTE_CARLO, witness,
                                   trials=trials)
        bound = 0.75 ** trials
        logger.warning("Local verdict for a %d-dimensional algebra over F_%d is Monte Carlo "
                       "(failure bound %.3g)", E.dim, E.p, bound)
        return LocalityVerdict(E, Verdict.LOCAL, LocalityMethod.MONTE_CARLO,
                               trials=trials, failure_bound=bound)

    def is_primitive(self, A: StructureAlgebra, e: AlgebraElement, budget: int = None,
                     seed=None, trusted: bool = False) -> PrimitivityVerdict:
        """Primitivity of e decided by the locality of its corner eAe."""
        if e.algebra != A:
            raise AlgebraMismatch("Idempotent belongs to another algebra")
        if e * e != e:
            raise NotIdempotent(f"{e.tolist()} is not idempotent")
        if e.is_zero:
            raise ZeroIdempotent("The zero idempotent is not primitive")

        corner = corner_algebra(A, e)
        verdict = self.is_local(corner.algebra, budget, seed, trusted=True)
        if verdict.is_local:
            return PrimitivityVerdict(e, True, verdict)
        f = corner.embed_element(verdict.witness)
        return PrimitivityVerdict(e, False, verdict, f=f, g=e - f)

    def local_dichotomy(self, E: StructureAlgebra, samples: int = None, seed=None) -> DichotomyReport:
        """Sampled x for which neither x nor 1 - x is invertible."""
        samples = self.trials if samples is None else samples
        rng = np.random.default_rng(self.seed if seed is None else seed)
        report = DichotomyReport(samples=samples)
        one = E.one()
        for _ in range(samples):
            x = E.random_element(rng)
            if not is_invertible(left_mul_matrix(x)) and not is_invertible(left_mul_matrix(one - x)):
                report.failures.append(x)
        return report
