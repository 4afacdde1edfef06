"""Brute-force oracle: exhaustive idempotent scans on small algebras and modules."""
import logging

from app.config import setting
from app.errors import AlgebraMismatch, BudgetExceeded, NotIdempotent
from app.models.algebra import AlgebraElement, StructureAlgebra, corner_algebra, iter_idempotents
from app.models.certificate import (
    Decomposition, Lemma3Entry, Lemma3Report, LocalityMethod, LocalityVerdict, Verdict
)
from app.models.module import RightModule, regular_module
from app.services.idempotent_service import IdempotentService
from app.services.module_service import ModuleService

logger = logging.getLogger(__name__)


class OracleService:
    """
    Ground truth by enumeration. Nothing here is random; every answer comes
    from scanning all p^dim elements of an algebra within the budget.
    """

    def __init__(self, module_service: ModuleService = None, budget: int = None):
        self.modules = module_service or ModuleService()
        self.splitter = IdempotentService(self.modules)
        self._budget = budget

    @property
    def budget(self) -> int:
        if self._budget is None:
            self._budget = setting('KRS_BUDGET', 65536)
        return self._budget

    def _require_budget(self, A: StructureAlgebra, budget: int):
        if A.p ** A.dim > budget:
            raise BudgetExceeded(
                f"Enumerating {A.p}^{A.dim} elements exceeds the budget of {budget}")

    def enumerate_idempotents(self, A: StructureAlgebra, budget: int = None) -> list[AlgebraElement]:
        """All idempotents of A in canonical order."""
        budget = self.budget if budget is None else budget
        self._require_budget(A, budget)
        found = list(iter_idempotents(A))
        logger.debug("Oracle found %d idempotents among %d elements", len(found), A.p ** A.dim)
        return found

    def oracle_is_primitive(self, A: StructureAlgebra, e: AlgebraElement, budget: int = None) -> bool:
        """
        True iff no pair of nonzero orthogonal idempotents sums to e.

        The zero idempotent passes the scan; callers that need e != 0 check it.
        """
        if e.algebra != A:
            raise AlgebraMismatch("Idempotent belongs to another algebra")
        if e * e != e:
            raise NotIdempotent(f"{e.tolist()} is not idempotent")
        for f in self.enumerate_idempotents(A, budget):
            g = e - f
            if f.is_zero or g.is_zero:
                continue
            if g * g == g and (f * g).is_zero and (g * f).is_zero:
                return False
        return True

    def oracle_decompose(self, M: RightModule, budget: int = None) -> Decomposition:
        """Split on any nontrivial idempotent of End(M) until none is left."""
        budget = self.budget if budget is None else budget
        parts = self._decompose(M, budget)
        return Decomposition(
            parent=M,
            summands=[S for S, _, _, _ in parts],
            injections=[i for _, i, _, _ in parts],
            projections=[p for _, _, p, _ in parts],
            locality=[v for _, _, _, v in parts],
        )

    def _decompose(self, X: RightModule, budget: int) -> list:
        if X.dim == 0:
            return []
        end = self.modules.end_algebra(X)
        E = end.algebra
        self._require_budget(E, budget)
        witness = next((w for w in iter_idempotents(E) if not w.is_zero and not w.is_one()), None)
        if witness is None:
            verdict = LocalityVerdict(E, Verdict.LOCAL, LocalityMethod.EXHAUSTIVE, scanned=E.p ** E.dim)
            return [(X, X.identity(), X.identity(), verdict)]

        parts = []
        for datum in self.splitter.split_idempotent(X, end.morphism(witness)):
            for S, i, p, v in self._decompose(datum.Y, budget):
                parts.append((S, datum.s @ i, p @ datum.r, v))
        return parts

    def lemma3_check(self, A: StructureAlgebra, budget: int = None) -> Lemma3Report:
        """
        For every nonzero idempotent e: primitivity, triviality of the corner
        eAe and indecomposability of eA, each by its own scan.
        """
        budget = self.budget if budget is None else budget
        idempotents = self.enumerate_idempotents(A, budget)
        R = regular_module(A)
        report = Lemma3Report(idempotent_count=len(idempotents))
        for e in idempotents:
            if e.is_zero:
                continue
            corner = corner_algebra(A, e)
            P, _ = self.modules.right_ideal(A, e, R)
            entry = Lemma3Entry(
                idempotent=e,
                primitive=self.oracle_is_primitive(A, e, budget),
                corner_trivial=len(self.enumerate_idempotents(corner.algebra, budget)) == 2,
                indecomposable=self.oracle_decompose(P, budget).length == 1,
            )
            if not entry.agree:
                logger.warning("Primitivity predicates disagree on %s", e.tolist())
            report.entries.append(entry)
        logger.info("Checked %d nonzero idempotents of a %d-dimensional algebra",
                    len(report.entries), A.dim)
        return report
