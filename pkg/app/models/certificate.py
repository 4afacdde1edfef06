"""Verdicts, decompositions and the certificates that witness them."""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from app.models.algebra import AlgebraElement, StructureAlgebra, ValidationReport
from app.models.matrix import MatrixFp
from app.models.module import ModuleMorphism, RightModule


class Verdict(Enum):
    """Outcome of a locality test."""
    LOCAL = "Local"
    NOT_LOCAL = "NotLocal"


class LocalityMethod(Enum):
    """How a locality verdict was reached."""
    EXHAUSTIVE = "Exhaustive"     # every element scanned, or a verified witness
    MONTE_CARLO = "MonteCarlo"    # seeded random search, bounded failure probability


@dataclass(frozen=True)
class SplitDatum:
    """An idempotent e on X factored as e = s r with r s = id_Y."""
    e: ModuleMorphism
    Y: RightModule
    r: ModuleMorphism             # X -> Y, surjective
    s: ModuleMorphism             # Y -> X, injective

    def violations(self) -> list[str]:
        issues = []
        if self.s @ self.r != self.e:
            issues.append("s r != e")
        if not (self.r @ self.s).is_identity():
            issues.append("r s != id_Y")
        if not self.r.is_surjective:
            issues.append("r is not surjective")
        if not self.s.is_injective:
            issues.append("s is not injective")
        return issues


@dataclass(frozen=True)
class LocalityVerdict:
    """
    Whether an algebra is local.

    NotLocal verdicts carry a nontrivial idempotent and are always correct.
    Local verdicts are conclusive only with the exhaustive method.
    """
    algebra: StructureAlgebra
    verdict: Verdict
    method: LocalityMethod
    witness: Optional[AlgebraElement] = None
    scanned: int = 0                        # elements examined
    trials: Optional[int] = None
    failure_bound: Optional[float] = None

    @property
    def is_local(self) -> bool:
        return self.verdict is Verdict.LOCAL

    @property
    def conclusive(self) -> bool:
        return self.verdict is Verdict.NOT_LOCAL or self.method is LocalityMethod.EXHAUSTIVE

    def violations(self) -> list[str]:
        if self.verdict is Verdict.LOCAL:
            return [] if self.witness is None else ["Local verdict carries a witness"]
        w = self.witness
        if w is None:
            return ["NotLocal verdict without witness"]
        issues = []
        if w * w != w:
            issues.append("witness is not idempotent")
        if w.is_zero or w.is_one():
            issues.append("witness is a trivial idempotent")
        return issues


@dataclass(frozen=True)
class PrimitivityVerdict:
    """
    Primitivity of an idempotent e, decided through its corner eAe.

    When not primitive, f and g are nonzero orthogonal idempotents with e = f + g.
    """
    idempotent: AlgebraElement
    primitive: bool
    corner: LocalityVerdict
    f: Optional[AlgebraElement] = None
    g: Optional[AlgebraElement] = None

    @property
    def conclusive(self) -> bool:
        return self.corner.conclusive

    def violations(self) -> list[str]:
        if self.primitive:
            return []
        f, g, e = self.f, self.g, self.idempotent
        if f is None or g is None:
            return ["missing witness pair"]
        issues = []
        if f * f != f or g * g != g:
            issues.append("witness pair is not idempotent")
        if not (f * g).is_zero or not (g * f).is_zero:
            issues.append("witness pair is not orthogonal")
        if f + g != e:
            issues.append("f + g != e")
        if f.is_zero or g.is_zero:
            issues.append("witness pair contains zero")
        return issues


@dataclass
class Decomposition:
    """
    X = X_1 + ... + X_n with injections i_j, projections p_j and one locality
    verdict per summand's endomorphism algebra.
    """
    parent: RightModule
    summands: list[RightModule] = field(default_factory=list)
    injections: list[ModuleMorphism] = field(default_factory=list)
    projections: list[ModuleMorphism] = field(default_factory=list)
    locality: list[LocalityVerdict] = field(default_factory=list)
    seed: int = 0

    @property
    def length(self) -> int:
        return len(self.summands)

    @property
    def dims(self) -> list[int]:
        return [s.dim for s in self.summands]

    @property
    def conclusive(self) -> bool:
        return all(v.conclusive for v in self.locality)

    def idempotent(self, j: int) -> ModuleMorphism:
        """The endomorphism i_j p_j of the parent."""
        return self.injections[j] @ self.projections[j]

    def validate(self) -> ValidationReport:
        report = ValidationReport(subject=f"decomposition of a module of dimension {self.parent.dim}")
        n = self.length
        if not (len(self.injections) == len(self.projections) == len(self.locality) == n):
            report.violations.append("summands, injections, projections and verdicts differ in number")
            return report
        if n == 0:
            if self.parent.dim != 0:
                report.violations.append("empty decomposition of a nonzero module")
            return report

        total = ModuleMorphism.zero(self.parent, self.parent)
        for j in range(n):
            i_j, p_j = self.injections[j], self.projections[j]
            if i_j.source != self.summands[j] or i_j.target != self.parent:
                report.violations.append(f"injection {j} has wrong endpoints")
                continue
            if p_j.source != self.parent or p_j.target != self.summands[j]:
                report.violations.append(f"projection {j} has wrong endpoints")
                continue
            if not i_j.is_intertwining() or not p_j.is_intertwining():
                report.violations.append(f"maps of summand {j} are not module maps")
            total = total + i_j @ p_j
            for l in range(n):
                composite = p_j @ self.injections[l]
                if j == l and not composite.is_identity():
                    report.violations.append(f"p_{j} i_{j} != id")
                elif j != l and not composite.is_zero:
                    report.violations.append(f"p_{j} i_{l} != 0")
            verdict = self.locality[j]
            if not verdict.is_local:
                report.violations.append(f"summand {j} has a non-local endomorphism algebra")
            report.violations.extend(f"summand {j}: {v}" for v in verdict.violations())
        if not total.is_identity():
            report.violations.append("sum of i_j p_j != id")
        return report


@dataclass(frozen=True)
class EquivalenceCertificate:
    """sigma[j] is the index of the second decomposition's summand matched to summand j."""
    sigma: tuple
    isos: tuple                      # ModuleMorphism X_j -> Y_sigma(j)

    def violations(self, first: Decomposition, second: Decomposition) -> list[str]:
        issues = []
        if sorted(self.sigma) != list(range(second.length)) or len(self.sigma) != first.length:
            return ["sigma is not a permutation of the summands"]
        for j, (target, iso) in enumerate(zip(self.sigma, self.isos)):
            if iso.source != first.summands[j] or iso.target != second.summands[target]:
                issues.append(f"iso {j} has wrong endpoints")
            elif not iso.is_intertwining():
                issues.append(f"iso {j} is not a module map")
            elif not iso.is_isomorphism:
                issues.append(f"iso {j} is not invertible")
        return issues


@dataclass(frozen=True)
class ConjugationCertificate:
    """a e_j a_inv = f_sigma(j) for every j, with a a_inv = a_inv a = 1."""
    algebra: StructureAlgebra
    sigma: tuple
    a: AlgebraElement
    a_inv: AlgebraElement
    source: tuple                    # e_1..e_n
    target: tuple                    # f_1..f_n

    def violations(self) -> list[str]:
        issues = []
        if sorted(self.sigma) != list(range(len(self.target))) or len(self.sigma) != len(self.source):
            return ["sigma is not a permutation"]
        if not (self.a * self.a_inv).is_one():
            issues.append("a a_inv != 1")
        if not (self.a_inv * self.a).is_one():
            issues.append("a_inv a != 1")
        for j, e in enumerate(self.source):
            if self.a * e * self.a_inv != self.target[self.sigma[j]]:
                issues.append(f"a e_{j} a_inv != f_{self.sigma[j]}")
        return issues


@dataclass(frozen=True)
class CancellationCertificate:
    """
    X = X_{j_1} + ... + X_{j_t} + X' witnessed by ``iso`` from the direct sum
    of the selected summands and X' onto X.
    """
    indices: tuple
    complement: Decomposition        # KRS decomposition of Ker(e)
    iso: ModuleMorphism


@dataclass
class PhiReport:
    """The map End(eA) -> eAe, h -> h(e), checked on bases."""
    end_dim: int
    corner_dim: int
    matrix: MatrixFp
    bijective: bool
    multiplicative: bool
    unital: bool

    @property
    def ok(self) -> bool:
        return self.bijective and self.multiplicative and self.unital

    def to_dict(self) -> dict:
        return {
            'end_dim': self.end_dim,
            'corner_dim': self.corner_dim,
            'matrix': self.matrix.tolist(),
            'bijective': self.bijective,
            'multiplicative': self.multiplicative,
            'unital': self.unital,
            'ok': self.ok,
        }


@dataclass
class DichotomyReport:
    """Sampled elements x for which neither x nor 1 - x is a unit."""
    samples: int
    failures: list[AlgebraElement] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            'samples': self.samples,
            'failures': [x.tolist() for x in self.failures],
            'ok': self.ok,
        }


@dataclass
class Lemma3Entry:
    """Three independent primitivity predicates for one nonzero idempotent."""
    idempotent: AlgebraElement
    primitive: bool               # no nontrivial orthogonal pair sums to e
    corner_trivial: bool          # eAe has only the idempotents 0 and e
    indecomposable: bool          # eA has a single summand

    @property
    def agree(self) -> bool:
        return self.primitive == self.corner_trivial == self.indecomposable

    def to_dict(self) -> dict:
        return {
            'idempotent': self.idempotent.tolist(),
            'primitive': self.primitive,
            'corner_trivial': self.corner_trivial,
            'indecomposable': self.indecomposable,
            'agree': self.agree,
        }


@dataclass
class Lemma3Report:
    idempotent_count: int
    entries: list[Lemma3Entry] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(entry.agree for entry in self.entries)

    def to_dict(self) -> dict:
        return {
            'idempotent_count': self.idempotent_count,
            'entries': [entry.to_dict() for entry in self.entries],
            'ok': self.ok,
        }


@dataclass
class CheckResult:
    module: int
    check: str
    passed: bool
    detail: str = ''

    def to_dict(self) -> dict:
        return {
            'module': self.module,
            'check': self.check,
            'passed': self.passed,
            'detail': self.detail,
        }


@dataclass
class MainTheoremReport:
    """Per-module results of the Krull-Schmidt checks, one entry per check."""
    results: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def record(self, module: int, check: str, passed: bool, detail: str = '') -> bool:
        self.results.append(CheckResult(module, check, bool(passed), detail))
        return bool(passed)

    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]

    def to_dict(self) -> dict:
        return {
            'ok': self.ok,
            'results': [r.to_dict() for r in self.results],
        }
