"""Certificate service: build certificate documents and re-verify them offline."""
import logging
from typing import Sequence

import numpy as np
from marshmallow import ValidationError

from app import __version__
from app.config import setting
from app.errors import AlgebraMismatch, DimensionMismatch, InconclusiveLocality, KrsError, VerificationFailed
from app.models.algebra import AlgebraElement, StructureAlgebra, check_idempotent_set, validate_algebra
from app.models.certificate import (
    ConjugationCertificate, Decomposition, EquivalenceCertificate, Lemma3Report,
    LocalityMethod, LocalityVerdict, MainTheoremReport, Verdict
)
from app.models.matrix import MatrixFp, matmul, rank_array
from app.models.module import EndomorphismAlgebra, ModuleMorphism, RightModule, validate_module
from app.schemas import (
    AlgebraSchema, CertificateSchema, DecompositionSchema, MatrixSchema,
    ModuleSchema, VerdictSchema
)
from app.services.document_service import flatten_messages
from app.services.krs_service import KrsService
from app.services.oracle_service import OracleService

logger = logging.getLogger(__name__)


class CertificateService:
    """
    Service for certificate documents.

    Every certificate is self-contained: it embeds the algebra or module it
    speaks about, so ``verify`` needs nothing but exact arithmetic. Input
    documents passed to ``verify`` must match the embedded subjects.
    """

    def __init__(self, krs_service: KrsService = None, oracle_service: OracleService = None,
                 budget: int = None):
        self.krs = krs_service or KrsService()
        self.modules = self.krs.modules
        self.idempotents = self.krs.idempotents
        self.oracle = oracle_service or OracleService(self.modules)
        self._budget = budget

    @property
    def budget(self) -> int:
        if self._budget is None:
            self._budget = setting('KRS_BUDGET', 65536)
        return self._budget

    def envelope(self, kind: str, payload: dict, seed=0, conclusive: bool = True) -> dict:
        return CertificateSchema().dump({
            'kind': kind,
            'engine_version': __version__,
            'seed': int(seed),
            'conclusive': bool(conclusive),
            'payload': payload,
        })

    # Builders

    def decomposition_certificate(self, D: Decomposition) -> dict:
        payload = {
            'module': ModuleSchema().dump(D.parent),
            'decomposition': DecompositionSchema().dump(D),
        }
        return self.envelope('decomposition', payload, D.seed, D.conclusive)

    def equivalence_certificate(self, D1: Decomposition, D2: Decomposition,
                                cert: EquivalenceCertificate, seed=0) -> dict:
        if D1.parent != D2.parent:
            raise AlgebraMismatch("Equivalence certificates need both decompositions of one module")
        payload = {
            'module': ModuleSchema().dump(D1.parent),
            'first': DecompositionSchema().dump(D1),
            'second': DecompositionSchema().dump(D2),
            'sigma': list(cert.sigma),
            'isos': [MatrixSchema().dump(iso.matrix.data) for iso in cert.isos],
        }
        return self.envelope('equivalence', payload, seed, D1.conclusive and D2.conclusive)

    def conjugation_certificate(self, cert: ConjugationCertificate, seed=0) -> dict:
        payload = {
            'algebra': AlgebraSchema().dump(cert.algebra),
            'source': [e.tolist() for e in cert.source],
            'target': [f.tolist() for f in cert.target],
            'sigma': list(cert.sigma),
            'a': cert.a.tolist(),
            'a_inv': cert.a_inv.tolist(),
        }
        return self.envelope('conjugation', payload, seed)

    def locality_certificate(self, verdict: LocalityVerdict, seed=0) -> dict:
        payload = {
            'algebra': AlgebraSchema().dump(verdict.algebra),
            'locality': VerdictSchema().dump(verdict),
        }
        return self.envelope('locality', payload, seed, verdict.conclusive)

    def lemma3_certificate(self, A: StructureAlgebra, report: Lemma3Report, budget: int) -> dict:
        payload = {
            'algebra': AlgebraSchema().dump(A),
            'budget': int(budget),
            'report': report.to_dict(),
        }
        return self.envelope('lemma3', payload)

    def main_theorem_certificate(self, corpus: Sequence[RightModule], report: MainTheoremReport,
                                 seed, budget: int) -> dict:
        payload = {
            'budget': int(budget),
            'modules': ModuleSchema(many=True).dump(list(corpus)),
            'report': report.to_dict(),
        }
        return self.envelope('main-theorem', payload, seed)

    def endomorphism_certificate(self, end: EndomorphismAlgebra, verdict: LocalityVerdict, seed=0) -> dict:
        payload = {
            'module': ModuleSchema().dump(end.module),
            'end_algebra': AlgebraSchema().dump(end.algebra),
            'basis': [MatrixSchema().dump(h.matrix.data) for h in end.basis],
            'locality': VerdictSchema().dump(verdict),
        }
        return self.envelope('endomorphism', payload, seed, verdict.conclusive)

    def idempotents_certificate(self, subject, elements: Sequence[AlgebraElement], seed=0) -> dict:
        """``subject`` is the algebra itself, or the EndomorphismAlgebra of a module."""
        if isinstance(subject, EndomorphismAlgebra):
            payload = {
                'module': ModuleSchema().dump(subject.module),
                'end_algebra': AlgebraSchema().dump(subject.algebra),
                'basis': [MatrixSchema().dump(h.matrix.data) for h in subject.basis],
            }
        else:
            payload = {'algebra': AlgebraSchema().dump(subject)}
        payload['idempotents'] = [e.tolist() for e in elements]
        return self.envelope('idempotents', payload, seed)

    # Loading

    def _field(self, payload: dict, key: str):
        if key not in payload:
            raise VerificationFailed(f"Certificate payload has no '{key}'", f"$.payload.{key}")
        return payload[key]

    def _load(self, schema, data, where: str):
        try:
            return schema.load(data)
        except ValidationError as e:
            lines = flatten_messages(e.messages)
            raise VerificationFailed(f"{where} is malformed", f"{where}: {lines[0] if lines else ''}")

    def _module(self, payload: dict) -> RightModule:
        M = self._load(ModuleSchema(), self._field(payload, 'module'), '$.payload.module')
        report = validate_algebra(M.algebra)
        report.violations.extend(validate_module(M).violations)
        if not report.ok:
            raise VerificationFailed("Embedded module violates the module laws", report.violations[0])
        return M

    def _algebra(self, payload: dict, key: str = 'algebra') -> StructureAlgebra:
        A = self._load(AlgebraSchema(), self._field(payload, key), f'$.payload.{key}')
        report = validate_algebra(A)
        if not report.ok:
            raise VerificationFailed("Embedded algebra violates the algebra laws", report.violations[0])
        return A

    def _element(self, A: StructureAlgebra, coeffs, where: str) -> AlgebraElement:
        if not isinstance(coeffs, list) or len(coeffs) != A.dim or \
                not all(isinstance(c, int) and not isinstance(c, bool) for c in coeffs):
            raise VerificationFailed(f"{where} is not an element of the algebra", where)
        return A.element(coeffs)

    def _morphism(self, source: RightModule, target: RightModule, data, where: str) -> ModuleMorphism:
        arr = self._load(MatrixSchema(), data, where)
        try:
            return ModuleMorphism(source, target, MatrixFp(source.field, arr))
        except DimensionMismatch as e:
            raise VerificationFailed(str(e), where)

    def _verdict(self, E: StructureAlgebra, data, where: str) -> LocalityVerdict:
        raw = self._load(VerdictSchema(), data, where)
        witness = None
        if raw['witness'] is not None:
            witness = self._element(E, raw['witness'], f"{where}.witness")
        return LocalityVerdict(
            algebra=E,
            verdict=Verdict(raw['verdict']),
            method=LocalityMethod(raw['method']),
            witness=witness,
            scanned=raw['scanned'],
            trials=raw['trials'],
            failure_bound=raw['failure_bound'],
        )

    def decomposition_from_certificate(self, doc: dict) -> Decomposition:
        """Verify a decomposition certificate and return the decomposition it carries."""
        self.verify(doc)
        return self._decomposition(doc['payload'])

    def _decomposition(self, payload: dict, key: str = 'decomposition', M: RightModule = None) -> Decomposition:
        M = M or self._module(payload)
        where = f"$.payload.{key}"
        raw = self._load(DecompositionSchema(context={'algebra': M.algebra}),
                         self._field(payload, key), where)
        n = len(raw['summands'])
        if not (len(raw['injections']) == len(raw['projections']) == len(raw['locality']) == n):
            raise VerificationFailed("Decomposition parts differ in number", where)
        injections, projections, locality = [], [], []
        for j, S in enumerate(raw['summands']):
            injections.append(self._morphism(S, M, raw['injections'][j], f"{where}.injections[{j}]"))
            projections.append(self._morphism(M, S, raw['projections'][j], f"{where}.projections[{j}]"))
            E = self.modules.end_algebra(S).algebra if S.dim else None
            if E is None:
                raise VerificationFailed("Zero summand in a decomposition", f"{where}.summands[{j}]")
            locality.append(self._verdict(E, raw['locality'][j], f"{where}.locality[{j}]"))
        if raw.get('dims') is not None and list(raw['dims']) != [S.dim for S in raw['summands']]:
            raise VerificationFailed("Recorded dimensions differ from the summands", f"{where}.dims")
        return Decomposition(M, list(raw['summands']), injections, projections, locality)

    # Verification

    def verify(self, doc, inputs: Sequence = ()) -> list[str]:
        """
        Re-check every equation of a certificate. Returns the names of the
        checked equations; raises VerificationFailed at the first failure.
        """
        if not isinstance(doc, dict):
            raise VerificationFailed("Certificate is not a JSON object", "$")
        envelope = self._load(CertificateSchema(), doc, '$')
        verifier = getattr(self, '_verify_' + envelope['kind'].replace('-', '_'))
        try:
            checked, subjects = verifier(envelope['payload'], envelope)
        except VerificationFailed:
            raise
        except KrsError as e:
            if e.exit_code != 1:
                raise
            raise VerificationFailed(f"Certificate does not re-verify: {e}", type(e).__name__)
        except (TypeError, IndexError, KeyError, ValueError) as e:
            raise VerificationFailed(f"Certificate payload is malformed: {e}", "$.payload")
        for k, item in enumerate(inputs):
            if not any(item == s for s in subjects):
                raise VerificationFailed(f"Input {k} is not the subject of this certificate", f"input[{k}]")
            checked.append(f"input {k} matches the certificate")
        logger.info("Verified %s certificate: %d checks", envelope['kind'], len(checked))
        return checked

    def _require(self, condition: bool, equation: str, checked: list, message: str = None):
        if not condition:
            raise VerificationFailed(message or f"Equation fails: {equation}", equation)
        checked.append(equation)

    def _recheck_locality(self, verdict: LocalityVerdict, label: str, checked: list):
        """A Local claim is rescanned whatever method produced it."""
        issues = verdict.violations()
        self._require(not issues, f"{label}: witness", checked, issues[0] if issues else None)
        if not verdict.is_local:
            return
        E = verdict.algebra
        if E.p ** E.dim > self.budget:
            raise InconclusiveLocality(
                f"{label}: Local verdict over {E.p}^{E.dim} elements exceeds the verification budget {self.budget}"
            )
        count = len(self.oracle.enumerate_idempotents(E, self.budget))
        self._require(count == 2, f"{label}: only idempotents are 0 and 1", checked)

    def _verify_decomposition(self, payload: dict, envelope: dict):
        checked = []
        D = self._decomposition(payload)
        report = D.validate()
        self._require(report.ok, "sum i_j p_j = id and p_j i_l = delta_jl", checked,
                      report.violations[0] if report.violations else None)
        for j, verdict in enumerate(D.locality):
            self._recheck_locality(verdict, f"summand {j} local", checked)
        self._require(envelope['conclusive'] == D.conclusive, "conclusive flag", checked)
        return checked, [D.parent]

    def _verify_equivalence(self, payload: dict, envelope: dict):
        checked = []
        M = self._module(payload)
        sides = []
        for key in ('first', 'second'):
            D = self._decomposition(payload, key, M)
            report = D.validate()
            self._require(report.ok, f"{key}: sum i_j p_j = id and p_j i_l = delta_jl", checked,
                          report.violations[0] if report.violations else None)
            for j, verdict in enumerate(D.locality):
                self._recheck_locality(verdict, f"{key} summand {j} local", checked)
            sides.append(D)
        first, second = sides

        sigma = self._field(payload, 'sigma')
        raw_isos = self._field(payload, 'isos')
        ok_sigma = isinstance(sigma, list) and \
            all(isinstance(s, int) and not isinstance(s, bool) and 0 <= s < second.length for s in sigma)
        self._require(ok_sigma and len(sigma) == len(raw_isos) == first.length,
                      "sigma indexes the summands", checked)
        isos = tuple(self._morphism(first.summands[j], second.summands[sigma[j]], raw, f"$.payload.isos[{j}]")
                     for j, raw in enumerate(raw_isos))
        cert = EquivalenceCertificate(tuple(sigma), isos)
        issues = cert.violations(first, second)
        self._require(not issues, "iso_j: X_j -> Y_sigma(j) invertible module maps", checked,
                      issues[0] if issues else None)
        self._require(envelope['conclusive'] == (first.conclusive and second.conclusive),
                      "conclusive flag", checked)
        return checked, [M]

    def _verify_conjugation(self, payload: dict, envelope: dict):
        checked = []
        A = self._algebra(payload)
        source = tuple(self._element(A, x, f"$.payload.source[{j}]")
                       for j, x in enumerate(self._field(payload, 'source')))
        target = tuple(self._element(A, x, f"$.payload.target[{j}]")
                       for j, x in enumerate(self._field(payload, 'target')))
        for name, S in (('source', source), ('target', target)):
            flags = check_idempotent_set(A, S)
            self._require(flags.all and len(S) > 0, f"{name} is a complete orthogonal idempotent set", checked)
        sigma = self._field(payload, 'sigma')
        self._require(isinstance(sigma, list) and all(isinstance(s, int) for s in sigma),
                      "sigma is a list of indices", checked)
        cert = ConjugationCertificate(
            A, tuple(sigma),
            self._element(A, self._field(payload, 'a'), '$.payload.a'),
            self._element(A, self._field(payload, 'a_inv'), '$.payload.a_inv'),
            source, target,
        )
        issues = cert.violations()
        self._require(not issues, "a a_inv = a_inv a = 1", checked, issues[0] if issues else None)
        checked.extend(f"a e_{j} a_inv = f_{s}" for j, s in enumerate(sigma))
        return checked, [A]

    def _verify_locality(self, payload: dict, envelope: dict):
        checked = []
        A = self._algebra(payload)
        verdict = self._verdict(A, self._field(payload, 'locality'), '$.payload.locality')
        self._recheck_locality(verdict, "algebra locality", checked)
        self._require(envelope['conclusive'] == verdict.conclusive, "conclusive flag", checked)
        return checked, [A]

    def _verify_lemma3(self, payload: dict, envelope: dict):
        checked = []
        A = self._algebra(payload)
        budget = self._field(payload, 'budget')
        self._require(isinstance(budget, int), "budget is an integer", checked)
        recorded = self._field(payload, 'report')
        recomputed = self.oracle.lemma3_check(A, budget).to_dict()
        self._require(recorded == recomputed, "recorded predicates equal a fresh scan", checked)
        self._require(recomputed['ok'], "primitive = corner trivial = indecomposable", checked)
        return checked, [A]

    def _verify_main_theorem(self, payload: dict, envelope: dict):
        checked = []
        budget = self._field(payload, 'budget')
        self._require(isinstance(budget, int), "budget is an integer", checked)
        modules = self._field(payload, 'modules')
        corpus = [self._module({'module': m}) for m in modules]
        recomputed = self.krs.verify_main_theorem(corpus, envelope['seed'], budget).to_dict()
        self._require(self._field(payload, 'report') == recomputed, "recorded checks equal a fresh run", checked)
        self._require(recomputed['ok'], "every check passes", checked)
        return checked, corpus

    def _end_from_payload(self, payload: dict, checked: list):
        M = self._module(payload)
        E = self._algebra(payload, 'end_algebra')
        basis = [self._morphism(M, M, raw, f"$.payload.basis[{a}]")
                 for a, raw in enumerate(self._field(payload, 'basis'))]
        d = len(basis)
        m = M.dim
        p = M.p
        self._require(E.p == p, "End(M) is over the field of M", checked)
        self._require(d == E.dim, "one basis morphism per algebra basis vector", checked)
        self._require(all(h.is_intertwining() for h in basis), "basis morphisms are module maps", checked)
        flat = np.stack([h.matrix.data.reshape(m * m) for h in basis]) if d else np.zeros((0, m * m))
        self._require(rank_array(flat, p) == d == self.modules.hom_dimension(M, M),
                      "basis spans End(M)", checked)
        # h_a after h_b has matrix B[b] @ B[a]
        B = flat.reshape(d, m, m)
        products = (np.matmul(B[None, :, :, :], B[:, None, :, :]) % p).reshape(d * d, m * m)
        expected = matmul(E.constants.reshape(d * d, d), flat, p)
        self._require(np.array_equal(products % p, expected), "h_a h_b = sum_k c[a,b,k] h_k", checked)
        unit = matmul(E.unit[None, :], flat, p)[0]
        self._require(np.array_equal(unit, np.eye(m, dtype=np.int64).reshape(m * m) % p),
                      "sum_k unit_k h_k = id", checked)
        return M, E

    def _verify_endomorphism(self, payload: dict, envelope: dict):
        checked = []
        M, E = self._end_from_payload(payload, checked)
        verdict = self._verdict(E, self._field(payload, 'locality'), '$.payload.locality')
        self._recheck_locality(verdict, "End(M) locality", checked)
        self._require(envelope['conclusive'] == verdict.conclusive, "conclusive flag", checked)
        return checked, [M]

    def _verify_idempotents(self, payload: dict, envelope: dict):
        checked = []
        if 'module' in payload:
            M, A = self._end_from_payload(payload, checked)
            subjects = [M]
        else:
            A = self._algebra(payload)
            subjects = [A]
        es = [self._element(A, x, f"$.payload.idempotents[{j}]")
              for j, x in enumerate(self._field(payload, 'idempotents'))]
        flags = check_idempotent_set(A, es)
        self._require(flags.each_idempotent, "e_j e_j = e_j", checked)
        self._require(flags.pairwise_orthogonal, "e_j e_l = 0 for j != l", checked)
        self._require(flags.complete, "sum e_j = 1", checked)
        for j, e in enumerate(es):
            self._require(not e.is_zero, f"e_{j} != 0", checked)
            verdict = self.idempotents.is_primitive(A, e, self.budget, envelope['seed'], trusted=True)
            if not verdict.conclusive:
                raise InconclusiveLocality(f"e_{j}: primitivity is beyond the verification budget {self.budget}")
            self._require(verdict.primitive, f"e_{j} primitive", checked)
        return checked, subjects
