"""Krull-Remak-Schmidt service: decompositions, uniqueness, conjugacy and cancellation."""
import logging
from typing import Sequence

import numpy as np

from app.config import setting
from app.errors import (
    AlgebraMismatch, InvalidDecomposition, MatchingFailed, NoMatching,
    NotCompleteOrthogonalPrimitive, NotIdempotent, VerificationFailed
)
from app.models.algebra import (
    AlgebraElement, StructureAlgebra, check_idempotent_set, corner_algebra,
    iter_idempotents, left_mul_matrix
)
from app.models.certificate import (
    CancellationCertificate, ConjugationCertificate, Decomposition,
    EquivalenceCertificate, MainTheoremReport, SplitDatum
)
from app.models.matrix import MatrixFp, echelon_basis, inverse_array, invert, matmul
from app.models.module import ModuleMorphism, RightModule, regular_module
from app.services.idempotent_service import IdempotentService
from app.services.module_service import ModuleService
from app.services.oracle_service import OracleService

logger = logging.getLogger(__name__)


def child_seed(seed, path: tuple):
    """Seed for the node at ``path`` of a recursion rooted at ``seed``."""
    if not path:
        return seed
    prefix = list(seed) if isinstance(seed, (list, tuple)) else [int(seed)]
    return prefix + list(path)


def root_seed(seed) -> int:
    return int(seed[0]) if isinstance(seed, (list, tuple)) else int(seed)


class KrsService:
    """
    Service for Krull-Remak-Schmidt decompositions and the certificates built on them.

    Decompositions recurse on split idempotents of endomorphism algebras;
    every random choice is seeded from (seed, position in the recursion).
    """

    def __init__(self, module_service: ModuleService = None,
                 idempotent_service: IdempotentService = None,
                 seed: int = None, budget: int = None, oracle_service: OracleService = None):
        self.modules = module_service or ModuleService(seed=seed)
        self.idempotents = idempotent_service or IdempotentService(self.modules, seed=seed, budget=budget)
        self.oracle = oracle_service or OracleService(self.modules, budget=budget)
        self._seed = seed
        self._budget = budget
        self._sample_size = None

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
    def sample_size(self) -> int:
        if self._sample_size is None:
            self._sample_size = setting('KRS_IDEMPOTENT_SAMPLE', 16)
        return self._sample_size

    # Decomposition

    def krs_decompose(self, M: RightModule, seed=None, budget: int = None) -> Decomposition:
        """
        Decompose M into summands with local endomorphism algebras.

        Monte Carlo Local verdicts are kept in the result; check
        ``Decomposition.conclusive`` before treating it as certified.
        """
        seed = self.seed if seed is None else seed
        budget = self.budget if budget is None else budget
        parts = self._decompose(M, seed, budget, ())
        D = Decomposition(
            parent=M,
            summands=[S for S, _, _, _ in parts],
            injections=[i for _, i, _, _ in parts],
            projections=[p for _, _, p, _ in parts],
            locality=[v for _, _, _, v in parts],
            seed=root_seed(seed),
        )
        if not D.conclusive:
            logger.warning("Decomposition of a %d-dimensional module relies on Monte Carlo "
                           "locality verdicts", M.dim)
        logger.info("Decomposed a %d-dimensional module into summands of dimensions %s",
                    M.dim, D.dims)
        return D

    def _decompose(self, X: RightModule, seed, budget: int, path: tuple) -> list:
        if X.dim == 0:
            return []
        end = self.modules.end_algebra(X)
        verdict = self.idempotents.is_local(end.algebra, budget, child_seed(seed, path), trusted=True)
        if verdict.is_local:
            return [(X, X.identity(), X.identity(), verdict)]

        e = end.morphism(verdict.witness)
        parts = []
        for k, datum in enumerate(self.idempotents.split_idempotent(X, e)):
            for S, i, p, v in self._decompose(datum.Y, seed, budget, path + (k,)):
                parts.append((S, datum.s @ i, p @ datum.r, v))
        return parts

    # Uniqueness

    def _match(self, lefts: Sequence[RightModule], rights: Sequence[RightModule], seed,
               prefer=None) -> list[tuple[int, int, ModuleMorphism]]:
        """
        Greedy first-fit matching of each left module to an unused isomorphic
        right module. Isomorphism is an equivalence relation, so first-fit
        finds a matching whenever one exists.
        """
        used = set()
        matches = []
        for j, X in enumerate(lefts):
            order = [l for l in range(len(rights)) if l not in used and rights[l].dim == X.dim]
            if prefer is not None:
                order.sort(key=lambda l: (not prefer(j, l), l))
            for l in order:
                iso = self.modules.find_isomorphism(X, rights[l], child_seed(seed, (j, l)))
                if iso is not None:
                    used.add(l)
                    matches.append((j, l, iso))
                    logger.debug("Matched summand %d with summand %d", j, l)
                    break
            else:
                return matches
        return matches

    def check_equivalence(self, D1: Decomposition, D2: Decomposition, seed=None,
                          parent_iso: ModuleMorphism = None) -> EquivalenceCertificate:
        """
        Find sigma and isomorphisms X_j -> Y_sigma(j) between two decompositions.

        D1 and D2 decompose the same module, or ``parent_iso`` is an
        isomorphism from D1's parent onto D2's and D1 is carried along it
        before matching.
        """
        seed = self.seed if seed is None else seed
        if parent_iso is not None:
            if parent_iso.target != D2.parent:
                raise AlgebraMismatch("parent_iso does not end at the second decomposition's module")
            D1 = self.transport(D1, parent_iso)
        if D1.length != D2.length:
            raise MatchingFailed(f"Decompositions have {D1.length} and {D2.length} summands")
        matches = self._match(D1.summands, D2.summands, seed)
        if len(matches) != D1.length:
            raise MatchingFailed(f"Summand {len(matches)} has no isomorphic partner")
        cert = EquivalenceCertificate(
            sigma=tuple(l for _, l, _ in matches),
            isos=tuple(iso for _, _, iso in matches),
        )
        issues = cert.violations(D1, D2)
        if issues:
            raise VerificationFailed("Equivalence certificate does not verify", issues[0])
        return cert

    def transport(self, D: Decomposition, phi: ModuleMorphism) -> Decomposition:
        """D carried along phi: M -> M', with injections phi i_j and projections p_j phi^-1."""
        if phi.source != D.parent or not phi.is_intertwining() or not phi.is_isomorphism:
            raise InvalidDecomposition("Transport needs an isomorphism out of the decomposed module")
        phi_inv = ModuleMorphism(phi.target, phi.source, invert(phi.matrix))
        return Decomposition(
            parent=phi.target,
            summands=list(D.summands),
            injections=[phi @ i for i in D.injections],
            projections=[p @ phi_inv for p in D.projections],
            locality=list(D.locality),
            seed=D.seed,
        )

    # Idempotents

    def idempotents_from_decomposition(self, D: Decomposition, certify: bool = True,
                                       budget: int = None) -> list[AlgebraElement]:
        """The complete set e_j = i_j p_j, in coordinates of End(parent)."""
        if D.parent.dim == 0:
            return []
        report = D.validate()
        if not report.ok:
            raise InvalidDecomposition('; '.join(report.violations[:3]))
        end = self.modules.end_algebra(D.parent)
        es = [end.coordinates(D.idempotent(j)) for j in range(D.length)]
        if not check_idempotent_set(end.algebra, es).all:
            raise InvalidDecomposition("i_j p_j do not form a complete orthogonal set")
        if certify:
            for j, e in enumerate(es):
                verdict = self.idempotents.is_primitive(end.algebra, e, budget, child_seed(self.seed, (j,)),
                                                        trusted=True)
                if not verdict.primitive:
                    raise InvalidDecomposition(f"i_{j} p_{j} is not primitive")
        return es

    def algebra_idempotents(self, A: StructureAlgebra, seed=None, budget: int = None
                            ) -> tuple[list[AlgebraElement], Decomposition]:
        """Complete primitive orthogonal idempotents of A read off a decomposition of A_A."""
        R = regular_module(A)
        D = self.krs_decompose(R, seed, budget)
        one = A.unit[None, :]
        es = [A.element(matmul(one, D.idempotent(j).matrix.data, A.p)[0]) for j in range(D.length)]
        if not check_idempotent_set(A, es).all:
            raise InvalidDecomposition("Idempotents of the regular module do not sum to 1")
        return es, D

    def _require_primitive_set(self, A: StructureAlgebra, S: Sequence[AlgebraElement], name: str,
                               budget: int, seed):
        if not S or not check_idempotent_set(A, S).all:
            raise NotCompleteOrthogonalPrimitive(f"{name} is not a complete orthogonal idempotent set")
        for j, e in enumerate(S):
            if e.is_zero or not self.idempotents.is_primitive(A, e, budget, child_seed(seed, (j,)),
                                                              trusted=True).primitive:
                raise NotCompleteOrthogonalPrimitive(f"{name}[{j}] is not primitive")

    def conjugator(self, A: StructureAlgebra, E: Sequence[AlgebraElement], F: Sequence[AlgebraElement],
                   seed=None, budget: int = None, trusted: bool = False) -> ConjugationCertificate:
        """
        A unit a with a e_j a^-1 = f_sigma(j), built from isomorphisms of the
        right ideals e_j A and f_sigma(j) A.
        """
        seed = self.seed if seed is None else seed
        budget = self.budget if budget is None else budget
        if any(x.algebra != A for x in list(E) + list(F)):
            raise AlgebraMismatch("Idempotents belong to another algebra")
        self._require_primitive_set(A, E, 'E', budget, seed)
        self._require_primitive_set(A, F, 'F', budget, seed)
        if len(E) != len(F):
            raise NoMatching(f"Idempotent sets have sizes {len(E)} and {len(F)}")

        R = regular_module(A, validate=not trusted)
        ideals_e = [self.modules.right_ideal(A, e, R) for e in E]
        ideals_f = [self.modules.right_ideal(A, f, R) for f in F]

        def same_ideal(j, l):
            return ideals_e[j][1].matrix == ideals_f[l][1].matrix

        matches = self._match([P for P, _ in ideals_e], [Q for Q, _ in ideals_f], seed, prefer=same_ideal)
        if len(matches) != len(E):
            raise NoMatching("Right ideals cannot be matched up to isomorphism")

        p = A.p
        a = A.zero()
        a_inv = A.zero()
        sigma = []
        for j, l, phi in matches:
            incl_e, incl_f = ideals_e[j][1], ideals_f[l][1]
            e_local = E[j].coeffs[echelon_basis(incl_e.matrix.data, p)[1]]
            f_local = F[l].coeffs[echelon_basis(incl_f.matrix.data, p)[1]]
            phi_inv = inverse_array(phi.matrix.data, p)
            # x = phi(e_j) lies in f A e_j and y = phi^-1(f) in e_j A f, with x y = f and y x = e_j
            x = matmul(matmul(e_local[None, :], phi.matrix.data, p), incl_f.matrix.data, p)[0]
            y = matmul(matmul(f_local[None, :], phi_inv, p), incl_e.matrix.data, p)[0]
            a = a + A.element(x)
            a_inv = a_inv + A.element(y)
            sigma.append(l)

        cert = ConjugationCertificate(A, tuple(sigma), a, a_inv, tuple(E), tuple(F))
        issues = cert.violations()
        if issues:
            raise VerificationFailed("Conjugation certificate does not verify", issues[0])
        logger.info("Conjugated %d idempotents with sigma %s", len(E), cert.sigma)
        return cert

    # Cancellation and the constructive splitting

    def cancel_complement(self, D: Decomposition, X_prime: SplitDatum, seed=None,
                          budget: int = None) -> CancellationCertificate:
        """
        Select summands X_j of D with X = (sum of selected X_j) + X'.

        The complement Ker(e) of X' = Ker(1 - e) is decomposed and matched
        into D; the matched summands are the selection.
        """
        seed = self.seed if seed is None else seed
        X = D.parent
        if X_prime.e.source != X:
            raise InvalidDecomposition("Split datum is not on the decomposed module")
        _, complement = self.idempotents.split_idempotent(X, X_prime.e)
        C = self.krs_decompose(complement.Y, child_seed(seed, (0,)), budget)
        matches = self._match(C.summands, D.summands, child_seed(seed, (1,)))
        if len(matches) != C.length:
            raise MatchingFailed("Complement summand has no partner in the decomposition")

        matches.sort(key=lambda match: match[1])
        maps = []
        for k, j, psi in matches:
            # X_j -> C_k -> Ker(e) -> X, through the inverse of psi: C_k -> X_j
            psi_inv = ModuleMorphism(psi.target, psi.source, MatrixFp(X.field, inverse_array(psi.matrix.data, X.p)))
            maps.append(complement.s @ C.injections[k] @ psi_inv)
        maps.append(X_prime.s)
        iso = self.modules.combine(X, maps)
        if not iso.is_isomorphism or not iso.is_intertwining():
            raise VerificationFailed("Selected summands and X' do not reassemble X", "sum -> X invertible")
        return CancellationCertificate(indices=tuple(j for _, j, _ in matches), complement=C, iso=iso)

    def _refine(self, A: StructureAlgebra, g: AlgebraElement, budget: int, seed, path: tuple
                ) -> list[AlgebraElement]:
        """Split g into orthogonal primitive idempotents summing to g."""
        if g.is_zero:
            return []
        corner = corner_algebra(A, g)
        verdict = self.idempotents.is_local(corner.algebra, budget, child_seed(seed, path), trusted=True)
        if verdict.is_local:
            return [g]
        f = corner.embed_element(verdict.witness)
        return self._refine(A, f, budget, seed, path + (0,)) + \
            self._refine(A, g - f, budget, seed, path + (1,))

    def split_through_decomposition(self, D: Decomposition, e: ModuleMorphism, seed=None,
                                    budget: int = None) -> SplitDatum:
        """
        Split an idempotent e of X by conjugating the idempotents of D onto a
        primitive refinement of {e, 1 - e}: Y is a sum of summands of D.
        """
        seed = self.seed if seed is None else seed
        budget = self.budget if budget is None else budget
        X = D.parent
        if e.source != X or e.target != X or e @ e != e:
            raise NotIdempotent("Expected an idempotent endomorphism of the decomposed module")
        if X.dim == 0:
            return SplitDatum(e=e, Y=X, r=X.identity(), s=X.identity())

        end = self.modules.end_algebra(X)
        E = end.algebra
        x = end.coordinates(e)
        inside = self._refine(E, x, budget, seed, (0,))
        outside = self._refine(E, E.one() - x, budget, seed, (1,))
        es = self.idempotents_from_decomposition(D, certify=False)
        cert = self.conjugator(E, es, inside + outside, seed, budget, trusted=True)

        selected = [j for j in range(D.length) if cert.sigma[j] < len(inside)]
        a = end.morphism(cert.a)
        a_inv = end.morphism(cert.a_inv)
        S, _, _ = self.modules.direct_sum([D.summands[j] for j in selected], X.algebra)
        include = self.modules.combine(X, [D.injections[j] for j in selected])
        include = ModuleMorphism(S, X, include.matrix)
        if selected:
            project_matrix = np.concatenate([D.projections[j].matrix.data for j in selected], axis=1)
        else:
            project_matrix = X.field.zeros((X.dim, 0))
        project = ModuleMorphism(X, S, MatrixFp(X.field, project_matrix))

        datum = SplitDatum(e=e, Y=S, r=project @ a_inv, s=a @ include)
        issues = datum.violations()
        if issues:
            raise VerificationFailed("Constructive split does not verify", issues[0])
        return datum

    def semiperfect_decomposition(self, M: RightModule, seed=None, budget: int = None) -> Decomposition:
        """
        Decompose the regular module of End(M) as the sum of the right ideals
        e_j End(M), e_j = i_j p_j for a decomposition of M.

        End(e_j E) is the corner e_j E e_j, so each verdict is taken there.
        """
        seed = self.seed if seed is None else seed
        budget = self.budget if budget is None else budget
        if M.dim == 0:
            raise InvalidDecomposition("The zero module has no endomorphism algebra")
        D = self.krs_decompose(M, seed, budget)
        end = self.modules.end_algebra(M)
        E = end.algebra
        R = regular_module(E, validate=False)
        es = self.idempotents_from_decomposition(D, certify=False)

        summands, injections, projections, verdicts = [], [], [], []
        for j, e in enumerate(es):
            P, incl = self.modules.right_ideal(E, e, R)
            _, pivots = echelon_basis(incl.matrix.data, E.p)
            # x -> e x in row convention
            proj = left_mul_matrix(e).data.T[:, pivots]
            summands.append(P)
            injections.append(incl)
            projections.append(ModuleMorphism(R, P, MatrixFp(E.field, proj.copy())))
            verdicts.append(self.idempotents.is_local(corner_algebra(E, e).algebra, budget,
                                                      child_seed(seed, (j,)), trusted=True))
        return Decomposition(R, summands, injections, projections, verdicts, seed=root_seed(seed))

    # Main theorem harness

    def _sample_idempotents(self, M: RightModule, D: Decomposition, budget: int) -> list[ModuleMorphism]:
        end = self.modules.end_algebra(M)
        E = end.algebra
        sample = [E.zero(), E.one()]
        if E.p ** E.dim <= budget:
            for w in iter_idempotents(E):
                if len(sample) >= self.sample_size:
                    break
                if w not in sample:
                    sample.append(w)
        for j in range(D.length):
            if len(sample) >= self.sample_size + D.length:
                break
            x = end.coordinates(D.idempotent(j))
            if x not in sample:
                sample.append(x)
        return [end.morphism(x) for x in sample]

    def verify_main_theorem(self, corpus: Sequence[RightModule], seed=None, budget: int = None
                            ) -> MainTheoremReport:
        """
        Run the Krull-Schmidt checks on every module: decomposition exists,
        idempotents split, locality matches indecomposability, and the
        decomposition length matches the idempotent set size and the
        decomposition of End(M).
        """
        seed = self.seed if seed is None else seed
        budget = self.budget if budget is None else budget
        report = MainTheoremReport()
        for k, M in enumerate(corpus):
            s = child_seed(seed, (k,))
            D = self.krs_decompose(M, s, budget)
            validation = D.validate()
            report.record(k, 'krs-decomposition', validation.ok and sum(D.dims) == M.dim,
                          '; '.join(validation.violations[:3]) or f"dims {D.dims}")
            if M.dim == 0:
                for check in ('split-idempotents', 'locality-indecomposability',
                              'idempotent-set-size', 'semi-perfect'):
                    report.record(k, check, True, 'zero module')
                continue

            failures = []
            for e in self._sample_idempotents(M, D, budget):
                first, second = self.idempotents.split_idempotent(M, e)
                issues = first.violations() + second.violations()
                if first.Y.dim + second.Y.dim != M.dim:
                    issues.append("kernel dimensions do not add up")
                if not self.modules.combine(M, [first.s, second.s]).is_isomorphism:
                    issues.append("block reassembly is not invertible")
                failures.extend(issues)
            report.record(k, 'split-idempotents', not failures, '; '.join(failures[:3]))

            mismatches = []
            for label, S, verdict in [('module', M, None)] + \
                    [(f'summand {j}', S, v) for j, (S, v) in enumerate(zip(D.summands, D.locality))]:
                E = self.modules.end_algebra(S).algebra
                if verdict is None:
                    verdict = self.idempotents.is_local(E, budget, s, trusted=True)
                length = D.length if S is M else self.krs_decompose(S, s, budget).length
                if verdict.is_local != (length == 1):
                    mismatches.append(f"{label}: local={verdict.is_local} length={length}")
                if E.p ** E.dim > budget:
                    continue
                # independent of the engine: scan every element of End(S)
                scanned = len(self.oracle.enumerate_idempotents(E, budget)) == 2
                oracle_length = self.oracle.oracle_decompose(S, budget).length
                if scanned != verdict.is_local or scanned != (oracle_length == 1):
                    mismatches.append(f"{label}: exhaustive scan local={scanned} length={oracle_length}")
            report.record(k, 'locality-indecomposability', not mismatches, '; '.join(mismatches))

            es = self.idempotents_from_decomposition(D, budget=budget)
            report.record(k, 'idempotent-set-size', len(es) == D.length,
                          f"{len(es)} idempotents, length {D.length}")

            semi = self.semiperfect_decomposition(M, s, budget)
            report.record(k, 'semi-perfect', semi.validate().ok and semi.length == D.length,
                          f"End(M) length {semi.length}")
        logger.info("Main theorem checks: %d passed, %d failed",
                    len(report.results) - len(report.failures()), len(report.failures()))
        return report
