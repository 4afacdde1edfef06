"""Module service: Hom spaces, endomorphism algebras, kernels, sums and isomorphisms."""
import logging
from typing import Optional, Sequence

import numpy as np
from cachetools import LRUCache

from app.config import setting
from app.errors import (
    AlgebraMismatch, InvalidChain, InvalidModule, IsoSearchInconclusive,
    NotIdempotent, ZeroIdempotent, ZeroModule
)
from app.models.algebra import AlgebraElement, StructureAlgebra, corner_algebra
from app.models.certificate import PhiReport
from app.models.matrix import (
    MatrixFp, batch_invertible, coordinate_block, echelon_basis, inverse_array,
    matmul, nullspace_array, rank_array
)
from app.models.module import BiChain, EndomorphismAlgebra, ModuleMorphism, RightModule, regular_module

logger = logging.getLogger(__name__)

# Candidate matrices tested per batch during exhaustive isomorphism search
ENUMERATION_CHUNK = 4096


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


class ModuleService:
    """
    Service for computations with right modules.

    Hom bases and endomorphism algebras are memoized per module pair in LRU
    caches keyed by module fingerprints.
    """

    def __init__(self, seed: int = None, iso_trials: int = None,
                 iso_enumeration_limit: int = None, cache_size: int = None):
        self._seed = seed
        self._iso_trials = iso_trials
        self._iso_enumeration_limit = iso_enumeration_limit
        size = cache_size if cache_size is not None else setting('KRS_CACHE_SIZE', 256)
        self._hom_cache = LRUCache(maxsize=max(1, size))
        self._end_cache = LRUCache(maxsize=max(1, size))

    @property
    def seed(self):
        if self._seed is None:
            self._seed = setting('KRS_SEED', 0)
        return self._seed

    @property
    def iso_trials(self) -> int:
        if self._iso_trials is None:
            self._iso_trials = setting('KRS_ISO_TRIALS', 32)
        return self._iso_trials

    @property
    def iso_enumeration_limit(self) -> int:
        if self._iso_enumeration_limit is None:
            self._iso_enumeration_limit = setting('KRS_ISO_ENUMERATION_LIMIT', 65536)
        return self._iso_enumeration_limit

    # Hom spaces

    def _hom_rows(self, M: RightModule, N: RightModule) -> np.ndarray:
        """Echelon basis of Hom(M, N) as flattened dim(M) x dim(N) matrices."""
        key = (M.key(), N.key())
        rows = self._hom_cache.get(key)
        if rows is not None:
            return rows

        m, k = M.dim, N.dim
        p = M.p
        if m == 0 or k == 0:
            rows = M.field.zeros((0, m * k))
        else:
            # rho_M(i) X = X rho_N(i) for row-major vec(X)
            eye_m = np.eye(m, dtype=np.int64)
            eye_k = np.eye(k, dtype=np.int64)
            blocks = [
                (np.kron(M.action[i], eye_k) - np.kron(eye_m, N.action[i].T)) % p
                for i in range(M.algebra.dim)
            ]
            rows = nullspace_array(np.concatenate(blocks, axis=0), p)
        rows.setflags(write=False)
        self._hom_cache[key] = rows
        return rows

    def hom_basis(self, M: RightModule, N: RightModule) -> list[ModuleMorphism]:
        """Basis of Hom(M, N) in canonical echelon order."""
        if M.algebra != N.algebra:
            raise AlgebraMismatch("Modules are over different algebras")
        rows = self._hom_rows(M, N)
        return [ModuleMorphism(M, N, MatrixFp(M.field, row.reshape(M.dim, N.dim))) for row in rows]

    def hom_dimension(self, M: RightModule, N: RightModule) -> int:
        if M.algebra != N.algebra:
            raise AlgebraMismatch("Modules are over different algebras")
        return self._hom_rows(M, N).shape[0]

    def end_algebra(self, M: RightModule) -> EndomorphismAlgebra:
        """End(M) with product x * y = x after y; unpacks as (algebra, basis)."""
        if M.dim == 0:
            raise ZeroModule("The zero module has the zero endomorphism ring")
        cached = self._end_cache.get(M.key())
        if cached is not None and cached.module == M:
            return cached

        m = M.dim
        p = M.p
        rows = self._hom_rows(M, M)
        d = rows.shape[0]
        _, pivots = echelon_basis(rows, p)
        B = rows.reshape(d, m, m)

        # products[a, b] is the matrix of h_a after h_b, that is B[b] @ B[a]
        products = np.matmul(B[None, :, :, :], B[:, None, :, :]) % p
        constants = products.reshape(d, d, m * m)[:, :, pivots]
        unit = np.eye(m, dtype=np.int64).reshape(m * m)[pivots]
        algebra = StructureAlgebra(M.field, constants, unit)

        basis = tuple(ModuleMorphism(M, M, MatrixFp(M.field, b)) for b in B)
        end = EndomorphismAlgebra(M, algebra, basis, tuple(pivots))
        self._end_cache[M.key()] = end
        logger.debug("End algebra of a %d-dimensional module has dimension %d", m, d)
        return end

    # Subobjects, quotients and sums

    def submodule(self, M: RightModule, rows) -> tuple[RightModule, ModuleMorphism]:
        """
        The submodule spanned by ``rows`` with its inclusion.

        The inclusion matrix is the echelon basis of the span; InvalidModule if
        the span is not invariant under the action.
        """
        p = M.p
        rows = M.field.array(rows).reshape(-1, M.dim)
        B, pivots = echelon_basis(rows, p) if rows.shape[0] else (rows, [])
        k = B.shape[0]
        if k == 0:
            S = RightModule.zero(M.algebra)
            return S, ModuleMorphism(S, M, MatrixFp.zeros(M.field, 0, M.dim))

        images = np.matmul(B[None, :, :], M.action) % p          # (n, k, m)
        action = images[:, :, pivots]
        if not np.array_equal(np.matmul(action, B) % p, images):
            raise InvalidModule("Span is not invariant under the algebra action")
        S = RightModule(M.algebra, action)
        return S, ModuleMorphism(S, M, MatrixFp(M.field, B))

    def kernel_module(self, phi: ModuleMorphism) -> tuple[RightModule, ModuleMorphism]:
        """Ker(phi) with its inclusion; vectors are rows, so this is the left null space."""
        M = phi.source
        if M.dim == 0:
            return M, M.identity()
        if phi.target.dim == 0:
            rows = np.eye(M.dim, dtype=np.int64)
        else:
            rows = nullspace_array(phi.matrix.data.T.copy(), M.p)
        return self.submodule(M, rows)

    def cokernel_module(self, phi: ModuleMorphism) -> tuple[RightModule, ModuleMorphism]:
        """Coker(phi) = N / im(phi) with the quotient map onto it."""
        N = phi.target
        p = N.p
        k = N.dim
        image, pivots = echelon_basis(phi.matrix.data, p) if phi.source.dim else \
            (N.field.zeros((0, k)), [])
        rest = [c for c in range(k) if c not in set(pivots)]

        reducer = np.eye(k, dtype=np.int64)
        if pivots:
            selector = np.zeros((k, len(pivots)), dtype=np.int64)
            selector[pivots, np.arange(len(pivots))] = 1
            reducer = (reducer - matmul(selector, image, p)) % p
        proj = reducer[:, rest]
        if not rest:
            C = RightModule.zero(N.algebra)
            return C, ModuleMorphism(N, C, MatrixFp.zeros(N.field, k, 0))
        action = (np.matmul(N.action, proj) % p)[:, rest, :]
        C = RightModule(N.algebra, action)
        return C, ModuleMorphism(N, C, MatrixFp(N.field, proj))

    def direct_sum(self, parts: Sequence[RightModule], algebra: StructureAlgebra = None
                   ) -> tuple[RightModule, list[ModuleMorphism], list[ModuleMorphism]]:
        """Block-diagonal sum with its injections and projections."""
        parts = list(parts)
        if not parts:
            if algebra is None:
                raise ValueError("The empty direct sum needs an explicit algebra")
            return RightModule.zero(algebra), [], []
        algebra = parts[0].algebra
        if any(P.algebra != algebra for P in parts):
            raise AlgebraMismatch("Summands are over different algebras")

        field = algebra.field
        total = sum(P.dim for P in parts)
        action = field.zeros((algebra.dim, total, total))
        offset = 0
        for P in parts:
            action[:, offset:offset + P.dim, offset:offset + P.dim] = P.action
            offset += P.dim
        S = RightModule(algebra, action)

        injections, projections = [], []
        offset = 0
        for P in parts:
            inj = field.zeros((P.dim, total))
            inj[np.arange(P.dim), offset + np.arange(P.dim)] = 1
            injections.append(ModuleMorphism(P, S, MatrixFp(field, inj)))
            projections.append(ModuleMorphism(S, P, MatrixFp(field, inj.T.copy())))
            offset += P.dim
        return S, injections, projections

    def conjugate_module(self, M: RightModule, g: MatrixFp) -> tuple[RightModule, ModuleMorphism]:
        """The module with action g^-1 rho g, and g as an isomorphism onto it."""
        g_inv = inverse_array(g.data, M.p)
        action = np.matmul(np.matmul(g_inv[None, :, :], M.action) % M.p, g.data) % M.p
        C = RightModule(M.algebra, action, label=M.label)
        return C, ModuleMorphism(M, C, g)

    def right_ideal(self, A: StructureAlgebra, e: AlgebraElement,
                    regular: RightModule = None) -> tuple[RightModule, ModuleMorphism]:
        """eA as a submodule of the regular module (pass ``regular`` to reuse one)."""
        if e.algebra != A:
            raise AlgebraMismatch("Element belongs to another algebra")
        stack_e = np.broadcast_to(e.coeffs, (A.dim, A.dim))
        rows = A.multiply_many(stack_e, np.eye(A.dim, dtype=np.int64))
        return self.submodule(regular if regular is not None else regular_module(A), rows)

    def combine(self, target: RightModule, maps: Sequence[ModuleMorphism]) -> ModuleMorphism:
        """The map from the direct sum of the maps' sources into ``target``."""
        S, _, _ = self.direct_sum([f.source for f in maps], target.algebra)
        if not maps:
            return ModuleMorphism(S, target, MatrixFp.zeros(target.field, 0, target.dim))
        matrix = np.concatenate([f.matrix.data for f in maps], axis=0)
        return ModuleMorphism(S, target, MatrixFp(target.field, matrix))

    # Isomorphisms

    def find_isomorphism(self, M: RightModule, N: RightModule, seed=None,
                         trials: int = None) -> Optional[ModuleMorphism]:
        """
        An isomorphism M -> N, or None when none exists.

        Tries Hom basis vectors, then seeded random combinations, then every
        combination when p^dim(Hom) is within the enumeration limit. Raises
        IsoSearchInconclusive when random search fails and enumeration is
        out of reach.
        """
        if M.algebra != N.algebra:
            raise AlgebraMismatch("Modules are over different algebras")
        if M.dim != N.dim:
            return None
        if M.dim == 0:
            return ModuleMorphism(M, N, MatrixFp.zeros(M.field, 0, 0))
        if M == N:
            return M.identity()

        rows = self._hom_rows(M, N)
        d = rows.shape[0]
        if d == 0:
            return None
        m = M.dim
        p = M.p

        def as_iso(flat):
            return ModuleMorphism(M, N, MatrixFp(M.field, np.asarray(flat).reshape(m, m)))

        for row in rows:
            if rank_array(row.reshape(m, m), p) == m:
                return as_iso(row)

        rng = _rng(self.seed if seed is None else seed)
        for _ in range(self.iso_trials if trials is None else trials):
            coeffs = rng.integers(0, p, d)
            flat = matmul(coeffs[None, :], rows, p)[0]
            if rank_array(flat.reshape(m, m), p) == m:
                return as_iso(flat)

        if p ** d > self.iso_enumeration_limit:
            logger.warning("Isomorphism search inconclusive: Hom space of dimension %d over F_%d", d, p)
            raise IsoSearchInconclusive(
                f"No isomorphism found in random trials and {p}^{d} combinations exceed the "
                f"enumeration limit {self.iso_enumeration_limit}")

        total = p ** d
        for start in range(0, total, ENUMERATION_CHUNK):
            coeffs = coordinate_block(p, d, start, min(total, start + ENUMERATION_CHUNK))
            flats = matmul(coeffs, np.asarray(rows, dtype=np.int64), p)
            hits = np.nonzero(batch_invertible(flats.reshape(-1, m, m), p))[0]
            if hits.size:
                return as_iso(flats[hits[0]])
        return None

    def is_isomorphic(self, M: RightModule, N: RightModule, seed=None) -> bool:
        return self.find_isomorphism(M, N, seed) is not None

    # Corner isomorphism and bi-chains

    def phi_corner_iso(self, A: StructureAlgebra, e: AlgebraElement) -> PhiReport:
        """Check that h -> h(e) is a ring isomorphism End(eA) -> eAe."""
        if e.algebra != A:
            raise AlgebraMismatch("Element belongs to another algebra")
        if e * e != e:
            raise NotIdempotent(f"{e.tolist()} is not idempotent")
        if e.is_zero:
            raise ZeroIdempotent("Phi is undefined for the zero idempotent")

        P, incl = self.right_ideal(A, e)
        end = self.end_algebra(P)
        corner = corner_algebra(A, e)
        p = A.p

        _, pivots = echelon_basis(incl.matrix.data, p)
        e_local = e.coeffs[pivots]
        stack = np.stack([h.matrix.data for h in end.basis])             # (d, k, k)
        images = np.matmul(e_local[None, None, :], stack)[:, 0, :] % p   # h_a(e) in eA coordinates
        parent = matmul(images, incl.matrix.data, p)                      # in A coordinates
        phi = matmul(parent, corner.project.data, p)                      # in corner coordinates
        inside = np.array_equal(matmul(phi, corner.embed.data, p), parent)

        d, r = phi.shape
        bijective = inside and d == r and rank_array(phi, p) == r
        # Phi(h_a h_b) = Phi(h_a) Phi(h_b)
        left = np.repeat(phi, d, axis=0)
        right = np.tile(phi, (d, 1))
        products = corner.algebra.multiply_many(left, right)
        expected = matmul(end.algebra.constants.reshape(d * d, d), phi, p)
        multiplicative = inside and bool(np.array_equal(products, expected))
        unital = bool(np.array_equal(matmul(end.algebra.unit[None, :], phi, p)[0], corner.algebra.unit))
        return PhiReport(
            end_dim=d,
            corner_dim=r,
            matrix=MatrixFp(A.field, phi),
            bijective=bool(bijective),
            multiplicative=multiplicative,
            unital=unital,
        )

    def bichain_stabilize(self, chain: BiChain) -> Optional[int]:
        """
        Least N such that every pair from N on is a pair of isomorphisms, or
        None when the last pair of the prefix is not.
        """
        isos = []
        for n, (alpha, beta) in enumerate(chain.pairs):
            if not alpha.is_intertwining() or not beta.is_intertwining():
                raise InvalidChain(f"Pair {n} contains a map that is not a module map")
            if not alpha.is_surjective:
                raise InvalidChain(f"alpha_{n} is not epic")
            if not beta.is_injective:
                raise InvalidChain(f"beta_{n} is not monic")
            isos.append(alpha.is_isomorphism and beta.is_isomorphism)
        if not isos:
            return 0
        if not isos[-1]:
            return None
        N = len(isos)
        while N > 0 and isos[N - 1]:
            N -= 1
        return N
