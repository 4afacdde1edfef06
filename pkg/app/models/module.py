"""Right modules over structure-constant algebras and their morphisms."""
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from app.errors import (
    AlgebraMismatch, DimensionMismatch, InvalidAlgebra, InvalidChain, InvalidModule
)
from app.models.algebra import AlgebraElement, StructureAlgebra, ValidationReport, validate_algebra
from app.models.field import PrimeField
from app.models.matrix import MatrixFp, array_key, matmul, rank_array


@dataclass(frozen=True, eq=False)
class RightModule:
    """
    A right module of dimension m given by one m x m action matrix per basis
    vector of the algebra.

    Vectors are rows: v * b_i = v @ action[i], so action(xy) = action(x) @ action(y).
    """
    algebra: StructureAlgebra
    action: np.ndarray
    label: str = ''

    def __post_init__(self):
        n = self.algebra.dim
        arr = np.asarray(self.action)
        if arr.size == 0 and arr.ndim != 3:
            arr = self.field.zeros((n, 0, 0))
        arr = self.field.array(arr)
        if arr.ndim != 3 or arr.shape[0] != n or arr.shape[1] != arr.shape[2]:
            raise InvalidModule(f"Action must have shape ({n}, m, m), got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, 'action', arr)
        object.__setattr__(self, '_key', (self.algebra.key(), array_key(arr)))

    @classmethod
    def zero(cls, algebra: StructureAlgebra) -> 'RightModule':
        return cls(algebra, algebra.field.zeros((algebra.dim, 0, 0)))

    @classmethod
    def from_matrices(cls, algebra: StructureAlgebra, matrices: Sequence[MatrixFp],
                      label: str = '') -> 'RightModule':
        if len(matrices) != algebra.dim:
            raise InvalidModule(f"{len(matrices)} action matrices for an algebra of "
                                f"dimension {algebra.dim}")
        if not matrices or matrices[0].rows == 0:
            return cls(algebra, algebra.field.zeros((algebra.dim, 0, 0)), label)
        return cls(algebra, np.stack([m.data for m in matrices]), label)

    @property
    def field(self) -> PrimeField:
        return self.algebra.field

    @property
    def p(self) -> int:
        return self.algebra.p

    @property
    def dim(self) -> int:
        return self.action.shape[1]

    def key(self) -> tuple:
        return self._key

    def __eq__(self, other) -> bool:
        if not isinstance(other, RightModule):
            return NotImplemented
        return self is other or self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def action_matrix(self, i: int) -> MatrixFp:
        return MatrixFp(self.field, self.action[i])

    def rho(self, x: AlgebraElement) -> MatrixFp:
        """Matrix by which the element x acts."""
        if x.algebra != self.algebra:
            raise AlgebraMismatch("Element and module are over different algebras")
        if self.dim == 0:
            return MatrixFp.zeros(self.field, 0, 0)
        return MatrixFp(self.field, np.tensordot(x.coeffs, self.action, axes=([0], [0])) % self.p)

    def identity(self) -> 'ModuleMorphism':
        return ModuleMorphism(self, self, MatrixFp.identity(self.field, self.dim))

    def __repr__(self):
        name = f" {self.label}" if self.label else ''
        return f"RightModule({self.field}, dim={self.dim}{name})"


@dataclass(frozen=True, eq=False)
class ModuleMorphism:
    """
    A module map given by a dim(source) x dim(target) matrix acting on row vectors.

    ``g @ f`` is the composite g after f, with matrix f.matrix @ g.matrix.
    """
    source: RightModule
    target: RightModule
    matrix: MatrixFp

    def __post_init__(self):
        if self.matrix.shape != (self.source.dim, self.target.dim):
            raise DimensionMismatch(f"Morphism matrix has shape {self.matrix.shape}, expected "
                                    f"{(self.source.dim, self.target.dim)}")

    @classmethod
    def zero(cls, source: RightModule, target: RightModule) -> 'ModuleMorphism':
        return cls(source, target, MatrixFp.zeros(source.field, source.dim, target.dim))

    def __matmul__(self, other: 'ModuleMorphism') -> 'ModuleMorphism':
        if other.target != self.source:
            raise DimensionMismatch("Composite of morphisms with mismatched endpoints")
        return ModuleMorphism(other.source, self.target, other.matrix @ self.matrix)

    def _check(self, other: 'ModuleMorphism'):
        if other.source != self.source or other.target != self.target:
            raise DimensionMismatch("Morphisms have different endpoints")

    def __add__(self, other: 'ModuleMorphism') -> 'ModuleMorphism':
        self._check(other)
        return ModuleMorphism(self.source, self.target, self.matrix + other.matrix)

    def __sub__(self, other: 'ModuleMorphism') -> 'ModuleMorphism':
        self._check(other)
        return ModuleMorphism(self.source, self.target, self.matrix - other.matrix)

    def scale(self, c: int) -> 'ModuleMorphism':
        return ModuleMorphism(self.source, self.target, self.matrix.scale(c))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModuleMorphism):
            return NotImplemented
        return self.source == other.source and self.target == other.target and \
            self.matrix == other.matrix

    def __hash__(self):
        return hash((self.source, self.target, self.matrix))

    @property
    def rank(self) -> int:
        return rank_array(self.matrix.data, self.matrix.p)

    @property
    def is_injective(self) -> bool:
        return self.rank == self.source.dim

    @property
    def is_surjective(self) -> bool:
        return self.rank == self.target.dim

    @property
    def is_isomorphism(self) -> bool:
        return self.source.dim == self.target.dim and self.is_injective

    @property
    def is_zero(self) -> bool:
        return self.matrix.is_zero

    def is_identity(self) -> bool:
        return self.source == self.target and self.matrix.is_identity()

    def is_intertwining(self) -> bool:
        """rho_src(b_i) @ matrix == matrix @ rho_tgt(b_i) for every basis vector."""
        if self.source.algebra != self.target.algebra:
            return False
        F = self.matrix.data
        p = self.matrix.p
        left = np.matmul(self.source.action, F) % p
        right = np.matmul(F, self.target.action) % p
        return bool(np.array_equal(left, right))


@dataclass(frozen=True)
class BiChain:
    """
    Pairs (alpha_n: X_n -> X_{n+1}, beta_n: X_{n+1} -> X_n) with every alpha
    surjective and every beta injective.
    """
    pairs: tuple

    def __post_init__(self):
        pairs = tuple(tuple(pair) for pair in self.pairs)
        for n, (alpha, beta) in enumerate(pairs):
            if alpha.source != beta.target or alpha.target != beta.source:
                raise InvalidChain(f"Pair {n} does not run between the same two modules")
            if n and alpha.source != pairs[n - 1][0].target:
                raise InvalidChain(f"Pair {n} does not start where pair {n - 1} ends")
        object.__setattr__(self, 'pairs', pairs)

    @property
    def modules(self) -> list[RightModule]:
        if not self.pairs:
            return []
        return [self.pairs[0][0].source] + [alpha.target for alpha, _ in self.pairs]

    def __len__(self):
        return len(self.pairs)


def validate_module(M: RightModule) -> ValidationReport:
    report = ValidationReport(subject=f"module of dimension {M.dim} over {M.field}")
    if M.dim == 0:
        return report
    p = M.p
    A = M.algebra
    unit_action = np.tensordot(A.unit, M.action, axes=([0], [0])) % p
    if not np.array_equal(np.asarray(unit_action, dtype=np.int64), np.eye(M.dim, dtype=np.int64)):
        report.violations.append("unit does not act as the identity")

    for i in range(A.dim):
        products = np.matmul(M.action[i][None, :, :], M.action) % p
        expected = np.tensordot(A.constants[i], M.action, axes=([1], [0])) % p
        for j in np.nonzero(np.any(products != expected, axis=(1, 2)))[0]:
            report.violations.append(
                f"action is not multiplicative at (i,j)=({i},{int(j)})")
    return report


def regular_module(A: StructureAlgebra, validate: bool = True) -> RightModule:
    """A as a right module over itself: b_i acts on row coordinates by right multiplication."""
    report = validate_algebra(A) if validate else None
    if report is not None and not report.ok:
        raise InvalidAlgebra('; '.join(report.violations[:5]))
    return RightModule(A, A.constants.transpose(1, 0, 2).copy(), label='regular')


def act(v: np.ndarray, M: RightModule, x: AlgebraElement) -> np.ndarray:
    return matmul(np.asarray(v)[None, :], M.rho(x).data, M.p)[0]


@dataclass(frozen=True)
class EndomorphismAlgebra:
    """
    End(M) as a structure-constant algebra on a Hom basis.

    The product is composition, x * y = x after y. Basis matrices are in
    reduced echelon form when flattened, so the coordinates of an
    endomorphism are its entries at ``pivots``.
    """
    module: RightModule
    algebra: StructureAlgebra
    basis: tuple                     # ModuleMorphism M -> M
    pivots: tuple                    # flat indices into the m x m matrix

    def __iter__(self):
        yield self.algebra
        yield list(self.basis)

    def morphism(self, x: AlgebraElement) -> ModuleMorphism:
        if x.algebra != self.algebra:
            raise AlgebraMismatch("Element is not in this endomorphism algebra")
        m = self.module.dim
        stack = np.stack([h.matrix.data for h in self.basis]).reshape(len(self.basis), m * m)
        flat = matmul(x.coeffs[None, :], stack, self.module.p)[0]
        return ModuleMorphism(self.module, self.module, MatrixFp(self.module.field, flat.reshape(m, m)))

    def coordinates(self, f: ModuleMorphism) -> AlgebraElement:
        """Coordinates of an endomorphism; InvalidModule if f is not in End(M)."""
        flat = f.matrix.data.reshape(-1)
        x = self.algebra.element(flat[list(self.pivots)])
        if self.morphism(x).matrix != f.matrix:
            raise InvalidModule("Map is not an endomorphism of the module")
        return x
