"""Dense exact matrices over F_p backed by numpy arrays."""
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from app.errors import DimensionMismatch, FieldMismatch, NoSolution, NotSquare, Singular
from app.models.field import Polynomial, PrimeField, poly_lcm


@dataclass(frozen=True, eq=False)
class MatrixFp:
    """
    An immutable rows x cols matrix over a prime field.

    ``data`` is a read-only 2-d numpy array with entries reduced into [0, p).
    """
    field: PrimeField
    data: np.ndarray

    def __post_init__(self):
        arr = self.data
        if not isinstance(arr, np.ndarray) or arr.dtype != self._dtype() or arr.ndim != 2:
            arr = self.field.array(arr)
        else:
            arr = self.field.reduce(arr)
        if arr.ndim != 2:
            raise DimensionMismatch(f"Matrix data must be 2-dimensional, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, 'data', arr)

    def _dtype(self):
        return np.dtype(object) if self.field.dtype is object else np.dtype(np.int64)

    @classmethod
    def zeros(cls, field: PrimeField, rows: int, cols: int) -> 'MatrixFp':
        return cls(field, field.zeros((rows, cols)))

    @classmethod
    def identity(cls, field: PrimeField, n: int) -> 'MatrixFp':
        arr = field.zeros((n, n))
        for i in range(n):
            arr[i, i] = 1
        return cls(field, arr)

    @classmethod
    def from_rows(cls, field: PrimeField, rows: Sequence[Sequence[int]],
                  cols: Optional[int] = None) -> 'MatrixFp':
        rows = [list(r) for r in rows]
        if not rows:
            return cls.zeros(field, 0, cols or 0)
        width = len(rows[0])
        if any(len(r) != width for r in rows) or (cols is not None and cols != width):
            raise DimensionMismatch("Ragged matrix rows")
        return cls(field, field.array(rows).reshape(len(rows), width))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple:
        return self.data.shape

    @property
    def p(self) -> int:
        return self.field.characteristic

    @property
    def entries(self) -> tuple:
        """Row-major entries as Python ints."""
        return tuple(int(v) for v in self.data.ravel())

    @property
    def T(self) -> 'MatrixFp':
        return MatrixFp(self.field, self.data.T.copy())

    def tolist(self) -> list[list[int]]:
        return [[int(v) for v in row] for row in self.data]

    def _check(self, other: 'MatrixFp'):
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def __matmul__(self, other: 'MatrixFp') -> 'MatrixFp':
        self._check(other)
        if self.cols != other.rows:
            raise DimensionMismatch(f"Cannot multiply {self.shape} by {other.shape}")
        return MatrixFp(self.field, matmul(self.data, other.data, self.p))

    def __add__(self, other: 'MatrixFp') -> 'MatrixFp':
        self._check(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"Cannot add {self.shape} and {other.shape}")
        return MatrixFp(self.field, (self.data + other.data) % self.p)

    def __sub__(self, other: 'MatrixFp') -> 'MatrixFp':
        self._check(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"Cannot subtract {other.shape} from {self.shape}")
        return MatrixFp(self.field, (self.data - other.data) % self.p)

    def __neg__(self) -> 'MatrixFp':
        return MatrixFp(self.field, (-self.data) % self.p)

    def scale(self, c: int) -> 'MatrixFp':
        return MatrixFp(self.field, (self.data * (int(c) % self.p)) % self.p)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixFp):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and \
            bool(np.array_equal(self.data, other.data))

    def __hash__(self):
        return hash((self.field, self.shape, self.entries))

    @property
    def is_zero(self) -> bool:
        return not np.any(self.data)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_identity(self) -> bool:
        return self.is_square and self == MatrixFp.identity(self.field, self.rows)

    def __repr__(self):
        return f"MatrixFp({self.field}, {self.tolist()})"


@dataclass(frozen=True)
class RowReduction:
    """Result of row_reduce: RREF, rank, pivot columns and a canonical kernel basis."""
    rref: MatrixFp
    rank: int
    kernel_basis: MatrixFp
    pivots: tuple


# Array-level helpers shared by the engine. All take and return reduced arrays.

def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return (a @ b) % p


def rref_array(arr: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_p. Returns (rref, pivot_columns)."""
    A = arr.copy() % p
    m, n = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nonzero = np.nonzero(A[r:, c])[0]
        if nonzero.size == 0:
            continue
        piv = r + int(nonzero[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        inv = pow(int(A[r, c]), p - 2, p)
        A[r] = (A[r] * inv) % p
        column = A[:, c].copy()
        column[r] = 0
        if np.any(column):
            A = (A - np.outer(column, A[r])) % p
        pivots.append(c)
        r += 1
    return A, pivots


def nullspace_array(arr: np.ndarray, p: int) -> np.ndarray:
    """Rows spanning {v : arr @ v = 0}, in reduced row echelon form."""
    m, n = arr.shape
    R, pivots = rref_array(arr, p)
    free = [j for j in range(n) if j not in set(pivots)]
    K = np.zeros((len(free), n), dtype=arr.dtype)
    if not free:
        return K
    K[np.arange(len(free)), free] = 1
    if pivots:
        K[:, pivots] = (-R[:len(pivots)][:, free].T) % p
    return rref_array(K, p)[0]


def rank_array(arr: np.ndarray, p: int) -> int:
    if arr.size == 0:
        return 0
    return len(rref_array(arr, p)[1])


def echelon_basis(arr: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Nonzero rows of the RREF of ``arr``: a canonical basis of its row space."""
    R, pivots = rref_array(arr, p)
    return R[:len(pivots)], pivots


def solve_array(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """Solve A @ X = B, one column of X per column of B, free variables zero."""
    m, n = A.shape
    if B.shape[0] != m:
        raise DimensionMismatch(f"Right-hand side has {B.shape[0]} rows, expected {m}")
    R, pivots = rref_array(np.concatenate([A, B], axis=1), p)
    if pivots and pivots[-1] >= n:
        raise NoSolution("Right-hand side is outside the column space")
    X = np.zeros((n, B.shape[1]), dtype=R.dtype)
    if pivots:
        X[pivots] = R[:len(pivots), n:]
    return X % p


def inverse_array(arr: np.ndarray, p: int) -> np.ndarray:
    n, m = arr.shape
    if n != m:
        raise NotSquare(f"Cannot invert a {n}x{m} matrix")
    eye = np.zeros((n, n), dtype=arr.dtype)
    eye[np.arange(n), np.arange(n)] = 1
    R, pivots = rref_array(np.concatenate([arr, eye], axis=1), p)
    if len(pivots) < n or pivots[n - 1] != n - 1:
        raise Singular("Matrix is singular")
    return R[:, n:]


def batch_invertible(stack: np.ndarray, p: int) -> np.ndarray:
    """
    Invertibility of every matrix in a (batch, n, n) stack.

    Gaussian elimination runs on the whole batch at once with a table of
    inverses, so p must be small enough for int64 arithmetic and the table.
    """
    A = np.array(stack, dtype=np.int64) % p
    batch, n, _ = A.shape
    ok = np.ones(batch, dtype=bool)
    if n == 0:
        return ok
    inverses = np.zeros(p, dtype=np.int64)
    inverses[1:] = [pow(v, p - 2, p) for v in range(1, p)]
    idx = np.arange(batch)
    for c in range(n):
        nonzero = A[:, c:, c] != 0
        ok &= nonzero.any(axis=1)
        piv = c + nonzero.argmax(axis=1)
        top = A[idx, c].copy()
        A[idx, c] = A[idx, piv]
        A[idx, piv] = top
        A[:, c] = (A[:, c] * inverses[A[:, c, c]][:, None]) % p
        if c + 1 < n:
            factors = A[:, c + 1:, c]
            A[:, c + 1:] = (A[:, c + 1:] - factors[:, :, None] * A[:, c, None, :]) % p
    return ok


# Matrix-level operations

def row_reduce(M: MatrixFp) -> RowReduction:
    R, pivots = rref_array(M.data, M.p)
    kernel = nullspace_array(M.data, M.p)
    return RowReduction(
        rref=MatrixFp(M.field, R),
        rank=len(pivots),
        kernel_basis=MatrixFp(M.field, kernel.reshape(-1, M.cols)),
        pivots=tuple(pivots),
    )


def rank(M: MatrixFp) -> int:
    return rank_array(M.data, M.p)


def solve_linear(A: MatrixFp, b: Sequence[int]) -> np.ndarray:
    """Return x with A @ x = b; raises NoSolution if b is outside the column space."""
    rhs = A.field.array(list(b)).reshape(-1, 1)
    if rhs.shape[0] != A.rows:
        raise DimensionMismatch(f"Vector of length {rhs.shape[0]} for {A.rows} rows")
    return solve_array(A.data, rhs, A.p)[:, 0]


def invert(M: MatrixFp) -> MatrixFp:
    return MatrixFp(M.field, inverse_array(M.data, M.p))


def is_invertible(M: MatrixFp) -> bool:
    return M.is_square and rank(M) == M.rows


def hstack(blocks: Iterable[MatrixFp], field: PrimeField, rows: int) -> MatrixFp:
    blocks = list(blocks)
    if not blocks:
        return MatrixFp.zeros(field, rows, 0)
    return MatrixFp(field, np.concatenate([b.data for b in blocks], axis=1))


def vstack(blocks: Iterable[MatrixFp], field: PrimeField, cols: int) -> MatrixFp:
    blocks = list(blocks)
    if not blocks:
        return MatrixFp.zeros(field, 0, cols)
    return MatrixFp(field, np.concatenate([b.data for b in blocks], axis=0))


def block_diagonal(blocks: Sequence[MatrixFp], field: PrimeField) -> MatrixFp:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    arr = field.zeros((rows, cols))
    r = c = 0
    for b in blocks:
        arr[r:r + b.rows, c:c + b.cols] = b.data
        r += b.rows
        c += b.cols
    return MatrixFp(field, arr)


def poly_at_matrix(f: Polynomial, M: MatrixFp) -> MatrixFp:
    """Evaluate f(M) by Horner's rule."""
    if not M.is_square:
        raise NotSquare(f"Cannot evaluate a polynomial at a {M.rows}x{M.cols} matrix")
    n = M.rows
    result = M.field.zeros((n, n))
    for c in reversed(f.coefficients):
        result = matmul(result, M.data, M.p)
        result[np.arange(n), np.arange(n)] += c
        result %= M.p
    return MatrixFp(M.field, result)


def _krylov_polynomial(v: np.ndarray, M: np.ndarray, field: PrimeField) -> tuple[Polynomial, np.ndarray]:
    """Local minimal polynomial of the row vector v under v -> v @ M, and its Krylov basis."""
    p = field.characteristic
    n = M.shape[0]
    vectors = [v]
    for _ in range(n):
        vectors.append(matmul(vectors[-1], M, p))
    # Columns are v, vM, vM^2, ...; the first non-pivot column is the first dependency.
    R, pivots = rref_array(np.stack(vectors, axis=1), p)
    k = len(pivots)
    coeffs = [(-int(R[j, k])) % p for j in range(k)] + [1]
    return Polynomial(field, tuple(coeffs)), np.stack(vectors[:k])


def min_poly(M: MatrixFp) -> Polynomial:
    """
    Minimal polynomial of a square matrix.

    Krylov sequences of standard basis vectors give local minimal polynomials
    whose lcm is the answer; basis vectors already inside the accumulated
    invariant subspace contribute nothing new and are skipped.
    """
    if not M.is_square:
        raise NotSquare(f"min_poly of a {M.rows}x{M.cols} matrix")
    n = M.rows
    result = Polynomial.one(M.field)
    span = M.field.zeros((0, n))
    for i in range(n):
        e = M.field.zeros((n,))
        e[i] = 1
        if span.shape[0] and rank_array(np.vstack([span, e]), M.p) == span.shape[0]:
            continue
        local, krylov = _krylov_polynomial(e, M.data, M.field)
        result = poly_lcm(result, local)
        span, _ = echelon_basis(np.vstack([span, krylov]), M.p)
        if span.shape[0] == n:
            break
    return result


def array_key(arr: np.ndarray) -> tuple:
    """Hashable key for an array of residues (all fit in int64 since p < 2^31)."""
    return arr.shape, np.asarray(arr, dtype=np.int64).tobytes()


def coordinate_block(p: int, dim: int, start: int, stop: int) -> np.ndarray:
    """
    Coordinate vectors with indices in [start, stop) in mixed-radix order,
    coordinate 0 being the least significant digit.
    """
    index = np.arange(start, stop, dtype=np.int64)
    powers = p ** np.arange(dim, dtype=np.int64)
    return (index[:, None] // powers[None, :]) % p
