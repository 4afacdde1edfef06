"""Exceptions raised by the decomposition engine.

Every error carries the exit code the command line reports for it:
0 ok, 1 semantic failure, 2 parse error, 3 inconclusive, 4 budget exceeded.
"""


class KrsError(ValueError):
    """Base class for all engine errors."""
    exit_code = 1


# Scalars and polynomials
class ZeroInverse(KrsError):
    pass


class FieldMismatch(KrsError):
    pass


class NotMonic(KrsError):
    pass


class ZeroPolynomial(KrsError):
    pass


class NoCoprimeSplit(KrsError):
    """The polynomial is a power of a single irreducible."""


class InvalidPart(KrsError):
    pass


# Linear algebra
class DimensionMismatch(KrsError):
    pass


class NoSolution(KrsError):
    pass


class Singular(KrsError):
    pass


class NotSquare(KrsError):
    pass


# Algebras and modules
class AlgebraMismatch(KrsError):
    pass


class InvalidAlgebra(KrsError):
    pass


class InvalidModule(KrsError):
    pass


class NotIdempotent(KrsError):
    pass


class ZeroIdempotent(KrsError):
    pass


class ZeroModule(KrsError):
    pass


class InvalidChain(KrsError):
    pass


# Decompositions and certificates
class InconclusiveLocality(KrsError):
    exit_code = 3


class IsoSearchInconclusive(KrsError):
    exit_code = 3


class MatchingFailed(KrsError):
    pass


class NoMatching(KrsError):
    pass


class InvalidDecomposition(KrsError):
    pass


class NotCompleteOrthogonalPrimitive(KrsError):
    pass


class BudgetExceeded(KrsError):
    exit_code = 4


# Documents
class ParseError(KrsError):
    exit_code = 2


class ValidationFailed(KrsError):
    def __init__(self, message: str, violations: list[str] = None):
        super().__init__(message)
        self.violations = violations or []


class VerificationFailed(KrsError):
    def __init__(self, message: str, equation: str = ''):
        super().__init__(message)
        self.equation = equation
