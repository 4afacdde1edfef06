"""Value types of the decomposition engine."""
from app.models.field import PrimeField, Scalar, Polynomial
from app.models.matrix import MatrixFp, RowReduction
from app.models.algebra import (
    StructureAlgebra, AlgebraElement, CornerAlgebra,
    IdempotentSetFlags, ValidationReport
)
from app.models.module import RightModule, ModuleMorphism, BiChain
from app.models.certificate import (
    SplitDatum, LocalityVerdict, LocalityMethod, Verdict, PrimitivityVerdict,
    Decomposition, EquivalenceCertificate, ConjugationCertificate,
    CancellationCertificate
)

__all__ = [
    'PrimeField', 'Scalar', 'Polynomial',
    'MatrixFp', 'RowReduction',
    'StructureAlgebra', 'AlgebraElement', 'CornerAlgebra',
    'IdempotentSetFlags', 'ValidationReport',
    'RightModule', 'ModuleMorphism', 'BiChain',
    'SplitDatum', 'LocalityVerdict', 'LocalityMethod', 'Verdict', 'PrimitivityVerdict',
    'Decomposition', 'EquivalenceCertificate', 'ConjugationCertificate',
    'CancellationCertificate'
]
