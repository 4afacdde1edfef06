"""Marshmallow schemas for algebras, modules and certificate payloads."""
import numpy as np
from marshmallow import Schema, ValidationError, fields, post_load, pre_dump, validate

from app.models.algebra import StructureAlgebra
from app.models.certificate import Decomposition, LocalityMethod, LocalityVerdict, Verdict
from app.models.field import PrimeField
from app.models.module import RightModule

CERTIFICATE_KINDS = (
    'decomposition', 'equivalence', 'conjugation', 'locality', 'lemma3',
    'main-theorem', 'endomorphism', 'idempotents',
)


def _integers():
    return fields.List(fields.Integer(strict=True))


def _matrix():
    return fields.List(fields.List(fields.Integer(strict=True)))


class OrderedSchema(Schema):
    class Meta:
        ordered = True


class AlgebraSchema(OrderedSchema):
    """An algebra document; loads to a StructureAlgebra (constants reduced mod p)."""
    p = fields.Integer(strict=True, required=True)
    dim = fields.Integer(strict=True, required=True, validate=validate.Range(min=1))
    basis_names = fields.List(fields.String(), allow_none=True, load_default=None)
    structure_constants = fields.List(_matrix(), required=True)
    unit = fields.List(fields.Integer(strict=True), required=True)

    @pre_dump
    def from_algebra(self, A: StructureAlgebra, **kwargs):
        return {
            'p': A.p,
            'dim': A.dim,
            'basis_names': list(A.basis_names) if A.basis_names else None,
            'structure_constants': A.constants.tolist(),
            'unit': A.unit.tolist(),
        }

    @post_load
    def to_algebra(self, data, **kwargs) -> StructureAlgebra:
        if len(data['unit']) != data['dim']:
            raise ValidationError(f"unit has {len(data['unit'])} entries for dimension {data['dim']}",
                                  field_name='unit')
        try:
            field = PrimeField(data['p'])
        except ValueError as e:
            raise ValidationError(str(e), field_name='p')
        try:
            return StructureAlgebra(field, data['structure_constants'], data['unit'], data['basis_names'])
        except ValueError as e:
            raise ValidationError(str(e), field_name='structure_constants')


class MatrixSchema(OrderedSchema):
    """A matrix with its shape, so that empty matrices keep their column count."""
    shape = fields.List(fields.Integer(strict=True, validate=validate.Range(min=0)),
                        validate=validate.Length(equal=2), required=True)
    entries = _matrix()

    @pre_dump
    def from_array(self, arr, **kwargs):
        arr = np.asarray(arr)
        return {'shape': list(arr.shape), 'entries': arr.tolist()}

    @post_load
    def to_array(self, data, **kwargs) -> np.ndarray:
        rows, cols = data['shape']
        entries = data['entries']
        if len(entries) != rows or any(len(row) != cols for row in entries):
            raise ValidationError(f"entries do not have shape {data['shape']}", field_name='entries')
        arr = np.array(entries, dtype=object)
        return arr.reshape(rows, cols)


class ActionSchema(OrderedSchema):
    """
    A module body. The algebra is not repeated; loading needs
    ``context['algebra']``.
    """
    dim = fields.Integer(strict=True, required=True, validate=validate.Range(min=0))
    label = fields.String(load_default='')
    action = fields.List(_matrix(), required=True)

    @pre_dump
    def from_module(self, M: RightModule, **kwargs):
        return {'dim': M.dim, 'label': M.label, 'action': M.action.tolist()}

    @post_load
    def to_module(self, data, **kwargs) -> RightModule:
        return _build_module(self.context['algebra'], data)


class ModuleSchema(OrderedSchema):
    """A self-contained module document with its algebra inline."""
    algebra = fields.Nested(AlgebraSchema, required=True)
    dim = fields.Integer(strict=True, required=True, validate=validate.Range(min=0))
    label = fields.String(load_default='')
    action = fields.List(_matrix(), required=True)

    @pre_dump
    def from_module(self, M: RightModule, **kwargs):
        return {'algebra': M.algebra, 'dim': M.dim, 'label': M.label, 'action': M.action.tolist()}

    @post_load
    def to_module(self, data, **kwargs) -> RightModule:
        return _build_module(data['algebra'], data)


def _build_module(A: StructureAlgebra, data: dict) -> RightModule:
    m = data['dim']
    action = data['action']
    if len(action) != A.dim:
        raise ValidationError(f"{len(action)} action matrices for an algebra of dimension {A.dim}",
                              field_name='action')
    for i, matrix in enumerate(action):
        if len(matrix) != m or any(len(row) != m for row in matrix):
            raise ValidationError(f"action matrix {i} is not {m}x{m}", field_name='action')
    arr = A.field.zeros((A.dim, 0, 0)) if m == 0 else A.field.array(action)
    try:
        return RightModule(A, arr, label=data.get('label', ''))
    except ValueError as e:
        raise ValidationError(str(e), field_name='action')


class VerdictSchema(OrderedSchema):
    """A locality verdict; the algebra it speaks about is recomputed on load."""
    verdict = fields.String(required=True, validate=validate.OneOf([v.value for v in Verdict]))
    method = fields.String(required=True, validate=validate.OneOf([m.value for m in LocalityMethod]))
    witness = fields.List(fields.Integer(strict=True), allow_none=True, load_default=None)
    scanned = fields.Integer(strict=True, load_default=0)
    trials = fields.Integer(strict=True, allow_none=True, load_default=None)
    failure_bound = fields.Float(allow_none=True, load_default=None)

    @pre_dump
    def from_verdict(self, v: LocalityVerdict, **kwargs):
        return {
            'verdict': v.verdict.value,
            'method': v.method.value,
            'witness': v.witness.tolist() if v.witness is not None else None,
            'scanned': v.scanned,
            'trials': v.trials,
            'failure_bound': v.failure_bound,
        }


class DecompositionSchema(OrderedSchema):
    """Summands with their maps and verdicts; loads to a plain dict of parts."""
    dims = _integers()
    summands = fields.List(fields.Nested(ActionSchema), required=True)
    injections = fields.List(fields.Nested(MatrixSchema), required=True)
    projections = fields.List(fields.Nested(MatrixSchema), required=True)
    locality = fields.List(fields.Nested(VerdictSchema), required=True)

    @pre_dump
    def from_decomposition(self, D: Decomposition, **kwargs):
        return {
            'dims': D.dims,
            'summands': D.summands,
            'injections': [i.matrix.data for i in D.injections],
            'projections': [p.matrix.data for p in D.projections],
            'locality': D.locality,
        }


class CertificateSchema(OrderedSchema):
    """The envelope shared by every certificate kind."""
    kind = fields.String(required=True, validate=validate.OneOf(CERTIFICATE_KINDS))
    engine_version = fields.String(required=True)
    seed = fields.Integer(strict=True, required=True)
    conclusive = fields.Boolean(load_default=True)
    payload = fields.Dict(keys=fields.String(), required=True)
