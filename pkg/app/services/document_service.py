"""Document service: JSON documents for algebras, modules and idempotent sets."""
import json
import logging
import os
from typing import Optional

from jsonschema import Draft7Validator
from marshmallow import ValidationError

from app.config import setting
from app.errors import ParseError, ValidationFailed
from app.models.algebra import AlgebraElement, StructureAlgebra, ValidationReport, validate_algebra
from app.models.module import RightModule, validate_module
from app.schemas import AlgebraSchema, ModuleSchema

logger = logging.getLogger(__name__)

SCHEMA_FILES = {
    'algebra': 'algebra-schema.json',
    'module': 'module-schema.json',
    'idempotents': 'idempotent-set-schema.json',
    'certificate': 'certificate-schema.json',
}


def json_path(path) -> str:
    """Render a jsonschema/marshmallow error path as $.a[0].b."""
    out = '$'
    for part in path:
        out += f'[{part}]' if isinstance(part, int) else f'.{part}'
    return out


def flatten_messages(messages, prefix=()) -> list[str]:
    """Marshmallow error dicts to '$.path: message' lines."""
    if isinstance(messages, dict):
        lines = []
        for key, value in messages.items():
            part = int(key) if isinstance(key, int) or (isinstance(key, str) and key.isdigit()) else key
            lines.extend(flatten_messages(value, prefix + (part,)))
        return lines
    if isinstance(messages, list) and all(isinstance(m, str) for m in messages):
        return [f"{json_path(prefix)}: {m}" for m in messages]
    if isinstance(messages, list):
        return [line for m in messages for line in flatten_messages(m, prefix)]
    return [f"{json_path(prefix)}: {messages}"]


def dumps(doc) -> str:
    """Canonical text of a document: two-space indent, key order preserved."""
    return json.dumps(doc, indent=2, ensure_ascii=False) + '\n'


class DocumentService:
    """
    Service for reading and writing the JSON document database.

    Raw documents are checked against the draft-07 schemas under
    ``<CORPUS_DIR>/schema`` before they are turned into models.
    """

    def __init__(self, corpus_dir: str = None):
        self._corpus_dir = corpus_dir
        self._validators = {}

    @property
    def corpus_dir(self) -> str:
        if self._corpus_dir is None:
            self._corpus_dir = setting('CORPUS_DIR')
        return self._corpus_dir

    # Raw JSON

    def read_json(self, path: str):
        try:
            with open(path, 'r', encoding='utf-8') as f:
                return json.load(f)
        except OSError as e:
            raise ParseError(f"Cannot read {path}: {e.strerror or e}")
        except json.JSONDecodeError as e:
            raise ParseError(f"{path} is not valid JSON: {e.msg} at line {e.lineno} column {e.colno}")

    def write_json(self, doc, path: Optional[str] = None) -> str:
        """Write a document to ``path`` (or nowhere) and return its text."""
        text = dumps(doc)
        if path:
            directory = os.path.dirname(os.path.abspath(path))
            os.makedirs(directory, exist_ok=True)
            with open(path, 'w', encoding='utf-8') as f:
                f.write(text)
            logger.info("Wrote %s", path)
        return text

    # Schema validation

    def validator(self, kind: str) -> Draft7Validator:
        if kind not in self._validators:
            schema = self.read_json(os.path.join(self.corpus_dir, 'schema', SCHEMA_FILES[kind]))
            self._validators[kind] = Draft7Validator(schema)
        return self._validators[kind]

    def schema_violations(self, doc, kind: str) -> list[str]:
        errors = sorted(self.validator(kind).iter_errors(doc), key=lambda e: list(e.absolute_path))
        return [f"{json_path(e.absolute_path)}: {e.message}" for e in errors]

    def detect_kind(self, doc) -> str:
        if isinstance(doc, dict):
            if 'kind' in doc and 'payload' in doc:
                return 'certificate'
            if 'structure_constants' in doc:
                return 'algebra'
            if 'action' in doc:
                return 'module'
            if 'idempotents' in doc:
                return 'idempotents'
        raise ParseError("Document is neither an algebra, a module, an idempotent set nor a certificate")

    def require_schema(self, doc, kind: str, source: str = 'document'):
        violations = self.schema_violations(doc, kind)
        if violations:
            raise ValidationFailed(f"{source} does not match the {kind} schema", violations)

    # Models

    def algebra_from_doc(self, doc, source: str = 'document', check: bool = True) -> StructureAlgebra:
        self.require_schema(doc, 'algebra', source)
        try:
            A = AlgebraSchema().load(doc)
        except ValidationError as e:
            raise ValidationFailed(f"{source} is not a valid algebra", flatten_messages(e.messages))
        if check:
            report = validate_algebra(A)
            if not report.ok:
                raise ValidationFailed(f"{source} violates the algebra laws", report.violations)
        return A

    def _resolve_algebra(self, doc: dict, base: str) -> dict:
        algebra = doc.get('algebra')
        if isinstance(algebra, str):
            target = algebra if os.path.isabs(algebra) else os.path.join(base, algebra)
            return dict(doc, algebra=self.read_json(target))
        return doc

    def module_from_doc(self, doc, base: str = '.', source: str = 'document',
                        check: bool = True) -> RightModule:
        """A module; a string ``algebra`` is a path relative to ``base``."""
        self.require_schema(doc, 'module', source)
        doc = self._resolve_algebra(doc, base)
        self.require_schema(doc['algebra'], 'algebra', f"{source} (algebra)")
        try:
            M = ModuleSchema().load(doc)
        except ValidationError as e:
            raise ValidationFailed(f"{source} is not a valid module", flatten_messages(e.messages))
        if check:
            report = validate_algebra(M.algebra)
            report.violations.extend(validate_module(M).violations)
            if not report.ok:
                raise ValidationFailed(f"{source} violates the module laws", report.violations)
        return M

    def load_algebra(self, path: str, check: bool = True) -> StructureAlgebra:
        return self.algebra_from_doc(self.read_json(path), path, check)

    def load_module(self, path: str, check: bool = True) -> RightModule:
        return self.module_from_doc(self.read_json(path), os.path.dirname(os.path.abspath(path)), path, check)

    def load_algebra_or_module(self, path: str):
        doc = self.read_json(path)
        kind = self.detect_kind(doc)
        if kind == 'algebra':
            return self.algebra_from_doc(doc, path)
        if kind == 'module':
            return self.module_from_doc(doc, os.path.dirname(os.path.abspath(path)), path)
        raise ParseError(f"{path} is a {kind} document, expected an algebra or a module")

    def load_idempotents(self, path: str, A: StructureAlgebra) -> list[AlgebraElement]:
        doc = self.read_json(path)
        self.require_schema(doc, 'idempotents', path)
        rows = doc['idempotents']
        bad = [j for j, row in enumerate(rows) if len(row) != A.dim]
        if bad:
            raise ValidationFailed(f"{path} does not match the algebra",
                                   [f"$.idempotents[{j}]: expected {A.dim} coordinates" for j in bad])
        return [A.element(row) for row in rows]

    # Documents

    def algebra_doc(self, A: StructureAlgebra) -> dict:
        return AlgebraSchema().dump(A)

    def module_doc(self, M: RightModule) -> dict:
        return ModuleSchema().dump(M)

    def idempotents_doc(self, elements) -> dict:
        return {'idempotents': [x.tolist() for x in elements]}

    def validate_path(self, path: str) -> ValidationReport:
        """
        Schema and law checks for one document. Parse errors propagate;
        everything else is reported.
        """
        doc = self.read_json(path)
        kind = self.detect_kind(doc)
        report = ValidationReport(subject=f"{path} ({kind})")
        try:
            if kind == 'algebra':
                self.algebra_from_doc(doc, path)
            elif kind == 'module':
                self.module_from_doc(doc, os.path.dirname(os.path.abspath(path)), path)
            else:
                self.require_schema(doc, kind, path)
        except ValidationFailed as e:
            report.violations.extend(e.violations or [str(e)])
        return report
