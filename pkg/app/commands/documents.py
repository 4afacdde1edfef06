"""Document validation command."""
import sys

import click
from flask import Blueprint

from app.commands.base import budget_option, certificates, engine, krs_command
from app.errors import KrsError, ParseError, VerificationFailed

documents_bp = Blueprint('documents', __name__, cli_group=None)


@documents_bp.cli.command('validate')
@click.argument('paths', nargs=-1, required=True, type=click.Path())
@budget_option
@krs_command
def validate(paths, budget):
    """
    Check algebra, module, idempotent-set and certificate documents.

    Certificates are schema-checked and then re-verified equation by
    equation, as ``verify`` does without input documents. Exit 0 when every
    document passes, 1 on violations, 2 when a file does not parse, 3 or 4
    when a certificate cannot be re-verified within the budget.
    """
    from app.services.document_service import DocumentService
    service = DocumentService()
    verifier = None

    exit_code = 0
    for path in paths:
        try:
            report = service.validate_path(path)
        except ParseError as e:
            click.echo(f"{path}: parse error: {e}", err=True)
            exit_code = 2
            continue
        doc = service.read_json(path)
        if report.ok and service.detect_kind(doc) == 'certificate':
            verifier = verifier or certificates(engine(budget=budget), budget)
            try:
                verifier.verify(doc)
            except VerificationFailed as e:
                report.violations.append(f"{e.equation}: {e}")
            except KrsError as e:
                click.echo(f"{report.subject}: {type(e).__name__}: {e}", err=True)
                exit_code = max(exit_code, e.exit_code)
                continue
        if report.ok:
            click.echo(f"{report.subject}: ok")
            continue
        click.echo(f"{report.subject}: {len(report.violations)} violation(s)")
        for line in report.violations:
            click.echo(f"  {line}")
        exit_code = max(exit_code, 1)
    sys.exit(exit_code)
