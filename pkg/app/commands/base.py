"""Shared plumbing for the command-line blueprints."""
import functools
import logging
import sys

import click

from app.errors import KrsError
from app.services.certificate_service import CertificateService
from app.services.document_service import DocumentService
from app.services.idempotent_service import IdempotentService
from app.services.krs_service import KrsService
from app.services.module_service import ModuleService
from app.services.oracle_service import OracleService

logger = logging.getLogger(__name__)

seed_option = click.option('--seed', type=click.IntRange(min=0), default=None,
                           help='Seed for every random choice (default KRS_SEED).')
budget_option = click.option('--budget', type=click.IntRange(min=1), default=None,
                             help='Largest p^dim enumerated exhaustively (default KRS_BUDGET).')
trials_option = click.option('--trials', type=click.IntRange(min=0), default=None,
                             help='Random draws for the idempotent search (default KRS_TRIALS).')
out_option = click.option('--out', type=click.Path(dir_okay=False, writable=True), default=None,
                          help='Write the certificate here instead of stdout.')


def krs_command(f):
    """Translate engine errors into the exit-code contract with a one-line message on stderr."""
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except KrsError as e:
            click.echo(f"error: {type(e).__name__}: {e}", err=True)
            for line in getattr(e, 'violations', [])[:20]:
                click.echo(f"  {line}", err=True)
            if getattr(e, 'equation', ''):
                click.echo(f"  failing equation: {e.equation}", err=True)
            sys.exit(e.exit_code)
    return wrapper


def engine(seed=None, budget=None, trials=None) -> KrsService:
    modules = ModuleService(seed=seed)
    idempotents = IdempotentService(modules, seed=seed, budget=budget, trials=trials)
    return KrsService(modules, idempotents, seed=seed, budget=budget)


def certificates(krs: KrsService, budget=None) -> CertificateService:
    return CertificateService(krs, OracleService(krs.modules, budget=budget), budget=budget)


def emit(doc, out=None):
    """Write a document to ``out`` or print it."""
    text = DocumentService().write_json(doc, out)
    if not out:
        click.echo(text, nl=False)

