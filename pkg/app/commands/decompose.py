"""Decomposition, endomorphism and idempotent commands."""
import click
from flask import Blueprint

from app.commands.base import (
    budget_option, certificates, emit, engine, krs_command, out_option, seed_option, trials_option
)
from app.errors import InconclusiveLocality

decompose_bp = Blueprint('decompose', __name__, cli_group=None)


@decompose_bp.cli.command('decompose')
@click.argument('module_path', type=click.Path(exists=True, dir_okay=False))
@seed_option
@budget_option
@trials_option
@out_option
@krs_command
def decompose(module_path, seed, budget, trials, out):
    """Write a Krull-Remak-Schmidt decomposition certificate for a module."""
    from app.services.document_service import DocumentService

    M = DocumentService().load_module(module_path)
    krs = engine(seed, budget, trials)
    D = krs.krs_decompose(M)
    emit(certificates(krs, budget).decomposition_certificate(D), out)
    if not D.conclusive:
        raise InconclusiveLocality("Decomposition relies on Monte Carlo locality verdicts; "
                                   "certificate flagged as inconclusive")


@decompose_bp.cli.command('endo')
@click.argument('path', type=click.Path(exists=True, dir_okay=False))
@seed_option
@budget_option
@trials_option
@out_option
@krs_command
def endo(path, seed, budget, trials, out):
    """
    Endomorphism algebra of a module with its locality verdict, or the
    locality verdict of an algebra.
    """
    from app.models.algebra import StructureAlgebra
    from app.services.document_service import DocumentService

    subject = DocumentService().load_algebra_or_module(path)
    krs = engine(seed, budget, trials)
    service = certificates(krs, budget)
    if isinstance(subject, StructureAlgebra):
        verdict = krs.idempotents.is_local(subject)
        emit(service.locality_certificate(verdict, krs.seed), out)
    else:
        end = krs.modules.end_algebra(subject)
        verdict = krs.idempotents.is_local(end.algebra, trusted=True)
        emit(service.endomorphism_certificate(end, verdict, krs.seed), out)
    if not verdict.conclusive:
        raise InconclusiveLocality("Local verdict is Monte Carlo; certificate flagged as inconclusive")


@decompose_bp.cli.command('idempotents')
@click.argument('path', type=click.Path(exists=True, dir_okay=False))
@seed_option
@budget_option
@trials_option
@out_option
@krs_command
def idempotents(path, seed, budget, trials, out):
    """Complete primitive orthogonal idempotents of an algebra, or of End(M) for a module."""
    from app.models.algebra import StructureAlgebra
    from app.services.document_service import DocumentService

    subject = DocumentService().load_algebra_or_module(path)
    krs = engine(seed, budget, trials)
    service = certificates(krs, budget)
    if isinstance(subject, StructureAlgebra):
        es, D = krs.algebra_idempotents(subject)
        emit(service.idempotents_certificate(subject, es, krs.seed), out)
    else:
        D = krs.krs_decompose(subject)
        es = krs.idempotents_from_decomposition(D)
        emit(service.idempotents_certificate(krs.modules.end_algebra(subject), es, krs.seed), out)
    if not D.conclusive:
        raise InconclusiveLocality("Idempotents rest on Monte Carlo locality verdicts")
