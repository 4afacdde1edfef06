"""Uniqueness, conjugacy, oracle and verification commands."""
import sys

import click
from flask import Blueprint

from app.commands.base import (
    budget_option, certificates, emit, engine, krs_command, out_option, seed_option, trials_option
)

certify_bp = Blueprint('certify', __name__, cli_group=None)


@certify_bp.cli.command('equiv')
@click.argument('first', type=click.Path(exists=True, dir_okay=False))
@click.argument('second', type=click.Path(exists=True, dir_okay=False))
@seed_option
@out_option
@krs_command
def equiv(first, second, seed, out):
    """Certify that two decomposition certificates of one module are equivalent."""
    from app.errors import ValidationFailed
    from app.services.document_service import DocumentService

    documents = DocumentService()
    krs = engine(seed)
    service = certificates(krs)
    D1 = service.decomposition_from_certificate(documents.read_json(first))
    D2 = service.decomposition_from_certificate(documents.read_json(second))
    if D1.parent != D2.parent:
        raise ValidationFailed("The certificates decompose different modules")
    cert = krs.check_equivalence(D1, D2)
    emit(service.equivalence_certificate(D1, D2, cert, krs.seed), out)


@certify_bp.cli.command('conjugate')
@click.argument('algebra_path', type=click.Path(exists=True, dir_okay=False))
@click.argument('first', type=click.Path(exists=True, dir_okay=False))
@click.argument('second', type=click.Path(exists=True, dir_okay=False))
@seed_option
@budget_option
@out_option
@krs_command
def conjugate(algebra_path, first, second, seed, budget, out):
    """Find a unit conjugating one complete primitive idempotent set onto another."""
    from app.services.document_service import DocumentService

    documents = DocumentService()
    A = documents.load_algebra(algebra_path)
    E = documents.load_idempotents(first, A)
    F = documents.load_idempotents(second, A)
    krs = engine(seed, budget)
    cert = krs.conjugator(A, E, F)
    emit(certificates(krs, budget).conjugation_certificate(cert, krs.seed), out)


@certify_bp.cli.command('oracle')
@click.argument('path', type=click.Path(exists=True, dir_okay=False))
@budget_option
@out_option
@krs_command
def oracle(path, budget, out):
    """
    Exhaustive ground truth: the primitivity report of an algebra, or the
    oracle decomposition of a module.
    """
    from app.models.algebra import StructureAlgebra
    from app.services.document_service import DocumentService

    subject = DocumentService().load_algebra_or_module(path)
    krs = engine(budget=budget)
    service = certificates(krs, budget)
    if isinstance(subject, StructureAlgebra):
        report = service.oracle.lemma3_check(subject)
        click.echo(f"{report.idempotent_count} idempotents, {len(report.entries)} nonzero checked", err=True)
        emit(service.lemma3_certificate(subject, report, service.oracle.budget), out)
    else:
        D = service.oracle.oracle_decompose(subject)
        emit(service.decomposition_certificate(D), out)


@certify_bp.cli.command('verify')
@click.argument('certificate', type=click.Path(exists=True, dir_okay=False))
@click.argument('inputs', nargs=-1, type=click.Path(exists=True, dir_okay=False))
@budget_option
@krs_command
def verify(certificate, inputs, budget):
    """Re-check every equation of a certificate by exact arithmetic."""
    from app.services.document_service import DocumentService

    documents = DocumentService()
    doc = documents.read_json(certificate)
    subjects = [documents.load_algebra_or_module(path) for path in inputs]
    krs = engine(budget=budget)
    checked = certificates(krs, budget).verify(doc, subjects)
    for line in checked:
        click.echo(f"ok  {line}")
    click.echo(f"{certificate}: verified ({len(checked)} checks)")


@certify_bp.cli.command('theorem')
@click.argument('module_paths', nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option('--random', 'random_count', type=click.IntRange(min=0), default=0,
              help='Random modules added to the corpus.')
@seed_option
@budget_option
@trials_option
@out_option
@krs_command
def theorem(module_paths, random_count, seed, budget, trials, out):
    """
    Run the Krull-Schmidt checks on the given modules (default: the fixed
    corpus) and write a main-theorem certificate. Exit 1 when a check fails.
    """
    from app.services.corpus_service import CorpusService
    from app.services.document_service import DocumentService

    documents = DocumentService()
    krs = engine(seed, budget, trials)
    corpus_service = CorpusService(documents, krs.modules)
    corpus = [documents.load_module(path) for path in module_paths] or corpus_service.fixed_corpus()
    corpus += corpus_service.random_corpus(random_count, krs.seed)
    report = krs.verify_main_theorem(corpus)
    emit(certificates(krs, budget).main_theorem_certificate(corpus, report, krs.seed, krs.budget), out)
    for failure in report.failures():
        click.echo(f"module {failure.module}: {failure.check} failed: {failure.detail}", err=True)
    if not report.ok:
        sys.exit(1)
