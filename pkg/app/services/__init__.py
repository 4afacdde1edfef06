"""Services for the decomposition engine."""
from app.services.module_service import ModuleService
from app.services.idempotent_service import IdempotentService
from app.services.krs_service import KrsService
from app.services.oracle_service import OracleService
from app.services.document_service import DocumentService
from app.services.certificate_service import CertificateService
from app.services.corpus_service import CorpusService

__all__ = [
    'ModuleService',
    'IdempotentService',
    'KrsService',
    'OracleService',
    'DocumentService',
    'CertificateService',
    'CorpusService'
]
