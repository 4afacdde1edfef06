"""Command-line blueprints for the decomposition engine."""
from app.commands.documents import documents_bp
from app.commands.decompose import decompose_bp
from app.commands.certify import certify_bp

__all__ = ['documents_bp', 'decompose_bp', 'certify_bp']
