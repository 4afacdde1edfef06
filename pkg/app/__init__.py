"""
KRS Certifier - Flask Application Factory
Krull-Remak-Schmidt decompositions of modules over finite-dimensional
algebras, with certificates that can be re-checked by exact arithmetic.
"""
import logging

from flask import Flask

__version__ = '1.0.0'


def create_app(config_name='development'):
    """Create and configure the Flask application."""
    app = Flask(__name__)

    # Load configuration
    from app.config import config
    app.config.from_object(config[config_name])

    # Engine modules log under the application logger
    app.logger.setLevel(getattr(logging, str(app.config['KRS_LOG_LEVEL']).upper(), logging.INFO))

    # Register command blueprints
    from app.commands.documents import documents_bp
    from app.commands.decompose import decompose_bp
    from app.commands.certify import certify_bp

    app.register_blueprint(documents_bp)
    app.register_blueprint(decompose_bp)
    app.register_blueprint(certify_bp)

    return app
