"""Application configuration settings."""
import os
from dotenv import load_dotenv
from flask import current_app, has_app_context

load_dotenv()


class Config:
    """Base configuration."""
    SECRET_KEY = os.environ.get('SECRET_KEY', 'dev-key-change-me')

    # Randomness: every seeded operation defaults to this seed
    KRS_SEED = int(os.environ.get('KRS_SEED', 0))

    # Exhaustive enumeration bound (elements of an algebra, p^dim)
    KRS_BUDGET = int(os.environ.get('KRS_BUDGET', 65536))

    # Random draws for the idempotent search
    KRS_TRIALS = int(os.environ.get('KRS_TRIALS', 64))

    # Isomorphism search: random Hom combinations, then enumeration up to this many
    KRS_ISO_TRIALS = int(os.environ.get('KRS_ISO_TRIALS', 32))
    KRS_ISO_ENUMERATION_LIMIT = int(os.environ.get('KRS_ISO_ENUMERATION_LIMIT', 65536))

    # Idempotents sampled per module by the main-theorem harness
    KRS_IDEMPOTENT_SAMPLE = int(os.environ.get('KRS_IDEMPOTENT_SAMPLE', 16))

    # Hom/End cache entries
    KRS_CACHE_SIZE = int(os.environ.get('KRS_CACHE_SIZE', 256))

    KRS_LOG_LEVEL = os.environ.get('KRS_LOG_LEVEL', 'INFO')

    # Document database
    CORPUS_DIR = os.environ.get(
        'CORPUS_DIR',
        os.path.join(os.path.dirname(os.path.dirname(__file__)), 'corpus-db')
    )


class DevelopmentConfig(Config):
    """Development configuration."""
    DEBUG = True
    TESTING = False
    KRS_LOG_LEVEL = os.environ.get('KRS_LOG_LEVEL', 'DEBUG')


class ProductionConfig(Config):
    """Production configuration."""
    DEBUG = False
    TESTING = False


class TestingConfig(Config):
    """Testing configuration."""
    DEBUG = True
    TESTING = True
    KRS_LOG_LEVEL = 'WARNING'


config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': ProductionConfig
}


def setting(key: str, default=None):
    """Read a configuration value, falling back to the base Config outside an app context."""
    if has_app_context():
        return current_app.config.get(key, getattr(Config, key, default))
    return getattr(Config, key, default)
