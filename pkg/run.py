"""Entry point for the command-line interface."""
import os

from flask.cli import FlaskGroup

from app import create_app


def make_app():
    # Determine environment - default to production
    return create_app(os.environ.get('FLASK_ENV', 'production'))


cli = FlaskGroup(create_app=make_app, add_default_commands=False,
                 help='Krull-Remak-Schmidt decompositions and their certificates.')

if __name__ == '__main__':
    cli()
