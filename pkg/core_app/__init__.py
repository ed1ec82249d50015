from flask import Flask
from typing import Any, Dict, Optional

from .config import Config
from .logging_config import configure_logging
from database.db import init_db


def create_app(overrides: Optional[Dict[str, Any]] = None) -> Flask:
    """Create and configure the Flask application."""
    configure_logging()
    app = Flask(__name__)
    app.config.from_object(Config)
    if overrides:
        app.config.update(overrides)
    init_db(app)

    from routes.health_routes import health_bp
    from routes.experiment_routes import experiments_bp

    app.register_blueprint(health_bp, url_prefix="/api/health")
    app.register_blueprint(experiments_bp, url_prefix="/api/experiments")

    return app
