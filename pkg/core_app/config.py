import os


class Config:
    VERSION = "0.1.0"

    SECRET_KEY = os.getenv("SECRET_KEY", "secret-key")

    BASE_DIR = os.path.abspath(os.path.dirname(__file__))

    OUTPUT_DIR = os.getenv("AUCTION_SIM_OUTPUT_DIR", "results")
    WORKERS = int(os.getenv("AUCTION_SIM_WORKERS", "1"))
    LOG_LEVEL = os.getenv("AUCTION_SIM_LOG_LEVEL", "INFO")
    GAMMA = float(os.getenv("AUCTION_SIM_GAMMA", "3.0"))

    # HTTP runs are synchronous; keep them to desk-scale horizons
    MAX_HTTP_ROUNDS = int(os.getenv("AUCTION_SIM_MAX_HTTP_ROUNDS", "2000000"))

    _db_url = os.getenv("DATABASE_URL", "sqlite:///experiments.db")
    # Render and some providers may expose postgres:// URLs that SQLAlchemy doesn't accept.
    SQLALCHEMY_DATABASE_URI = _db_url.replace("postgres://", "postgresql://", 1)
    SQLALCHEMY_TRACK_MODIFICATIONS = False
