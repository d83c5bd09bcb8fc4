import os

from dotenv import load_dotenv

load_dotenv()


def _flag(name: str, default: str = "0") -> bool:
    return os.environ.get(name, default).strip().lower() in ("1", "true", "yes", "on")


class Config:
    """Base configuration"""

    LOG_LEVEL = os.environ.get("LOG_LEVEL", "INFO").upper()
    DEBUG_DIR = os.environ.get("FRAMES_DEBUG_DIR") or None
    PARALLEL = _flag("FRAMES_PARALLEL")
    OUTPUT_FORMAT = os.environ.get("FRAMES_OUTPUT_FORMAT", "json")


class DevelopmentConfig(Config):
    DEBUG_DIR = os.environ.get("FRAMES_DEBUG_DIR", "debug_states")


class TestingConfig(Config):
    LOG_LEVEL = "WARNING"
    DEBUG_DIR = None
    PARALLEL = False


class ProductionConfig(Config):
    pass


config: dict[str, type[Config]] = {
    "development": DevelopmentConfig,
    "testing": TestingConfig,
    "production": ProductionConfig,
}
