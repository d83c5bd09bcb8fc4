import logging
from dataclasses import dataclass
from os import getenv
from typing import Optional

from src.app.config import Config, config
from src.domain_model import ConfigError
from src.experiment_model import ExperimentRunner, load_catalogue
from src.experiments import EXPERIMENTS

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


@dataclass
class Application:
    settings: type[Config]
    runner: ExperimentRunner


def create_app(environment: Optional[str] = None, quiet: bool = False) -> Application:
    environment = environment or getenv("ENV", "development")
    if environment not in config:
        raise ConfigError(f"unknown environment '{environment}'")
    settings = config[environment]
    level = logging.WARNING if quiet else getattr(logging, settings.LOG_LEVEL, logging.INFO)
    logging.basicConfig(level=level, format=LOG_FORMAT)
    logging.getLogger().setLevel(level)

    runner = ExperimentRunner(load_catalogue(), EXPERIMENTS, parallel=settings.PARALLEL)
    return Application(settings=settings, runner=runner)
