"""Environment-driven defaults and logging setup"""
import logging
import os

# Defaults (can be overridden via environment variables)
DEFAULT_PRIME = int(os.getenv("S3COH_PRIME", "7"))
DEFAULT_MAX_GEN = int(os.getenv("S3COH_MAX_GEN", "9"))
DEFAULT_MAY_BOUND = int(os.getenv("S3COH_MAY_BOUND", "11"))
DEFAULT_BASIS_CAP = int(os.getenv("S3COH_BASIS_CAP", "200000"))
LOG_LEVEL = os.getenv("S3COH_LOG_LEVEL", "INFO")

# Primes below this are accepted for oracle runs only
TOPOLOGICAL_MIN_PRIME = 7

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str = None) -> None:
    """Install a single stream handler on the package logger"""
    logger = logging.getLogger("app")
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
    logger.setLevel((level or LOG_LEVEL).upper())
