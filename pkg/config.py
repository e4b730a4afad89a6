"""
File: config.py
Settings read from the environment, with an optional .env file in the working
directory loaded first. Command-line flags override these values.
"""

import logging
import os
from typing import Optional

from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)


def _int_setting(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}; using {default}")
        return default


LLM_ENDPOINT: Optional[str] = os.getenv("HBTP_LLM_ENDPOINT")
LLM_MODEL: str = os.getenv("HBTP_LLM_MODEL", "gpt-4o")
LLM_KEY: Optional[str] = os.getenv("HBTP_LLM_KEY") or os.getenv("OPENAI_API_KEY")
LLM_CACHE: Optional[str] = os.getenv("HBTP_LLM_CACHE")
LOG_LEVEL: str = os.getenv("HBTP_LOG_LEVEL", "INFO").upper()
BUDGET_MS: int = _int_setting("HBTP_BUDGET_MS", 5000)
WORKERS: int = _int_setting("HBTP_WORKERS", os.cpu_count() or 1)


def configure_logging(level: Optional[str] = None) -> None:
    """Applies the log level to the root logger; modules keep their own basicConfig defaults."""
    name = (level or LOG_LEVEL).upper()
    logging.getLogger().setLevel(getattr(logging, name, logging.INFO))
