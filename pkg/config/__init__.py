"""
Config Package Initialization.

This package provides the simulator's configuration layer:
- `settings`: process-wide defaults loaded from the environment (`.env` supported).
- `scenario`: per-run scenario parsing, validation and the run manifest.

`scenario` is imported explicitly (`from config.scenario import parse_config`)
so that loading `settings` never pulls in the rest of the package.
"""

import logging
import os

from dotenv import load_dotenv

logger = logging.getLogger("Config")

# Load environment variables from a .env file next to this package, if present
dotenv_path = os.path.join(os.path.dirname(__file__), ".env")
if os.path.exists(dotenv_path):
    load_dotenv(dotenv_path)
    logger.info(".env file loaded successfully.")
else:
    logger.debug(".env file not found. Using system environment variables.")

from config import settings  # noqa: E402

__all__ = ["settings"]
