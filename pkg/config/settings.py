"""
Configuration settings for the rate allocation simulator.
Handles environment variables and protocol defaults.
"""
import logging
import os
from pathlib import Path

from dotenv import load_dotenv

logger = logging.getLogger(__name__)


class Settings:
    """Application settings and configuration."""

    def __init__(self):
        # Load environment variables
        self._load_environment()

        # Project paths
        self.PROJECT_ROOT = Path(__file__).parent.parent
        self.OUTPUT_FOLDER = Path(os.getenv("RATE_OUTPUT_DIR", self.PROJECT_ROOT / "output"))
        self.LOGS_FOLDER = Path(os.getenv("RATE_LOGS_DIR", self.PROJECT_ROOT / "logs"))

        # Protocol configuration
        self.DELTA = self._float("RATE_DELTA", 1e-3)
        self.MAX_ITERS = self._int("RATE_MAX_ITERS", 10000)
        self.INITIAL_BID = self._float("RATE_INITIAL_BID", 1.0)
        self.STALL_WINDOW = self._int("RATE_STALL_WINDOW", 50)
        self.SPLIT = os.getenv("RATE_SPLIT", "proportional").strip().lower()

        # Sweep and oracle configuration
        self.RADAR_CAP = self._float("RATE_RADAR_CAP", 200.0)
        self.ORACLE_TOL = self._float("RATE_ORACLE_TOL", 1e-12)
        self.CERTIFY_TOL = 1e-3

    def _load_environment(self):
        """Load environment variables from .env file."""
        env_path = Path(__file__).parent.parent / ".env"
        if env_path.exists():
            load_dotenv(dotenv_path=env_path)
        else:
            logger.debug(".env file not found; using defaults and process environment")

    @staticmethod
    def _float(name, default):
        raw = os.getenv(name)
        if raw is None or raw == "":
            return default
        try:
            return float(raw)
        except ValueError:
            raise ValueError(f"{name} must be a number, got {raw!r}")

    @staticmethod
    def _int(name, default):
        raw = os.getenv(name)
        if raw is None or raw == "":
            return default
        try:
            return int(raw)
        except ValueError:
            raise ValueError(f"{name} must be an integer, got {raw!r}")

    def ensure_directories(self):
        """Create output and log directories."""
        for directory in [self.OUTPUT_FOLDER, self.LOGS_FOLDER]:
            directory.mkdir(parents=True, exist_ok=True)

    def validate(self):
        """Validate that protocol settings are usable."""
        checks = [
            ("RATE_DELTA", self.DELTA > 0),
            ("RATE_MAX_ITERS", self.MAX_ITERS >= 1),
            ("RATE_INITIAL_BID", self.INITIAL_BID > 0),
            ("RATE_STALL_WINDOW", self.STALL_WINDOW >= 1),
            ("RATE_SPLIT", self.SPLIT in ("proportional", "equal")),
            ("RATE_RADAR_CAP", self.RADAR_CAP >= 0),
            ("RATE_ORACLE_TOL", self.ORACLE_TOL > 0),
        ]

        invalid_vars = [name for name, ok in checks if not ok]

        if invalid_vars:
            raise ValueError(f"Invalid settings: {', '.join(invalid_vars)}")

        return True


# Create a global settings instance
settings = Settings()
