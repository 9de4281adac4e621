"""
Settings and logging for degree0.

Numeric settings come from `DEGREE0_*` environment variables, a `.env` file in
the working directory, or a file passed with `--config` (.env or YAML).
"""

import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from dotenv import load_dotenv

# PyYAML is optional; only YAML config files need it
try:
    import yaml
    YAML_AVAILABLE = True
except ImportError:
    YAML_AVAILABLE = False


ENV_PREFIX = "DEGREE0_"
DOTENV_SUFFIXES = ("", ".env")
YAML_SUFFIXES = (".yaml", ".yml")
CONFIG_SUFFIXES = DOTENV_SUFFIXES + YAML_SUFFIXES

DEFAULT_PRECISION_BITS = 64
DEFAULT_MAX_RADICANDS = 8
DEFAULT_SAMPLE_RETRIES = 1000
DEFAULT_WORKERS = 1
DEFAULT_HOPF_BOUND = 24

# setting name -> default
INT_SETTINGS: Dict[str, int] = {
    "precision_bits": DEFAULT_PRECISION_BITS,
    "max_radicands": DEFAULT_MAX_RADICANDS,
    "sample_retries": DEFAULT_SAMPLE_RETRIES,
    "workers": DEFAULT_WORKERS,
    "hopf_bound": DEFAULT_HOPF_BOUND,
}


def env_name(setting: str) -> str:
    return ENV_PREFIX + setting.upper()


class JSONFormatter(logging.Formatter):
    """One JSON object per record, written to stderr so stdout stays machine-readable."""

    def format(self, record: logging.LogRecord) -> str:
        entry: Dict[str, Any] = {
            "timestamp": self.formatTime(record),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
        }
        if record.exc_info:
            entry["exception"] = self.formatException(record.exc_info)
        return json.dumps(entry)


class Config:
    """Resolved settings for one run."""

    def __init__(self, config_file: Optional[str] = None, debug: bool = False, setup_logging: bool = True):
        """
        Args:
            config_file: Optional .env or YAML file layered over the environment
            debug: Log at DEBUG instead of INFO
            setup_logging: Install the JSON handler on the root logger; library callers pass False
        """
        self.debug = debug
        self.config_file = config_file
        self._load_config()
        if setup_logging:
            self._setup_logging()

    def _load_config(self):
        local_env = Path(".env")
        if local_env.exists():
            load_dotenv(local_env)

        if not self.config_file:
            return
        path = Path(self.config_file)
        if not path.exists():
            raise FileNotFoundError(f"Config file not found: {self.config_file}")

        suffix = path.suffix.lower()
        if suffix in DOTENV_SUFFIXES:
            load_dotenv(path)
        elif suffix in YAML_SUFFIXES:
            self._load_yaml(path)
        else:
            raise ValueError(f"Unsupported config file format: {path.suffix}")

    @staticmethod
    def _load_yaml(path: Path):
        if not YAML_AVAILABLE:
            raise ImportError("PyYAML is required for YAML config files. Install with: pip install PyYAML")
        with open(path, "r") as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, Mapping):
            raise ValueError(f"YAML config must be a mapping, got {type(data).__name__}")

        # a `degree0:` section uses bare setting names
        section = data.get("degree0")
        if isinstance(section, Mapping):
            for name, value in section.items():
                os.environ[env_name(str(name))] = str(value)
        for key, value in data.items():
            if key != "degree0":
                os.environ[str(key)] = str(value)

    def _setup_logging(self):
        level = logging.DEBUG if self.debug else logging.INFO

        root = logging.getLogger()
        root.setLevel(level)
        for handler in root.handlers[:]:
            root.removeHandler(handler)
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(JSONFormatter())
        root.addHandler(handler)

        logging.getLogger("degree0").setLevel(level)

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        return os.getenv(key, default)

    def get_required(self, key: str) -> str:
        value = os.getenv(key)
        if value is None:
            raise ValueError(f"Required environment variable not set: {key}")
        return value

    def get_int(self, key: str, default: int) -> int:
        """Integer from the environment; blank means default, anything non-integer is an error."""
        raw = os.getenv(key)
        if raw is None or not raw.strip():
            return default
        try:
            return int(raw.strip())
        except ValueError:
            raise ValueError(f"Environment variable {key} must be an integer, got {raw!r}") from None

    def _setting(self, name: str) -> int:
        return self.get_int(env_name(name), INT_SETTINGS[name])

    def as_dict(self) -> Dict[str, int]:
        return {name: self._setting(name) for name in INT_SETTINGS}

    @property
    def precision_bits(self) -> int:
        """Starting precision for interval sign determination."""
        return self._setting("precision_bits")

    @property
    def max_radicands(self) -> int:
        return self._setting("max_radicands")

    @property
    def sample_retries(self) -> int:
        """Resampling cap used by the moduli samplers."""
        return self._setting("sample_retries")

    @property
    def workers(self) -> int:
        return self._setting("workers")

    @property
    def hopf_bound(self) -> int:
        """Height bound for the Hopf bounded dependence search."""
        return self._setting("hopf_bound")


_config: Optional[Config] = None


def get_config() -> Config:
    """Configuration installed by the CLI."""
    if _config is None:
        raise RuntimeError("Configuration not initialized. Call init_config() first.")
    return _config


def init_config(config_file: Optional[str] = None, debug: bool = False) -> Config:
    global _config
    _config = Config(config_file=config_file, debug=debug)
    return _config


def settings() -> Config:
    """
    Configuration for library code.

    Returns the CLI-initialised configuration when there is one, otherwise a
    default configuration that reads the environment but leaves logging alone.
    """
    global _config
    if _config is None:
        _config = Config(setup_logging=False)
    return _config
