# src/sparsedfm/config/manager.py
import json
import logging
from pathlib import Path
from typing import Any, Dict

from ..errors import ModelError
from .options import FitConfig

logger = logging.getLogger(__name__)

__all__ = ["CONFIGURABLE_KEYS", "ConfigManager"]

# Fields a user may pin in config.json; r stays per-call
CONFIGURABLE_KEYS = (
    "q",
    "alphas",
    "alg",
    "err",
    "engine",
    "store_all_alphas",
    "standardize",
    "max_iter",
    "threshold",
)


class ConfigManager:
    def __init__(self):
        self.config_dir = Path.home() / ".sparsedfm"
        self.config_file = self.config_dir / "config.json"

    def ensure_config_dir(self):
        """Create config directory if it doesn't exist"""
        self.config_dir.mkdir(parents=True, exist_ok=True)
        if not self.config_file.exists():
            self.save_config({})

    def load_config(self) -> Dict:
        """Load configuration from file"""
        try:
            if self.config_file.exists():
                return json.loads(self.config_file.read_text())
            return {}
        except json.JSONDecodeError:
            logger.warning("Ignoring unreadable config file %s", self.config_file)
            return {}

    def save_config(self, config: Dict):
        """Save configuration to file"""
        self.config_dir.mkdir(parents=True, exist_ok=True)
        self.config_file.write_text(json.dumps(config, indent=2))

    def set_default(self, key: str, value: Any):
        """Pin a FitConfig default

        Args:
            key: FitConfig field name
            value: New default, validated by building a FitConfig with it

        Raises:
            ModelError: Unknown key or invalid value
        """
        if key not in CONFIGURABLE_KEYS:
            raise ModelError(
                f"Unknown setting '{key}'; choose from {', '.join(CONFIGURABLE_KEYS)}"
            )
        config = self.load_config()
        defaults = dict(config.get("defaults", {}))
        defaults[key] = value
        FitConfig.from_dict(defaults)
        config["defaults"] = defaults
        self.save_config(config)

    def fit_defaults(self) -> Dict[str, Any]:
        """Effective FitConfig defaults: package defaults plus user overrides

        Returns:
            Dict in FitConfig.to_dict() form
        """
        overrides = {
            k: v
            for k, v in self.load_config().get("defaults", {}).items()
            if k in CONFIGURABLE_KEYS
        }
        try:
            return FitConfig.from_dict(overrides).to_dict()
        except ModelError:
            logger.warning("Ignoring invalid defaults in %s", self.config_file)
            return FitConfig().to_dict()

    def reset_all(self):
        """Reset all configuration"""
        self.save_config({})
