import copy
import json
import logging
from pathlib import Path

import jsonschema

_COUNT = {"type": "integer", "minimum": 1}

SETTINGS_SCHEMA = {
    "type": "object",
    "properties": {
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "default_eps": {"type": "number", "minimum": 0},
        "eps_grid_depth": _COUNT,
        "comparison_grid_points": {"type": "integer", "minimum": 3},
        "oracle": {
            "type": "object",
            "properties": {"max_points": _COUNT, "max_ambient": _COUNT, "max_parts": _COUNT},
        },
        "report": {
            "type": "object",
            "properties": {"indent": {"type": "integer", "minimum": 0}, "schema": {"type": "string"}},
        },
        "log_level": {"enum": ["DEBUG", "INFO", "WARNING", "ERROR"]},
        "random_instance": {
            "type": "object",
            "properties": {
                "points": _COUNT, "members": _COUNT, "dimension": _COUNT,
                "norm": {"enum": ["sup", "euclid", "l1"]},
            },
        },
    },
}


class ConfigManager:
    """Manages configuration loading, saving, and defaults"""

    def __init__(self, base_dir=None):
        if base_dir is None:
            # Use current working directory if no base_dir provided
            base_dir = Path.cwd()
        self.base_dir = Path(base_dir)
        self.configs_dir = self.base_dir / "configurations"
        self.configs_dir.mkdir(parents=True, exist_ok=True)

    def get_default_config(self):
        """Get default configuration"""
        return {
            "tolerance": 1e-9,
            "seed": 0,
            "default_eps": 0.5,
            "eps_grid_depth": 6,
            "comparison_grid_points": 1025,
            "oracle": {
                "max_points": 16,
                "max_ambient": 8,
                "max_parts": 4
            },
            "report": {
                "indent": 2,
                "schema": "lipcert/1"
            },
            "log_level": "INFO",
            "random_instance": {
                "points": 8,
                "members": 5,
                "dimension": 2,
                "norm": "sup"
            }
        }

    def get_config_file_path(self, config_name):
        """Get file path for configuration"""
        if config_name == "Default":
            return self.base_dir / "lipcert_config.json"
        return self.configs_dir / f"{config_name}.json"

    def get_available_configs(self):
        """Get list of available configurations"""
        configs = ["Default"]
        try:
            for file in sorted(self.configs_dir.glob("*.json")):
                configs.append(file.stem)
        except OSError as e:
            logging.warning(f"Could not list configurations in {self.configs_dir}: {e}")
        return configs

    def load_config(self, config_name):
        """Load configuration; nested sections are merged key by key over the defaults"""
        config = self.get_default_config()
        config_file = self.get_config_file_path(config_name)

        if config_file.exists():
            try:
                with open(config_file, 'r') as f:
                    loaded = json.load(f)
                for key, value in loaded.items():
                    if isinstance(value, dict) and isinstance(config.get(key), dict):
                        config[key].update(value)
                    else:
                        config[key] = value
                logging.info(f"Configuration for '{config_name}' successfully loaded from {config_file}")
            except (OSError, ValueError, AttributeError) as e:
                logging.warning(f"Failed to load configuration from {config_file}: {e}")
        elif config_name != "Default":
            logging.warning(f"Configuration '{config_name}' not found at {config_file}; using defaults")

        problems = self.validate_config(config)
        if problems:
            for problem in problems:
                logging.warning(f"Configuration '{config_name}': {problem}")
            logging.warning(f"Configuration '{config_name}' is invalid; using defaults")
            return self.get_default_config()
        return config

    def validate_config(self, config):
        """List of schema violations, empty when the settings are usable"""
        validator = jsonschema.Draft202012Validator(SETTINGS_SCHEMA)
        return [f"{'.'.join(str(p) for p in error.absolute_path) or '<root>'}: {error.message}"
                for error in sorted(validator.iter_errors(config), key=lambda e: [str(p) for p in e.absolute_path])]

    def save_config(self, config_name, config):
        """Save configuration"""
        config_file = self.get_config_file_path(config_name)
        try:
            config_file.parent.mkdir(parents=True, exist_ok=True)
            with open(config_file, 'w') as f:
                json.dump(copy.deepcopy(config), f, indent=2)
            logging.info(f"Configuration for '{config_name}' successfully saved to {config_file}")
            return True
        except (OSError, TypeError) as e:
            logging.error(f"Failed to save configuration to {config_file}: {e}")
            return False

    def delete_config(self, config_name):
        """Delete configuration"""
        if config_name == "Default":
            return False

        config_file = self.get_config_file_path(config_name)
        try:
            if config_file.exists():
                config_file.unlink()
            logging.info(f"Configuration '{config_name}' deleted from {config_file}")
            return True
        except OSError as e:
            logging.error(f"Failed to delete configuration '{config_name}' at {config_file}: {e}")
            return False
