"""
Configuration loader utility
"""

import yaml
import os
from pathlib import Path
from typing import Dict, Any

from dotenv import load_dotenv

PROJECT_ROOT = Path(__file__).parent.parent.parent

# (environment variable, config path, type)
ENV_OVERRIDES = [
    ('EC_SEED', ('random_seed',), int),
    ('EC_SAMPLES', ('monte_carlo', 'samples'), int),
    ('EC_WORKERS', ('monte_carlo', 'workers'), int),
    ('EC_LOG_LEVEL', ('logging', 'level'), str),
    ('EC_LOG_DIR', ('logging', 'output_dir'), str),
]


def load_config(config_path: str = None) -> Dict[str, Any]:
    """
    Load configuration from YAML file

    Args:
        config_path: Path to config file (default: config/config.yaml)

    Returns:
        Configuration dictionary
    """
    if config_path is None:
        config_path = PROJECT_ROOT / "config" / "config.yaml"
    else:
        config_path = Path(config_path)

    if not config_path.exists():
        raise FileNotFoundError(f"Config file not found: {config_path}")

    with open(config_path, 'r') as f:
        config = yaml.safe_load(f) or {}

    load_dotenv(PROJECT_ROOT / ".env")
    config = _apply_env_overrides(config)

    return config


def _apply_env_overrides(config: Dict[str, Any]) -> Dict[str, Any]:
    """Apply environment variable overrides to config"""
    for variable, path, cast in ENV_OVERRIDES:
        if variable not in os.environ:
            continue
        section = config
        for key in path[:-1]:
            section = section.setdefault(key, {})
        section[path[-1]] = cast(os.environ[variable])

    return config
