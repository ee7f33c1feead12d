"""Utility modules"""

from .logger import setup_logger
from .config_loader import load_config

__all__ = ['setup_logger', 'load_config']
