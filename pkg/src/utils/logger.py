"""
Logging utility with JSON structured logging support
"""

import logging
import json
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, Any

from colorama import Fore, Style, just_fix_windows_console


class JSONFormatter(logging.Formatter):
    """Custom formatter for JSON structured logs"""

    def format(self, record: logging.LogRecord) -> str:
        log_data = {
            "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno
        }

        # Add extra fields if present
        if hasattr(record, 'extra'):
            log_data.update(record.extra)

        return json.dumps(log_data, default=str)


class ColoredFormatter(logging.Formatter):
    """Colored console formatter"""

    COLORS = {
        'DEBUG': Fore.CYAN,
        'INFO': Fore.GREEN,
        'WARNING': Fore.YELLOW,
        'ERROR': Fore.RED,
        'CRITICAL': Fore.MAGENTA,
    }

    def format(self, record: logging.LogRecord) -> str:
        color = self.COLORS.get(record.levelname, '')
        reset = Style.RESET_ALL

        timestamp = datetime.fromtimestamp(record.created).strftime('%H:%M:%S')

        log_msg = f"{color}[{timestamp}] {record.levelname:8s}{reset} {record.name:20s} | {record.getMessage()}"

        return log_msg


def setup_logger(name: str, config: Dict[str, Any]) -> logging.Logger:
    """
    Setup logger with both console and file handlers

    Console output goes to stderr so command results on stdout stay
    machine-readable. Set logging.output_dir to null to skip the file.

    Args:
        name: Logger name
        config: Configuration dictionary

    Returns:
        Configured logger
    """
    just_fix_windows_console()
    logger = logging.getLogger(name)
    logging_config = config.get('logging', {}) or {}

    log_level = str(logging_config.get('level', 'INFO')).upper()
    logger.setLevel(getattr(logging, log_level, logging.INFO))

    # Remove existing handlers
    logger.handlers = []

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logger.level)
    console_handler.setFormatter(ColoredFormatter())
    logger.addHandler(console_handler)

    output_dir = logging_config.get('output_dir', 'logs')
    if output_dir:
        output_dir = Path(output_dir)
        output_dir.mkdir(parents=True, exist_ok=True)

        log_file = output_dir / f"{name.lower().replace(' ', '_')}.log"
        file_handler = logging.FileHandler(log_file, mode='a', encoding='utf-8')
        file_handler.setLevel(logging.DEBUG)

        if logging_config.get('format', 'json') == 'json':
            file_handler.setFormatter(JSONFormatter())
        else:
            file_handler.setFormatter(logging.Formatter(
                '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
            ))
        logger.addHandler(file_handler)

    # Prevent propagation to root logger
    logger.propagate = False

    return logger
