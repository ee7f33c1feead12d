"""
Tests for configuration loading and logging utilities
"""

import io
import json
import logging
import os
import tempfile
import unittest
import sys
from pathlib import Path
from unittest import mock

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.utils import load_config, setup_logger
from src.utils.logger import JSONFormatter


class TestConfigLoader(unittest.TestCase):

    def test_defaults(self):
        config = load_config()
        self.assertEqual(config['harq']['max_rounds'], 5)
        self.assertEqual(config['output']['float_format'], '%.17g')
        self.assertIn('solver', config)

    def test_environment_overrides(self):
        with mock.patch.dict(os.environ, {"EC_SEED": "123", "EC_SAMPLES": "50", "EC_LOG_LEVEL": "DEBUG"}):
            config = load_config()
        self.assertEqual(config['random_seed'], 123)
        self.assertEqual(config['monte_carlo']['samples'], 50)
        self.assertEqual(config['logging']['level'], 'DEBUG')

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            load_config("does/not/exist.yaml")

    def test_custom_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "config.yaml"
            path.write_text("random_seed: 9\nmonte_carlo:\n  workers: 2\n")
            with mock.patch.dict(os.environ, {}, clear=False):
                os.environ.pop("EC_SEED", None)
                os.environ.pop("EC_WORKERS", None)
                config = load_config(str(path))
        self.assertEqual(config['random_seed'], 9)
        self.assertEqual(config['monte_carlo']['workers'], 2)


class TestLogger(unittest.TestCase):

    def test_console_goes_to_stderr(self):
        stream = io.StringIO()
        with mock.patch("sys.stderr", stream):
            logger = setup_logger("TestUtilsConsole", {"logging": {"level": "INFO", "output_dir": None}})
            logger.info("solver converged")
        self.assertIn("solver converged", stream.getvalue())
        self.assertEqual(len(logger.handlers), 1)
        self.assertFalse(logger.propagate)

    def test_file_handler_writes_json(self):
        with tempfile.TemporaryDirectory() as tmp:
            config = {"logging": {"level": "DEBUG", "output_dir": tmp, "format": "json"}}
            with mock.patch("sys.stderr", io.StringIO()):
                logger = setup_logger("TestUtilsFile", config)
                logger.debug("bracket expanded")
            for handler in logger.handlers:
                handler.close()
            logger.handlers = []
            line = (Path(tmp) / "testutilsfile.log").read_text(encoding="utf-8").strip()
        record = json.loads(line)
        self.assertEqual(record["level"], "DEBUG")
        self.assertEqual(record["message"], "bracket expanded")

    def test_json_formatter_extra(self):
        record = logging.LogRecord("x", logging.INFO, __file__, 1, "done", None, None)
        record.extra = {"analyst": "FiniteTime"}
        data = json.loads(JSONFormatter().format(record))
        self.assertEqual(data["analyst"], "FiniteTime")
        self.assertEqual(data["logger"], "x")
        self.assertTrue(data["timestamp"].endswith("Z"))


if __name__ == '__main__':
    unittest.main()
