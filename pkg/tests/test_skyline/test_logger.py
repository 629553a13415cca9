"""Tests for the logging utilities."""

import json
import logging
import os
from unittest.mock import Mock, patch

from src.utils.logger import (
    LOG_LEVEL_ENV_VAR,
    JSONFormatter,
    LoggerManager,
    QueryLoggerAdapter,
)


class _Capture(logging.Handler):
    def __init__(self):
        super().__init__(level=logging.DEBUG)
        self.records = []

    def emit(self, record):
        self.records.append(record)


class TestJSONFormatter:
    """Test JSONFormatter."""

    def test_fields_and_extra(self):
        record = logging.LogRecord("src.skyline.engines", logging.INFO, __file__, 10,
                                   "done %s", ("rsl",), None)
        record.query_result = {"engine": "rsl", "influence": 3}
        entry = json.loads(JSONFormatter().format(record))
        assert entry["message"] == "done rsl"
        assert entry["level"] == "INFO"
        assert entry["logger"] == "src.skyline.engines"
        assert entry["query_result"] == {"engine": "rsl", "influence": 3}


class TestQueryLoggerAdapter:
    """Test structured query logging."""

    def setup_method(self):
        self.logger = logging.getLogger("tests.query_logger")
        self.logger.setLevel(logging.DEBUG)
        self.capture = _Capture()
        self.logger.addHandler(self.capture)
        self.adapter = QueryLoggerAdapter(self.logger, {"component": "engine"})

    def teardown_method(self):
        self.logger.removeHandler(self.capture)

    def test_query_result(self):
        self.adapter.log_query_result("brs", 7, 12, 40, 900, 1.5)
        record = self.capture.records[-1]
        assert record.levelno == logging.DEBUG
        assert record.component == "engine"
        assert record.query_result["query_id"] == 7
        assert record.query_result["reads"] == 40

    def test_query_start_and_batch(self):
        self.adapter.log_query_start("rsl", 3, 4)
        self.adapter.log_batch(2, 10, 55)
        assert self.capture.records[0].query_start["dimensions"] == 4
        assert self.capture.records[1].batch == {"index": 2, "size": 10, "ledger_reads": 55}


class TestLoggerManager:
    """Test LoggerManager setup."""

    def setup_method(self):
        self.root_handlers = list(logging.getLogger().handlers)
        self.root_level = logging.getLogger().level

    def teardown_method(self):
        root = logging.getLogger()
        root.handlers[:] = self.root_handlers
        root.setLevel(self.root_level)

    def _config(self, level="INFO", fmt="json"):
        config = Mock()
        config.logging.level = level
        config.logging.format = fmt
        config.logging.log_file = None
        return config

    def test_level_from_config(self):
        with patch("src.utils.logger.get_config", return_value=self._config("WARNING")):
            manager = LoggerManager()
            manager.get_logger("tests.level")
        assert logging.getLogger().level == logging.WARNING

    def test_env_override(self):
        with patch("src.utils.logger.get_config", return_value=self._config("INFO")), \
                patch.dict(os.environ, {LOG_LEVEL_ENV_VAR: "debug"}):
            LoggerManager().setup_logging()
        assert logging.getLogger().level == logging.DEBUG

    def test_setup_once(self):
        with patch("src.utils.logger.get_config", return_value=self._config()) as mocked:
            manager = LoggerManager()
            manager.get_logger("a")
            manager.get_logger("b")
        assert mocked.call_count == 1

    def test_same_logger_instance(self):
        with patch("src.utils.logger.get_config", return_value=self._config()):
            manager = LoggerManager()
            assert manager.get_logger("x") is manager.get_logger("x")
            assert isinstance(manager.get_query_logger("x"), QueryLoggerAdapter)
