"""
測試結構化日誌系統

驗證日誌記錄、JSON 格式與 LabException 細節的輸出。
"""
import json
import logging
from io import StringIO

from src.config import settings
from src.utils.exceptions import TruncationError, ValidationError
from src.utils.logger import LoggerFactory, StructuredFormatter, StructuredLogger, get_logger


def _capture(name: str, level: int = logging.INFO):
    stream = StringIO()
    handler = logging.StreamHandler(stream)
    handler.setFormatter(StructuredFormatter())
    logger = StructuredLogger(name, level=level, enable_console=False)
    logger.logger.addHandler(handler)
    return logger, stream


class TestStructuredLogger:
    """測試結構化日誌記錄器"""

    def test_basic_logging(self):
        logger, stream = _capture('test_logger')

        logger.info("Test message", key="value")

        output = stream.getvalue()
        assert "Test message" in output
        assert "INFO" in output

    def test_json_format(self):
        logger, stream = _capture('test_json')

        logger.info("Level enumerated", structure="vect(2,2)", degree=3, cells=120)

        log_data = json.loads(stream.getvalue().strip())
        assert log_data['message'] == "Level enumerated"
        assert log_data['level'] == "INFO"
        assert log_data['structure'] == "vect(2,2)"
        assert log_data['cells'] == 120
        assert 'timestamp' in log_data

    def test_exception_logging(self):
        logger, stream = _capture('test_exception')

        exc = ValidationError(field='levels', value=-1, reason='must be nonnegative')
        logger.error("Validation failed", exception=exc)

        log_data = json.loads(stream.getvalue().strip())
        assert log_data['level'] == "ERROR"
        assert log_data['exception_details']['exception_type'] == 'ValidationError'
        assert log_data['exception']['type'] == 'ValidationError'

    def test_tuple_fields_are_serialized(self):
        logger, stream = _capture('test_tuples')

        logger.info("Checked", levels=(2, 2), classes=frozenset({1}))

        log_data = json.loads(stream.getvalue().strip())
        assert log_data['levels'] == [2, 2]
        assert log_data['classes'] == "frozenset({1})"

    def test_exception_helper_inside_except(self):
        logger, stream = _capture('test_exception_helper')

        try:
            raise TruncationError(4, 3)
        except TruncationError:
            logger.exception("Truncated")

        log_data = json.loads(stream.getvalue().strip())
        assert log_data['exception_details']['error_code'] == 'TRUNCATION'


class TestBind:

    def test_bound_fields_are_added(self):
        logger, stream = _capture('test_bind')

        logger.bind(subject="vect(2,1)", levels=[3]).info("Job started", checks=["identities"])

        log_data = json.loads(stream.getvalue())
        assert log_data['subject'] == "vect(2,1)"
        assert log_data['levels'] == [3]
        assert log_data['checks'] == ["identities"]

    def test_call_fields_override_bound_fields(self):
        logger, stream = _capture('test_bind_override')

        logger.bind(subject="a").info("Job finished", subject="b")

        assert json.loads(stream.getvalue())['subject'] == "b"

    def test_bind_does_not_change_parent(self):
        logger, stream = _capture('test_bind_parent')
        logger.bind(subject="a")

        logger.info("Plain")

        assert 'subject' not in json.loads(stream.getvalue())


class TestTimestamps:

    def test_timestamp_is_timezone_aware(self, monkeypatch):
        monkeypatch.setattr(settings, "LOG_TIMEZONE", "Asia/Taipei")
        logger, stream = _capture("test_tz")

        logger.info("Tick")

        assert json.loads(stream.getvalue())["timestamp"].endswith("+08:00")

    def test_unknown_timezone_falls_back_to_utc(self, monkeypatch):
        monkeypatch.setattr(settings, "LOG_TIMEZONE", "Mars/Olympus")
        logger, stream = _capture("test_tz_fallback")

        logger.info("Tick")

        assert json.loads(stream.getvalue())["timestamp"].endswith("+00:00")


class TestLoggerFactory:
    """測試日誌工廠"""

    def test_singleton_behavior(self):
        logger1 = LoggerFactory.get_logger('my_logger')
        logger2 = LoggerFactory.get_logger('my_logger')

        assert logger1 is logger2

    def test_different_loggers(self):
        logger1 = LoggerFactory.get_logger('logger1')
        logger2 = LoggerFactory.get_logger('logger2')

        assert logger1 is not logger2

    def test_log_dir_receives_records(self, tmp_path, monkeypatch):
        monkeypatch.setattr(LoggerFactory, '_log_dir', None)
        LoggerFactory.configure(level=logging.INFO, log_dir=str(tmp_path))
        try:
            LoggerFactory.get_logger('test_log_dir').info("To file", cells=2)
        finally:
            LoggerFactory.configure(level=logging.WARNING)

        lines = (tmp_path / "sdot.log").read_text(encoding='utf-8').splitlines()
        assert json.loads(lines[-1])['message'] == "To file"

    def test_configure_global_level(self):
        LoggerFactory.configure(level=logging.DEBUG)
        try:
            logger = LoggerFactory.get_logger('test_config')
            assert logger.logger.level == logging.DEBUG
        finally:
            LoggerFactory.configure(level=logging.WARNING)


class TestConvenienceFunction:

    def test_get_logger(self):
        logger = get_logger('convenience_test')

        assert isinstance(logger, StructuredLogger)
        assert logger.logger.name == 'convenience_test'


def test_all_log_levels():
    logger, stream = _capture('test_levels', level=logging.DEBUG)

    logger.debug("Debug message")
    logger.info("Info message")
    logger.warning("Warning message")
    logger.error("Error message")
    logger.critical("Critical message")

    lines = stream.getvalue().strip().split('\n')
    assert len(lines) == 5

    log_data = [json.loads(line) for line in lines]
    assert [d['level'] for d in log_data] == ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
