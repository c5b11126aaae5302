"""
結構化日誌系統

一筆記錄一行 JSON，寫到 stderr（stdout 留給報告與表格），
設定 SDOT_LOG_DIR 時另寫入該目錄下的 sdot.log，便於與報告一起歸檔比對。
LabException 的 to_dict() 會放在 exception_details 欄位。
"""
from __future__ import annotations

import json
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

import pytz

from src.config import settings
from src.utils.exceptions import LabException


LOG_FILE_NAME = "sdot.log"


def _timezone() -> pytz.BaseTzInfo:
    """SDOT_LOG_TIMEZONE 的時區；無效時為 UTC（validate_configuration 會回報）"""
    try:
        return pytz.timezone(settings.LOG_TIMEZONE)
    except pytz.UnknownTimeZoneError:
        return pytz.utc


def _level_number(name: str) -> int:
    level = logging.getLevelName(name)
    return level if isinstance(level, int) else logging.WARNING


class StructuredFormatter(logging.Formatter):
    """JSON 格式化器：固定欄位在前，extra_fields 覆寫於後"""

    def format(self, record: logging.LogRecord) -> str:
        entry: Dict[str, Any] = {
            'timestamp': datetime.fromtimestamp(record.created, tz=_timezone()).isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
            'module': record.module,
            'function': record.funcName,
            'line': record.lineno,
        }
        entry.update(getattr(record, 'extra_fields', {}))

        if record.exc_info and record.exc_info[0] is not None:
            exc_type, exc, _ = record.exc_info
            entry['exception'] = {
                'type': exc_type.__name__,
                'message': str(exc),
                'traceback': self.formatException(record.exc_info),
            }

        # tuples become lists; frozensets and other objects fall back to str()
        return json.dumps(entry, ensure_ascii=False, default=str)


class StructuredLogger:
    """
    結構化日誌記錄器

    關鍵字參數成為 JSON 欄位；bind() 產生帶有固定欄位的子記錄器，
    兩者共用同一個 logging.Logger。

    Example:
        >>> logger = StructuredLogger('SConstruction')
        >>> logger.info("Level enumerated", structure="vect(2,2)", degree=3, cells=120)
        >>> job = logger.bind(subject="vect(2,2)")
        >>> job.info("Check finished", condition="2segal:all", passed=True)
    """

    def __init__(
        self,
        name: str,
        level: int = logging.INFO,
        log_file: Optional[str] = None,
        enable_console: bool = True,
        context: Optional[Dict[str, Any]] = None,
        _logger: Optional[logging.Logger] = None,
    ):
        """
        Args:
            name: 記錄器名稱（通常是服務名稱）
            level: 日誌等級
            log_file: 額外寫入的 JSON lines 檔案
            enable_console: 是否輸出到 stderr
            context: 每筆記錄都附帶的欄位
        """
        self.context: Dict[str, Any] = dict(context or {})
        if _logger is not None:
            self.logger = _logger
            return

        self.logger = logging.getLogger(name)
        self.logger.setLevel(level)
        self.logger.propagate = False
        self.logger.handlers.clear()
        if enable_console:
            self.add_handler(logging.StreamHandler(sys.stderr))
        if log_file:
            self.add_file(Path(log_file))

    def add_handler(self, handler: logging.Handler) -> None:
        handler.setFormatter(StructuredFormatter())
        self.logger.addHandler(handler)

    def add_file(self, path: Path) -> None:
        """附加檔案輸出（同一路徑只附加一次）"""
        target = str(path.resolve())
        if any(getattr(h, 'baseFilename', None) == target for h in self.logger.handlers):
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        self.add_handler(logging.FileHandler(path, encoding='utf-8'))

    def bind(self, **context: Any) -> StructuredLogger:
        return StructuredLogger(self.logger.name, context={**self.context, **context}, _logger=self.logger)

    def _log(self, levelno: int, message: str, exception: Optional[BaseException] = None, **fields: Any) -> None:
        if not self.logger.isEnabledFor(levelno):
            return
        extra_fields = {**self.context, **fields}
        if isinstance(exception, LabException):
            extra_fields['exception_details'] = exception.to_dict()

        exc_info = None if exception is None else (type(exception), exception, exception.__traceback__)
        record = self.logger.makeRecord(self.logger.name, levelno, '', 0, message, (), exc_info=exc_info)
        record.extra_fields = extra_fields
        self.logger.handle(record)

    def debug(self, message: str, **fields: Any) -> None:
        self._log(logging.DEBUG, message, **fields)

    def info(self, message: str, **fields: Any) -> None:
        self._log(logging.INFO, message, **fields)

    def warning(self, message: str, **fields: Any) -> None:
        self._log(logging.WARNING, message, **fields)

    def error(self, message: str, exception: Optional[BaseException] = None, **fields: Any) -> None:
        """
        Example:
            >>> try:
            ...     complete_span_to_pushout(E, top, left)
            ... except NotExactClosedError as e:
            ...     logger.error("Completion failed", exception=e, degree=3)
        """
        self._log(logging.ERROR, message, exception=exception, **fields)

    def critical(self, message: str, exception: Optional[BaseException] = None, **fields: Any) -> None:
        self._log(logging.CRITICAL, message, exception=exception, **fields)

    def exception(self, message: str, **fields: Any) -> None:
        """在 except 區塊中呼叫，記錄目前正在處理的異常"""
        self.error(message, exception=sys.exc_info()[1], **fields)


class LoggerFactory:
    """
    日誌記錄器工廠

    同名記錄器只建立一次；configure() 的等級與日誌目錄也套用到已建立的記錄器。
    """

    _loggers: Dict[str, StructuredLogger] = {}
    _default_level: int = _level_number(settings.LOG_LEVEL)
    _log_dir: Optional[Path] = None

    @classmethod
    def configure(cls, level: int = logging.INFO, log_dir: Optional[str] = None) -> None:
        """
        Args:
            level: 日誌等級
            log_dir: 設定時，所有記錄器另寫入 <log_dir>/sdot.log
        """
        cls._default_level = level
        if log_dir:
            cls._log_dir = Path(log_dir)
        for structured in cls._loggers.values():
            structured.logger.setLevel(level)
            if cls._log_dir is not None:
                structured.add_file(cls._log_dir / LOG_FILE_NAME)

    @classmethod
    def get_logger(cls, name: str, level: Optional[int] = None, log_file: Optional[str] = None) -> StructuredLogger:
        """
        Args:
            log_file: 檔名；相對路徑放在日誌目錄下
        """
        if name not in cls._loggers:
            structured = StructuredLogger(name=name, level=level or cls._default_level)
            if cls._log_dir is not None:
                structured.add_file(cls._log_dir / LOG_FILE_NAME)
            if log_file:
                structured.add_file(cls._log_dir / log_file if cls._log_dir else Path(log_file))
            cls._loggers[name] = structured
        return cls._loggers[name]


def get_logger(name: str, log_file: Optional[str] = None) -> StructuredLogger:
    """
    Example:
        >>> from src.utils.logger import get_logger
        >>> logger = get_logger('KTheory')
    """
    return LoggerFactory.get_logger(name, log_file=log_file)
