"""
Custom Exceptions for the S-construction lab
自訂例外類別 - 提供清晰的錯誤處理

Checker failures are data (reports); these exceptions cover malformed input,
truncation limits and budget overruns.
"""
from __future__ import annotations

from datetime import datetime
from enum import Enum
from typing import Any, Dict, Optional


class ErrorSeverity(str, Enum):
    """錯誤嚴重程度"""
    DEBUG = "DEBUG"
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    CRITICAL = "CRITICAL"


class LabException(Exception):
    """所有例外的基礎類別"""

    error_code: str = "LAB_ERROR"

    def __init__(
        self,
        message: str,
        details: Optional[Dict[str, Any]] = None,
        severity: ErrorSeverity = ErrorSeverity.ERROR,
        context: Optional[Dict[str, Any]] = None,
    ):
        """
        初始化例外

        Args:
            message: 錯誤訊息
            details: 額外的錯誤細節
            severity: 嚴重程度
            context: 呼叫端上下文（例如 construction, level）
        """
        self.message = message
        self.details = details or {}
        self.severity = severity
        self.context = context or {}
        self.timestamp = datetime.now()
        super().__init__(self.message)

    def __str__(self) -> str:
        return f"{type(self).__name__}: {self.message}"

    def to_dict(self) -> Dict[str, Any]:
        """轉為可序列化字典"""
        return {
            'exception_type': type(self).__name__,
            'error_code': self.error_code,
            'message': self.message,
            'severity': self.severity.value,
            'details': self.details,
            'context': self.context,
            'timestamp': self.timestamp.isoformat(),
        }


# ========== Input Exceptions (輸入例外) ==========

class ValidationError(LabException):
    """資料驗證失敗"""

    error_code = "VALIDATION_ERROR"

    def __init__(self, field: str, value: Any, reason: str, **kwargs):
        super().__init__(
            f"Invalid {field}: {reason}",
            details={'field': field, 'value': value, 'reason': reason},
            **kwargs,
        )


class ConfigurationError(LabException):
    """設定錯誤（參數、輸入路徑、環境變數）"""

    error_code = "CONFIGURATION_ERROR"


class ReportParseError(LabException):
    """報告無法解析或版本不符"""

    error_code = "REPORT_PARSE"

    def __init__(self, path: str, reason: str, **kwargs):
        super().__init__(
            f"Cannot parse report {path}: {reason}",
            details={'path': path, 'reason': reason},
            **kwargs,
        )


# ========== Construction Exceptions (建構例外) ==========

class RejectedSquareError(LabException):
    """方塊不符合前置條件"""

    error_code = "REJECTED_SQUARE"

    def __init__(self, condition: str, square: Any, **kwargs):
        super().__init__(
            f"Square rejected: {condition}",
            details={'condition': condition, 'square': square},
            **kwargs,
        )


class NotExactClosedError(LabException):
    """截斷後的範疇缺少所需的推出或拉回"""

    error_code = "NOT_EXACT_CLOSED"

    def __init__(self, message: str, diagram: Any = None, enlargement: Optional[str] = None, **kwargs):
        super().__init__(
            message,
            details={'diagram': diagram, 'suggested_enlargement': enlargement},
            **kwargs,
        )


class TruncationError(LabException):
    """所需層級超出截斷範圍"""

    error_code = "TRUNCATION"

    def __init__(self, required: int, available: int, what: str = "level", **kwargs):
        super().__init__(
            f"Required {what} {required} exceeds truncation {available}",
            details={'required': required, 'available': available, 'what': what},
            **kwargs,
        )


class ScaleError(LabException):
    """列舉規模超出工作預算"""

    error_code = "SCALE"

    def __init__(self, what: str, estimate: int, budget: int, **kwargs):
        super().__init__(
            f"Enumeration of {what} estimated at {estimate} exceeds work budget {budget}",
            details={'what': what, 'estimate': estimate, 'budget': budget},
            severity=ErrorSeverity.WARNING,
            **kwargs,
        )


class FixtureMissingError(LabException):
    """找不到或無法驗證隨附的 fixture"""

    error_code = "FIXTURE_MISSING"

    def __init__(self, name: str, reason: str, **kwargs):
        super().__init__(
            f"Fixture {name} unavailable: {reason}",
            details={'fixture': name, 'reason': reason},
            severity=ErrorSeverity.CRITICAL,
            **kwargs,
        )
