"""
測試異常體系

驗證所有異常類別的訊息、細節與錯誤代碼。
"""
import pytest
from datetime import datetime

from src.utils.exceptions import (
    ConfigurationError,
    ErrorSeverity,
    FixtureMissingError,
    LabException,
    NotExactClosedError,
    RejectedSquareError,
    ReportParseError,
    ScaleError,
    TruncationError,
    ValidationError,
)


class TestLabException:
    """測試基礎異常類別"""

    def test_basic_exception(self):
        exc = LabException("Test error")

        assert str(exc) == "LabException: Test error"
        assert exc.message == "Test error"
        assert exc.severity == ErrorSeverity.ERROR
        assert isinstance(exc.timestamp, datetime)

    def test_exception_with_details(self):
        exc = LabException(
            "Test error",
            details={'key': 'value'},
            severity=ErrorSeverity.CRITICAL
        )

        assert exc.details == {'key': 'value'}
        assert exc.severity == ErrorSeverity.CRITICAL

    def test_exception_to_dict(self):
        exc = LabException(
            "Test error",
            details={'field': 'value'},
            context={'construction': 's', 'level': 3}
        )

        result = exc.to_dict()
        assert result['exception_type'] == 'LabException'
        assert result['error_code'] == 'LAB_ERROR'
        assert result['message'] == 'Test error'
        assert result['details'] == {'field': 'value'}
        assert result['context'] == {'construction': 's', 'level': 3}
        assert 'timestamp' in result


class TestValidationError:

    def test_validation_error(self):
        exc = ValidationError(
            field='levels',
            value=-1,
            reason='levels must be nonnegative'
        )

        assert 'levels' in exc.message
        assert exc.details['field'] == 'levels'
        assert exc.details['value'] == -1
        assert exc.details['reason'] == 'levels must be nonnegative'
        assert exc.error_code == 'VALIDATION_ERROR'


class TestConstructionErrors:
    """建構相關的例外帶有機器可讀的代碼"""

    def test_truncation_error(self):
        exc = TruncationError(4, 3, what="p-degree of X")

        assert exc.error_code == 'TRUNCATION'
        assert exc.details == {'required': 4, 'available': 3, 'what': 'p-degree of X'}
        assert "exceeds truncation 3" in exc.message

    def test_scale_error_is_a_warning(self):
        exc = ScaleError("mapping space", 10**7, 2_000_000)

        assert exc.error_code == 'SCALE'
        assert exc.severity == ErrorSeverity.WARNING
        assert exc.details['budget'] == 2_000_000

    def test_not_exact_closed_carries_enlargement(self):
        exc = NotExactClosedError("pushout missing", diagram=[1, 2], enlargement="dmax+1")

        assert exc.error_code == 'NOT_EXACT_CLOSED'
        assert exc.details['suggested_enlargement'] == "dmax+1"

    def test_rejected_square(self):
        exc = RejectedSquareError("top is not an admissible mono", (0, 1, 0, 1, 0, 0, 0, 0))

        assert exc.error_code == 'REJECTED_SQUARE'
        assert exc.details['condition'] == "top is not an admissible mono"

    def test_fixture_missing_is_critical(self):
        exc = FixtureMissingError("semi_stable_negative_control", "no file")

        assert exc.error_code == 'FIXTURE_MISSING'
        assert exc.severity == ErrorSeverity.CRITICAL
        assert exc.details['fixture'] == "semi_stable_negative_control"

    def test_report_parse_error(self):
        exc = ReportParseError("a.json", "schema version 0.9 is not 1.0")

        assert exc.error_code == 'REPORT_PARSE'
        assert "a.json" in exc.message

    def test_configuration_error_code(self):
        assert ConfigurationError("bad").error_code == 'CONFIGURATION_ERROR'

    @pytest.mark.parametrize('exc', [
        TruncationError(1, 0),
        ScaleError("x", 2, 1),
        FixtureMissingError("f", "r"),
        ValidationError("f", 1, "r"),
    ])
    def test_all_are_lab_exceptions(self, exc):
        assert isinstance(exc, LabException)
        assert exc.to_dict()['error_code'] == exc.error_code


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
