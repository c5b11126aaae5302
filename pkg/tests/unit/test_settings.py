"""
測試設定驗證
"""
import pytest

from src.config import settings
from src.utils.exceptions import ConfigurationError


class TestValidateConfiguration:

    def test_defaults_are_valid(self):
        status = settings.validate_configuration()

        assert status['work_budget_positive']
        assert status['fixture_dir_exists']

    @pytest.mark.parametrize('key,value', [
        ('DEFAULT_TIE_BREAK', 'middle'),
        ('LOG_LEVEL', 'LOUD'),
        ('LOG_TIMEZONE', 'Mars/Olympus'),
    ])
    def test_invalid_values(self, monkeypatch, key, value):
        monkeypatch.setattr(settings, key, value)

        with pytest.raises(ConfigurationError):
            settings.validate_configuration()

    def test_log_timezone(self, monkeypatch):
        monkeypatch.setattr(settings, 'LOG_TIMEZONE', 'Asia/Taipei')

        assert settings.log_timezone().zone == 'Asia/Taipei'

    def test_integer_setting(self, monkeypatch):
        monkeypatch.setenv('SDOT_TEST_INT', 'many')

        with pytest.raises(ConfigurationError):
            settings._get_int('SDOT_TEST_INT', 1)


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
