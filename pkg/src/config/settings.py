"""
系統設定
所有可調參數透過環境變數讀取，預設值適用於桌面規模的實驗。
"""
from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any, Dict

import pytz

from src.utils.exceptions import ConfigurationError


def _get_setting(key: str, default: Any = None, required: bool = False) -> Any:
    """
    從環境變數讀取設定

    Args:
        key: 設定鍵名
        default: 預設值
        required: 是否為必要設定

    Returns:
        設定值

    Raises:
        ConfigurationError: 當必要設定缺失時
    """
    value = os.getenv(key, default)

    if required and value is None:
        raise ConfigurationError(
            f"Required configuration '{key}' is missing. Please set it as an environment variable.",
            details={'key': key},
        )

    return value


def _get_int(key: str, default: int) -> int:
    raw = _get_setting(key, str(default))
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise ConfigurationError(
            f"Configuration '{key}' must be an integer, got {raw!r}",
            details={'key': key, 'value': raw},
        )


# ==================== 列舉預算 ====================
# 預估列舉規模（候選數、態射數）超過此值即拋出 ScaleError
WORK_BUDGET = _get_int('SDOT_WORK_BUDGET', 2_000_000)

# 每個判定保留的反例數
MAX_WITNESSES = _get_int('SDOT_MAX_WITNESSES', 5)


# ==================== 慣例 ====================
DEFAULT_TIE_BREAK = str(_get_setting('SDOT_TIE_BREAK', 'least')).lower()


# ==================== 日誌 ====================
LOG_LEVEL = str(_get_setting('SDOT_LOG_LEVEL', 'WARNING')).upper()
LOG_DIR = _get_setting('SDOT_LOG_DIR', None)
# 日誌時間戳的時區（pytz 名稱）
LOG_TIMEZONE = str(_get_setting('SDOT_LOG_TIMEZONE', 'UTC'))


# ==================== Fixtures ====================
FIXTURE_DIR = Path(_get_setting(
    'SDOT_FIXTURE_DIR',
    str(Path(__file__).resolve().parent.parent / 'repositories' / 'fixtures'),
))


def log_timezone() -> pytz.BaseTzInfo:
    """
    Raises:
        ConfigurationError: SDOT_LOG_TIMEZONE 不是已知的時區
    """
    try:
        return pytz.timezone(LOG_TIMEZONE)
    except pytz.UnknownTimeZoneError as e:
        raise ConfigurationError(
            f"SDOT_LOG_TIMEZONE {LOG_TIMEZONE!r} is not a known timezone",
            details={'key': 'SDOT_LOG_TIMEZONE'},
        ) from e


# ==================== 設定驗證 ====================
def validate_configuration() -> Dict[str, bool]:
    """
    驗證設定完整性

    Returns:
        Dict[str, bool]: 各項目是否有效

    Raises:
        ConfigurationError: 設定值格式錯誤
    """
    if DEFAULT_TIE_BREAK not in ('least', 'greatest'):
        raise ConfigurationError(
            f"SDOT_TIE_BREAK must be 'least' or 'greatest', got {DEFAULT_TIE_BREAK!r}",
            details={'key': 'SDOT_TIE_BREAK'},
        )
    if not isinstance(logging.getLevelName(LOG_LEVEL), int):
        raise ConfigurationError(
            f"SDOT_LOG_LEVEL {LOG_LEVEL!r} is not a logging level",
            details={'key': 'SDOT_LOG_LEVEL'},
        )
    log_timezone()

    return {
        'work_budget_positive': WORK_BUDGET > 0,
        'max_witnesses_positive': MAX_WITNESSES > 0,
        'fixture_dir_exists': FIXTURE_DIR.is_dir(),
        'log_dir_configured': bool(LOG_DIR),
    }


def get_configuration_status() -> str:
    """設定狀態摘要（`config` 子命令的輸出）"""
    status = validate_configuration()
    lines = [f"work budget: {WORK_BUDGET}", f"tie-break: {DEFAULT_TIE_BREAK}"]
    lines.extend(f"{key}: {'ok' if ok else 'no'}" for key, ok in status.items())
    return "\n".join(lines)
