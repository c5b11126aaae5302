"""
服務工廠 - 依賴注入容器

統一管理範疇來源（內建、JSON 輸入、隨附 fixture），並快取已建立的結構，
讓 CLI 與測試共用同一組實例。
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, Optional

from src.config import settings
from src.domain.category import ProtoExactStructure
from src.parsers.category_parser import load_category, parse_category
from src.repositories.fixture_repository import FixtureRepository
from src.services.builtin_categories import builtin_pointed_sets, builtin_vect, builtin_zeros
from src.services.negative_control import load_fixture
from src.utils.exceptions import ConfigurationError
from src.utils.logger import LoggerFactory, get_logger


logger = get_logger('ServiceFactory')


class ServiceFactory:
    """
    服務工廠（單例模式）

    Example:
        >>> factory = ServiceFactory()
        >>> E = factory.structure("vect:2,2")
    """

    _instance: Optional['ServiceFactory'] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        if self._initialized:
            return
        self._structures: Dict[str, ProtoExactStructure] = {}
        self._fixtures: Optional[FixtureRepository] = None
        self._initialized = True
        logger.debug("ServiceFactory created")

    def configure_logging(self, level: Optional[str] = None) -> None:
        settings.validate_configuration()
        LoggerFactory.configure(logging.getLevelName((level or settings.LOG_LEVEL).upper()), settings.LOG_DIR)

    @property
    def fixtures(self) -> FixtureRepository:
        if self._fixtures is None:
            self._fixtures = FixtureRepository(settings.FIXTURE_DIR)
        return self._fixtures

    def structure(self, builtin: str) -> ProtoExactStructure:
        """
        解析內建名稱並快取

        Raises:
            ConfigurationError: 名稱或參數無效
            FixtureMissingError: negative-control 的 fixture 不存在
        """
        if builtin not in self._structures:
            self._structures[builtin] = self._build(builtin)
            logger.info("Structure created", builtin=builtin, name=self._structures[builtin].name)
        return self._structures[builtin]

    def _build(self, builtin: str) -> ProtoExactStructure:
        kind, _, args = builtin.partition(':')
        try:
            if kind == 'vect':
                parts = args.split(',')
                if len(parts) not in (2, 3) or (len(parts) == 3 and parts[2] != 'nodup'):
                    raise ValueError(args)
                return builtin_vect(int(parts[0]), int(parts[1]), duplicate_zero=len(parts) == 2)
            if kind == 'pointed':
                return builtin_pointed_sets(int(args))
            if kind == 'zeros':
                return builtin_zeros(int(args))
        except ValueError as e:
            raise ConfigurationError(f"Invalid builtin parameters: {builtin}", details={'builtin': builtin}) from e
        if kind == 'negative-control':
            return parse_category(load_fixture(self.fixtures)['category'])
        raise ConfigurationError(f"Unknown builtin: {builtin}", details={'builtin': builtin})

    def load(self, path: str) -> ProtoExactStructure:
        """
        Raises:
            ConfigurationError: 檔案不存在
            ValidationError: 內容無效
        """
        key = f"file:{Path(path).resolve()}"
        if key not in self._structures:
            self._structures[key] = load_category(path)
        return self._structures[key]

    def reset(self) -> None:
        """清除快取（主要用於測試）"""
        self._structures.clear()
        self._fixtures = None


def get_service_factory() -> ServiceFactory:
    return ServiceFactory()
