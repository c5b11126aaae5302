"""
Fixture Repository
隨附 fixture 的唯讀存取（JSON 檔，位於 SDOT_FIXTURE_DIR）
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from src.config import settings
from src.repositories.base_repository import BaseRepository
from src.utils.exceptions import FixtureMissingError
from src.utils.logger import get_logger


logger = get_logger('FixtureRepository')


class FixtureRepository(BaseRepository[Dict[str, Any], str]):
    """以檔名 stem 為 ID 讀取 fixture 文件"""

    def __init__(self, directory: Optional[Union[str, Path]] = None):
        super().__init__()
        self.directory = Path(directory) if directory is not None else settings.FIXTURE_DIR

    def path_for(self, id: str) -> Path:
        return self.directory / f"{id}.json"

    def list_ids(self) -> List[str]:
        if not self.directory.is_dir():
            return []
        return sorted(p.stem for p in self.directory.glob("*.json"))

    def _read(self, id: str, path: Path) -> Dict[str, Any]:
        try:
            doc = json.loads(path.read_text(encoding='utf-8'))
        except (OSError, json.JSONDecodeError) as e:
            raise FixtureMissingError(id, f"unreadable fixture file {path}: {e}") from e
        logger.debug("Fixture loaded", fixture=id, path=str(path))
        return doc

    def get(self, name: str) -> Dict[str, Any]:
        """
        Raises:
            FixtureMissingError: 檔案不存在或無法讀取
        """
        doc = self.find_by_id(name)
        if doc is None:
            raise FixtureMissingError(name, f"no file {self.path_for(name)}")
        return doc
