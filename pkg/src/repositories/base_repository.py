"""
Base Repository
唯讀檔案資料來源的抽象基類：以 ID 對應檔案，快取以檔案修改時間為準
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Dict, Generic, List, Optional, Tuple, TypeVar

from src.utils.exceptions import ValidationError

T = TypeVar('T')  # Entity 型別
ID = TypeVar('ID')  # ID 型別


class BaseRepository(ABC, Generic[T, ID]):
    """
    Repository 抽象基類

    子類別實作 path_for / list_ids / _read；find_by_id 在檔案未變動時回傳同一個物件，
    檔案在磁碟上被替換後重新讀取。
    """

    def __init__(self) -> None:
        self._cache: Dict[ID, Tuple[float, T]] = {}

    # ========== 抽象方法 ==========

    @abstractmethod
    def path_for(self, id: ID) -> Path:
        ...

    @abstractmethod
    def list_ids(self) -> List[ID]:
        """所有可用的 ID（排序後）"""

    @abstractmethod
    def _read(self, id: ID, path: Path) -> T:
        """讀取並解析單一檔案"""

    # ========== 查詢 ==========

    def find_by_id(self, id: ID) -> Optional[T]:
        """
        Returns:
            找到的實體，檔案不存在時為 None

        Raises:
            ValidationError: ID 為空
        """
        self._validate_id(id)
        path = self.path_for(id)
        if not path.is_file():
            self._cache.pop(id, None)
            return None
        mtime = path.stat().st_mtime
        cached = self._cache.get(id)
        if cached is not None and cached[0] == mtime:
            return cached[1]
        entity = self._read(id, path)
        self._cache[id] = (mtime, entity)
        return entity

    def exists(self, id: ID) -> bool:
        return id in self.list_ids()

    def _validate_id(self, id: ID) -> None:
        if not id:
            raise ValidationError('id', id, "ID must not be empty")
