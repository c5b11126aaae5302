"""
工作規格與報告模型
JobSpec 描述一次 CLI 執行；Report 是寫出的 JSON 報告（diff 時再讀回）
"""
from __future__ import annotations

import re
from typing import Any, Dict, List, Optional

from pydantic import Field, field_validator, model_validator

from src.config.constants import LEVEL_BUDGET, MAX_ITERATED_ARITY, REPORT_SCHEMA_VERSION
from src.parsers.category_parser import StrictModel
from src.utils.types import CheckName, Construction, TieBreak


BUILTIN_PATTERN = re.compile(r"^(vect:\d+,\d+(,nodup)?|pointed:\d+|zeros:\d+|negative-control)$")

# 只對 Σ 側或範疇本身有意義、與所選建構無關的檢查
STRUCTURE_CHECKS = frozenset({
    CheckName.POINTED, CheckName.STABLE_FULL, CheckName.STABLE_SEMI,
    CheckName.LOW_DEGREE, CheckName.ROW0, CheckName.PRODUCT_ISO, CheckName.K0,
})


class JobSpec(StrictModel):
    """
    一次執行的完整描述

    Attributes:
        builtin: 內建範疇，例如 vect:2,2 / vect:2,3,nodup / pointed:3 / zeros:2 / negative-control
        input: 範疇 JSON 路徑（與 builtin 二選一）
        construction: 要建立的單純物件
        checks: 要執行的檢查
        levels: 截斷層級；s2 與 product-iso 每軸一個
        tie_break: 推出／拉回的標準選擇
    """

    builtin: Optional[str] = None
    input: Optional[str] = None
    construction: Construction = Construction.S
    checks: List[CheckName] = Field(default_factory=list)
    levels: List[int] = Field(default_factory=lambda: [3], min_length=1)
    tie_break: TieBreak = TieBreak.LEAST
    seed: Optional[int] = None

    @field_validator('builtin')
    @classmethod
    def _builtin_format(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and not BUILTIN_PATTERN.match(value):
            raise ValueError(f"unknown builtin {value!r}")
        return value

    @model_validator(mode='after')
    def _consistent(self) -> 'JobSpec':
        if (self.builtin is None) == (self.input is None):
            raise ValueError("exactly one of builtin and input is required")
        if any(n < 0 for n in self.levels):
            raise ValueError("levels must be nonnegative")
        budget = LEVEL_BUDGET[self.construction.value]
        if max(self.levels) > budget:
            raise ValueError(f"level {max(self.levels)} exceeds the {self.construction.value} budget {budget}")
        if self.construction == Construction.S2:
            if len(self.levels) > MAX_ITERATED_ARITY:
                raise ValueError(f"s2 takes at most {MAX_ITERATED_ARITY} levels")
        elif len(self.levels) != 1 and CheckName.PRODUCT_ISO not in self.checks:
            raise ValueError(f"{self.construction.value} takes a single level")
        return self

    @property
    def bound(self) -> int:
        return self.levels[0]


class Report(StrictModel):
    """執行報告；除 timings 外兩次相同執行的輸出逐位元相同"""

    schema_version: str = REPORT_SCHEMA_VERSION
    job: JobSpec
    subject: str
    construction: str
    conventions: Dict[str, Any]
    counts: List[Dict[str, Any]] = Field(default_factory=list)
    checks: List[Dict[str, Any]] = Field(default_factory=list)
    extras: Dict[str, Any] = Field(default_factory=dict)
    error: Optional[Dict[str, Any]] = None
    exit_code: int = 0
    timings: Dict[str, float] = Field(default_factory=dict)

    @field_validator('schema_version')
    @classmethod
    def _same_schema(cls, value: str) -> str:
        if value != REPORT_SCHEMA_VERSION:
            raise ValueError(f"schema version {value} is not {REPORT_SCHEMA_VERSION}")
        return value

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.get('passed') for c in self.checks)
