"""
Type Definitions for the S-construction lab
型別定義 - 提供明確的型別標註
"""
from __future__ import annotations

from enum import Enum
from typing import Dict, List, Tuple, TypeAlias, TypedDict


# ========== Enums (列舉) ==========

class BicartMode(str, Enum):
    """雙笛卡兒方塊的判定方式"""
    DESIGNATED = "designated"
    DERIVED = "derived"
    RANK_RULE = "rank_rule"
    LEVELWISE = "levelwise"


class TieBreak(str, Enum):
    """推出/拉回完成時的標準選擇"""
    LEAST = "least"
    GREATEST = "greatest"


class TwoSegalFamily(str, Enum):
    """2-Segal 對角線族"""
    ALL = "all"
    LOWER = "lower"
    UPPER = "upper"


class StabilityMode(str, Enum):
    FULL = "full"
    SEMI = "semi"


class MultiExactness(str, Enum):
    """多重網格的正合條件"""
    SEPARATE = "separate"
    JOINT = "joint"


class ArrowKind(str, Enum):
    MONO = "mono"
    EPI = "epi"


class Construction(str, Enum):
    """CLI 支援的建構"""
    SEQ = "seq"
    S = "s"
    S2 = "s2"
    SIGMA_S = "sigma-s"
    ESD = "esd"
    NERVE = "nerve"


class CheckName(str, Enum):
    """CLI 支援的檢查"""
    IDENTITIES = "identities"
    SEGAL = "segal"
    TWO_SEGAL_ALL = "2segal:all"
    TWO_SEGAL_LOWER = "2segal:lower"
    TWO_SEGAL_UPPER = "2segal:upper"
    POINTED = "pointed"
    STABLE_FULL = "stable:full"
    STABLE_SEMI = "stable:semi"
    LOW_DEGREE = "low-degree"
    ROW0 = "row0"
    PRODUCT_ISO = "product-iso"
    K0 = "k0"


# ========== Type Aliases (型別別名) ==========

ObjId: TypeAlias = int
MorId: TypeAlias = int
CellId: TypeAlias = int
Position: TypeAlias = Tuple[int, ...]     # grid index, e.g. (i, j) or (i1, j1, i2, j2)
SquareKey: TypeAlias = Tuple[int, int, int, int, int, int, int, int]  # tl, tr, bl, br, top, left, right, bottom
Matrix: TypeAlias = Tuple[Tuple[int, ...], ...]
SigmaIndex: TypeAlias = Tuple[int, int]   # (a, b); augmentation is stored apart


# ========== TypedDict (結構化字典) ==========

class LevelCount(TypedDict):
    """單一層級的格數"""
    level: str
    cells: int


class ConventionBlock(TypedDict):
    """報告中記錄的慣例"""
    lower_family: str
    upper_family: str
    tie_break: str
    truncation: Dict[str, int]
    hom_order: str


class WitnessDict(TypedDict, total=False):
    kind: str
    level: int
    data: Dict[str, object]


VerdictRows: TypeAlias = List[Dict[str, object]]
