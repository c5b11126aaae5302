"""
K0 domain types
Grothendieck 群的呈現與不變量
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np

from src.utils.exceptions import ValidationError
from src.utils.types import Matrix


@dataclass(frozen=True)
class K0Presentation:
    """
    生成元為物件的同構類；每列關係為一個整數向量

    Attributes:
        generators: 同構類代表元的標籤
        representatives: 同構類代表元（物件 id）
        relations: 關係矩陣（列 = 關係，行 = 生成元）
    """

    generators: Tuple[str, ...]
    representatives: Tuple[int, ...]
    relations: Matrix

    def __post_init__(self) -> None:
        width = len(self.generators)
        for n, row in enumerate(self.relations):
            if len(row) != width:
                raise ValidationError('relations', n, f"row has {len(row)} columns, expected {width}")

    def matrix(self) -> np.ndarray:
        """物件陣列（任意精度整數）"""
        M = np.zeros((len(self.relations), len(self.generators)), dtype=object)
        for i, row in enumerate(self.relations):
            M[i, :] = row
        return M


@dataclass(frozen=True)
class AbelianGroupInvariants:
    """有限生成交換群 Z^rank ⊕ ⊕ Z/t_i，t_1 | t_2 | ⋯"""

    rank: int
    torsion: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.rank < 0:
            raise ValidationError('rank', self.rank, "rank must be nonnegative")
        if any(t <= 1 for t in self.torsion):
            raise ValidationError('torsion', list(self.torsion), "torsion coefficients must exceed 1")
        if any(b % a for a, b in zip(self.torsion, self.torsion[1:])):
            raise ValidationError('torsion', list(self.torsion), "torsion coefficients must form a divisibility chain")

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = [f"Z^{self.rank}"] if self.rank else []
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) or "0"


@dataclass(frozen=True, eq=False)
class SmithNormalForm:
    """
    U · M · V = D，且 M = U_inv · D · V_inv；U、V 為么模矩陣

    Attributes:
        diagonal: D 的非零對角項 d_1 | d_2 | ⋯（皆為正）
    """

    diagonal: Tuple[int, ...]
    D: np.ndarray
    U: np.ndarray
    V: np.ndarray
    U_inv: np.ndarray
    V_inv: np.ndarray

    def verify(self, M: np.ndarray) -> bool:
        """重新相乘檢查兩個方向的等式與逆矩陣"""
        M = np.asarray(M, dtype=object)
        rows, cols = M.shape
        eye_rows = np.identity(rows, dtype=int).astype(object)
        eye_cols = np.identity(cols, dtype=int).astype(object)
        return (
            np.array_equal(self.U.dot(M).dot(self.V), self.D)
            and np.array_equal(self.U_inv.dot(self.D).dot(self.V_inv), M)
            and np.array_equal(self.U.dot(self.U_inv), eye_rows)
            and np.array_equal(self.V.dot(self.V_inv), eye_cols)
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'diagonal': list(self.diagonal),
            'U': self.U.tolist(),
            'V': self.V.tolist(),
        }
