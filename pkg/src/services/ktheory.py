"""
K-theory service
K_0：由 S_1 / S_2 讀出的關係呈現、Smith 標準形與餘核不變量

Relations are [A_02] - [A_01] - [A_12] for every S_2 cell and [Z] for every
zero class. Identical rows are kept once.
"""
from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.domain.category import ProtoExactStructure
from src.domain.k0 import AbelianGroupInvariants, K0Presentation, SmithNormalForm
from src.services.fincat_service import iso_classes
from src.services.s_construction import s_disc
from src.utils.logger import get_logger


logger = get_logger('KTheory')


# ==================== 呈現 ====================

def k0_presentation(E: ProtoExactStructure, keep_duplicates: bool = False) -> K0Presentation:
    """
    生成元：物件的同構類；關係：每個 S_2 格的 [A_02] = [A_01] + [A_12]，以及零類 = 0

    Args:
        E: 原正合結構
        keep_duplicates: 保留重複的關係列（餘核不變）

    Raises:
        NotExactClosedError / ScaleError: 由 S_2 列舉傳出
    """
    C = E.base
    classes = iso_classes(C)
    width = len(classes)

    def unit(obj: int) -> List[int]:
        row = [0] * width
        row[classes.class_of[obj]] = 1
        return row

    rows: List[Tuple[int, ...]] = []
    for z_class in sorted({classes.class_of[z] for z in E.zeros}):
        row = [0] * width
        row[z_class] = 1
        rows.append(tuple(row))
    for g in s_disc(E, 2):
        row = unit(g.obj(0, 2))
        for obj in (g.obj(0, 1), g.obj(1, 2)):
            row[classes.class_of[obj]] -= 1
        rows.append(tuple(row))

    if not keep_duplicates:
        rows = list(dict.fromkeys(rows))
    presentation = K0Presentation(
        generators=tuple(C.label(r) for r in classes.representatives),
        representatives=classes.representatives,
        relations=tuple(rows),
    )
    logger.info("K0 presentation built", structure=E.name, generators=width, relations=len(rows))
    return presentation


# ==================== Smith 標準形 ====================

class _Reducer:
    """對 A 做么模列／行運算，同步更新 U、U_inv、V、V_inv"""

    def __init__(self, M: np.ndarray):
        rows, cols = M.shape
        self.A = M.copy()
        self.U = np.identity(rows, dtype=int).astype(object)
        self.U_inv = self.U.copy()
        self.V = np.identity(cols, dtype=int).astype(object)
        self.V_inv = self.V.copy()

    # row_i += c * row_t
    def add_row(self, i: int, t: int, c: int) -> None:
        self.A[i, :] += c * self.A[t, :]
        self.U[i, :] += c * self.U[t, :]
        self.U_inv[:, t] -= c * self.U_inv[:, i]

    def swap_rows(self, i: int, t: int) -> None:
        if i != t:
            self.A[[i, t], :] = self.A[[t, i], :]
            self.U[[i, t], :] = self.U[[t, i], :]
            self.U_inv[:, [i, t]] = self.U_inv[:, [t, i]]

    def negate_row(self, i: int) -> None:
        self.A[i, :] *= -1
        self.U[i, :] *= -1
        self.U_inv[:, i] *= -1

    # col_j += c * col_t
    def add_col(self, j: int, t: int, c: int) -> None:
        self.A[:, j] += c * self.A[:, t]
        self.V[:, j] += c * self.V[:, t]
        self.V_inv[t, :] -= c * self.V_inv[j, :]

    def swap_cols(self, j: int, t: int) -> None:
        if j != t:
            self.A[:, [j, t]] = self.A[:, [t, j]]
            self.V[:, [j, t]] = self.V[:, [t, j]]
            self.V_inv[[j, t], :] = self.V_inv[[t, j], :]

    def smallest(self, t: int) -> Optional[Tuple[int, int]]:
        """A[t:, t:] 中絕對值最小的非零項"""
        best = None
        rows, cols = self.A.shape
        for i in range(t, rows):
            for j in range(t, cols):
                v = self.A[i, j]
                if v != 0 and (best is None or abs(v) < abs(self.A[best])):
                    best = (i, j)
        return best


def _as_object_matrix(M: Union[np.ndarray, Sequence[Sequence[int]]], cols: Optional[int] = None) -> np.ndarray:
    A = np.array(M, dtype=object)
    if A.ndim == 1:
        A = A.reshape((0, cols or 0)) if A.size == 0 else A.reshape((1, -1))
    return A


def smith_normal_form(M: Union[np.ndarray, Sequence[Sequence[int]]], cols: Optional[int] = None) -> SmithNormalForm:
    """
    整數矩陣的 Smith 標準形（精確整數運算）

    Args:
        M: 整數矩陣
        cols: M 沒有列時的行數

    Returns:
        SmithNormalForm: 對角項與么模證明，verify(M) 恆為 True
    """
    R = _Reducer(_as_object_matrix(M, cols))
    rows, ncols = R.A.shape
    diagonal: List[int] = []
    for t in range(min(rows, ncols)):
        pivot = R.smallest(t)
        if pivot is None:
            break
        R.swap_rows(t, pivot[0])
        R.swap_cols(t, pivot[1])
        while True:
            done = True
            for i in range(t + 1, rows):
                q = R.A[i, t] // R.A[t, t]
                if q:
                    R.add_row(i, t, -q)
                if R.A[i, t] != 0:
                    done = False
            for j in range(t + 1, ncols):
                q = R.A[t, j] // R.A[t, t]
                if q:
                    R.add_col(j, t, -q)
                if R.A[t, j] != 0:
                    done = False
            if not done:
                pivot = R.smallest(t)
                R.swap_rows(t, pivot[0])
                R.swap_cols(t, pivot[1])
                continue
            # 其餘項必須被主元整除
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, ncols)
                        if R.A[i, j] % R.A[t, t] != 0), None)
            if bad is None:
                break
            R.add_row(t, bad[0], 1)
        if R.A[t, t] < 0:
            R.negate_row(t)
        diagonal.append(int(R.A[t, t]))
    snf = SmithNormalForm(diagonal=tuple(diagonal), D=R.A, U=R.U, V=R.V, U_inv=R.U_inv, V_inv=R.V_inv)
    logger.debug("Smith normal form computed", shape=[rows, ncols], diagonal=diagonal)
    return snf


def cokernel_invariants(M: Union[np.ndarray, Sequence[Sequence[int]]], cols: Optional[int] = None) -> AbelianGroupInvariants:
    """Z^cols / (M 的列空間)"""
    snf = smith_normal_form(M, cols)
    width = snf.D.shape[1]
    return AbelianGroupInvariants(
        rank=width - len(snf.diagonal),
        torsion=tuple(d for d in snf.diagonal if d > 1),
    )


# ==================== K_0 ====================

def k0(E: ProtoExactStructure) -> AbelianGroupInvariants:
    presentation = k0_presentation(E)
    invariants = cokernel_invariants(presentation.matrix(), cols=len(presentation.generators))
    logger.info("K0 computed", structure=E.name, rank=invariants.rank, torsion=list(invariants.torsion))
    return invariants


def k0_report(E: ProtoExactStructure) -> Dict[str, object]:
    """{"generators", "relations", "rank", "torsion"}"""
    presentation = k0_presentation(E)
    M = presentation.matrix()
    snf = smith_normal_form(M, cols=len(presentation.generators))
    invariants = AbelianGroupInvariants(
        rank=len(presentation.generators) - len(snf.diagonal),
        torsion=tuple(d for d in snf.diagonal if d > 1),
    )
    return {
        'generators': list(presentation.generators),
        'relations': [list(row) for row in presentation.relations],
        'rank': invariants.rank,
        'torsion': list(invariants.torsion),
        'certificate_verified': snf.verify(M),
    }
