"""
Universal constructions
推出、拉回與雙笛卡兒方塊的判定與補全（以泛性質窮舉）
"""
from __future__ import annotations

from collections import Counter, defaultdict
from typing import Dict, List, Optional, Tuple, Union

from src.config import settings
from src.domain.category import FinCategory, ProtoExactStructure, Square
from src.utils.exceptions import NotExactClosedError, RejectedSquareError
from src.utils.logger import get_logger
from src.utils.types import BicartMode, MorId, TieBreak


logger = get_logger('Universal')


# ==================== 泛性質 ====================

def is_pushout(C: FinCategory, square: Square) -> bool:
    """
    方塊是否為其 span (top, left) 的推出

    對每個物件 W：u ↦ (u∘right, u∘bottom) 必須是 Hom(br, W) 到相容對集合的雙射。
    """
    if not square.commutes(C):
        return False
    for w in C.objects:
        images = set()
        for u in C.hom(square.br, w):
            pair = (C.compose(u, square.right), C.compose(u, square.bottom))
            if pair in images:
                return False
            images.add(pair)
        via_top = Counter(C.compose(p, square.top) for p in C.hom(square.tr, w))
        via_left = Counter(C.compose(q, square.left) for q in C.hom(square.bl, w))
        compatible = sum(n * via_left.get(m, 0) for m, n in via_top.items())
        if compatible != len(images):
            return False
    return True


def is_pullback(C: FinCategory, square: Square) -> bool:
    """方塊是否為其 cospan (right, bottom) 的拉回（is_pushout 的對偶）"""
    if not square.commutes(C):
        return False
    for w in C.objects:
        images = set()
        for u in C.hom(w, square.tl):
            pair = (C.compose(square.top, u), C.compose(square.left, u))
            if pair in images:
                return False
            images.add(pair)
        via_right = Counter(C.compose(square.right, p) for p in C.hom(w, square.tr))
        via_bottom = Counter(C.compose(square.bottom, q) for q in C.hom(w, square.bl))
        compatible = sum(n * via_bottom.get(m, 0) for m, n in via_right.items())
        if compatible != len(images):
            return False
    return True


def derived_bicartesian(C: FinCategory, square: Square) -> bool:
    return is_pushout(C, square) and is_pullback(C, square)


def _precondition_failure(E: ProtoExactStructure, square: Square) -> Optional[str]:
    C = E.base
    if not square.boundary_consistent(C):
        return "boundary objects do not match the morphisms"
    if not square.commutes(C):
        return "boundary does not commute"
    if square.top not in E.monos:
        return "top is not an admissible mono"
    if square.bottom not in E.monos:
        return "bottom is not an admissible mono"
    if square.left not in E.epis:
        return "left is not an admissible epi"
    if square.right not in E.epis:
        return "right is not an admissible epi"
    return None


def is_bicartesian(E: ProtoExactStructure, square: Square, check_classes: bool = True) -> bool:
    """
    判定方塊是否為雙笛卡兒方塊

    Args:
        E: 原正合結構
        square: 待判定的方塊
        check_classes: 是否檢查前置條件（交換、單態射/滿態射類別）

    Returns:
        bool: 依 E.bicart_mode 的判定結果

    Raises:
        RejectedSquareError: 前置條件不成立
    """
    if check_classes:
        failure = _precondition_failure(E, square)
        if failure is not None:
            raise RejectedSquareError(failure, square.key())

    key = ('bicart', square.key())
    cached = E._cache.get(key)
    if cached is not None:
        return cached

    mode = E.bicart_mode
    if mode == BicartMode.DESIGNATED:
        result = square.key() in E.designated
    elif mode == BicartMode.DERIVED:
        result = derived_bicartesian(E.base, square)
    else:
        if E.oracle is None:
            raise RejectedSquareError(f"mode {mode.value} needs an oracle", square.key())
        result = E.oracle.is_bicartesian(square)
    E._cache[key] = result
    return result


def _corner_allowed(E: ProtoExactStructure, tl: int, tr: int, bl: int, br: int) -> bool:
    if E.oracle is None or E.bicart_mode == BicartMode.DERIVED:
        return True
    return E.oracle.corner_filter(tl, tr, bl, br)


# ==================== 補全 ====================

def span_completions(E: ProtoExactStructure, top: MorId, left: MorId) -> Tuple[Square, ...]:
    """
    所有把 span (top, left) 補成雙笛卡兒方塊的方式，依 (br, right, bottom) 遞增排序
    """
    key = ('span', top, left)
    cached = E._cache.get(key)
    if cached is not None:
        return cached

    C = E.base
    tl, tr, bl = C.source[top], C.target[top], C.target[left]
    found: List[Square] = []
    for br in C.objects:
        if not _corner_allowed(E, tl, tr, bl, br):
            continue
        bottoms: Dict[MorId, List[MorId]] = defaultdict(list)
        for bottom in C.hom(bl, br):
            if bottom in E.monos:
                bottoms[C.compose(bottom, left)].append(bottom)
        if not bottoms:
            continue
        for right in C.hom(tr, br):
            if right not in E.epis:
                continue
            for bottom in bottoms.get(C.compose(right, top), ()):
                square = Square(tl, tr, bl, br, top, left, right, bottom)
                if is_bicartesian(E, square, check_classes=False):
                    found.append(square)

    result = tuple(sorted(found, key=lambda s: (s.br, s.right, s.bottom)))
    E._cache[key] = result
    return result


def cospan_completions(E: ProtoExactStructure, right: MorId, bottom: MorId) -> Tuple[Square, ...]:
    """所有把 cospan (right, bottom) 補成雙笛卡兒方塊的方式，依 (tl, top, left) 遞增排序"""
    key = ('cospan', right, bottom)
    cached = E._cache.get(key)
    if cached is not None:
        return cached

    C = E.base
    tr, bl, br = C.source[right], C.source[bottom], C.target[right]
    found: List[Square] = []
    for tl in C.objects:
        if not _corner_allowed(E, tl, tr, bl, br):
            continue
        lefts: Dict[MorId, List[MorId]] = defaultdict(list)
        for left in C.hom(tl, bl):
            if left in E.epis:
                lefts[C.compose(bottom, left)].append(left)
        if not lefts:
            continue
        for top in C.hom(tl, tr):
            if top not in E.monos:
                continue
            for left in lefts.get(C.compose(right, top), ()):
                square = Square(tl, tr, bl, br, top, left, right, bottom)
                if is_bicartesian(E, square, check_classes=False):
                    found.append(square)

    result = tuple(sorted(found, key=lambda s: (s.tl, s.top, s.left)))
    E._cache[key] = result
    return result


def _resolve_tie_break(tie_break: Union[TieBreak, str, None]) -> TieBreak:
    if tie_break is None:
        return TieBreak(settings.DEFAULT_TIE_BREAK)
    return TieBreak(tie_break)


def complete_span_to_pushout(
    E: ProtoExactStructure,
    top: MorId,
    left: MorId,
    tie_break: Union[TieBreak, str, None] = None,
) -> Square:
    """
    以標準選擇補全 span

    Args:
        E: 原正合結構
        top: 可容許單態射（來源 tl）
        left: 可容許滿態射（來源 tl）
        tie_break: least（預設）或 greatest，比較 (br, right, bottom)

    Returns:
        Square: 選定的雙笛卡兒方塊

    Raises:
        RejectedSquareError: span 不合前置條件
        NotExactClosedError: 截斷範疇中不存在補全
    """
    C = E.base
    if top not in E.monos or left not in E.epis or C.source[top] != C.source[left]:
        raise RejectedSquareError("span must be (admissible mono, admissible epi) with a common source", (top, left))
    completions = span_completions(E, top, left)
    if not completions:
        raise NotExactClosedError(
            f"No pushout of span ({C.morphism_label(top)}, {C.morphism_label(left)}) in {E.name}",
            diagram={'top': top, 'left': left},
            enlargement=E.enlargement,
        )
    return completions[0] if _resolve_tie_break(tie_break) == TieBreak.LEAST else completions[-1]


def complete_cospan_to_pullback(
    E: ProtoExactStructure,
    right: MorId,
    bottom: MorId,
    tie_break: Union[TieBreak, str, None] = None,
) -> Square:
    """對偶於 complete_span_to_pushout，比較 (tl, top, left)"""
    C = E.base
    if right not in E.epis or bottom not in E.monos or C.target[right] != C.target[bottom]:
        raise RejectedSquareError("cospan must be (admissible epi, admissible mono) with a common target", (right, bottom))
    completions = cospan_completions(E, right, bottom)
    if not completions:
        raise NotExactClosedError(
            f"No pullback of cospan ({C.morphism_label(right)}, {C.morphism_label(bottom)}) in {E.name}",
            diagram={'right': right, 'bottom': bottom},
            enlargement=E.enlargement,
        )
    return completions[0] if _resolve_tie_break(tie_break) == TieBreak.LEAST else completions[-1]


def comparison_isomorphisms(C: FinCategory, first: Square, second: Square) -> List[MorId]:
    """
    連接同一 span 的兩個補全、且固定 span 的同構 u: first.br -> second.br

    泛性質保證恰有一個。
    """
    found = []
    for u in C.hom(first.br, second.br):
        if not C.is_iso(u):
            continue
        if C.compose(u, first.right) == second.right and C.compose(u, first.bottom) == second.bottom:
            found.append(u)
    return found
