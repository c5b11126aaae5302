"""
Diagram service
圖形服務 - 依形狀列舉正合圖、驗證、沿同構族運輸、同構族搜尋
"""
from __future__ import annotations

from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from src.config import settings
from src.domain.category import FinCategory, ProtoExactStructure, Square
from src.domain.diagrams import DiagramShape
from src.services.universal import is_bicartesian, span_completions
from src.utils.exceptions import ScaleError, ValidationError
from src.utils.logger import get_logger
from src.utils.types import ArrowKind, MorId, ObjId, Position


logger = get_logger('DiagramService')

Diagram = Tuple[Tuple[ObjId, ...], Tuple[MorId, ...]]
Family = Tuple[MorId, ...]


def _in_class(E: ProtoExactStructure, kind: ArrowKind, m: MorId) -> bool:
    return m in (E.monos if kind == ArrowKind.MONO else E.epis)


def _square_of(shape: DiagramShape, sq: Tuple[int, int, int, int],
               objects: Sequence[ObjId], arrows: Sequence[MorId]) -> Square:
    top, left, right, bottom = sq
    return Square(
        tl=objects[shape.arrows[top][0]],
        tr=objects[shape.arrows[top][1]],
        bl=objects[shape.arrows[left][1]],
        br=objects[shape.arrows[right][1]],
        top=arrows[top], left=arrows[left], right=arrows[right], bottom=arrows[bottom],
    )


# ==================== 驗證 ====================

def diagram_violations(
    E: ProtoExactStructure,
    shape: DiagramShape,
    objects: Sequence[ObjId],
    arrows: Sequence[MorId],
) -> List[str]:
    """
    列出圖違反的條件（端點、類別、零物件、交換、雙笛卡兒）

    Returns:
        List[str]: 空清單表示圖有效
    """
    C = E.base
    problems: List[str] = []
    if len(objects) != len(shape.positions) or len(arrows) != len(shape.arrows):
        return [f"size mismatch for shape {shape.name}"]

    for p in shape.zero_positions:
        if not E.is_zero(objects[p]):
            problems.append(f"position {shape.positions[p]} is not a zero object")
    for a, (s, t) in enumerate(shape.arrows):
        m = arrows[a]
        if C.source.get(m) != objects[s] or C.target.get(m) != objects[t]:
            problems.append(f"arrow {shape.positions[s]}->{shape.positions[t]} has wrong endpoints")
        elif not _in_class(E, shape.kinds[a], m):
            problems.append(f"arrow {shape.positions[s]}->{shape.positions[t]} is not {shape.kinds[a].value}")
    if problems:
        return problems

    for sq in shape.commuting:
        if not _square_of(shape, sq, objects, arrows).commutes(C):
            problems.append(f"square at {shape.positions[shape.arrows[sq[0]][0]]} does not commute")
    for sq in shape.squares:
        square = _square_of(shape, sq, objects, arrows)
        if not square.commutes(C):
            problems.append(f"square at {shape.positions[shape.arrows[sq[0]][0]]} does not commute")
        elif not is_bicartesian(E, square, check_classes=False):
            problems.append(f"square at {shape.positions[shape.arrows[sq[0]][0]]} is not bicartesian")
    return problems


# ==================== 列舉 ====================

def enumerate_diagrams(E: ProtoExactStructure, shape: DiagramShape) -> List[Diagram]:
    """
    以回溯列舉形狀上所有滿足條件的圖

    每個位置依序決定：零位置取零物件與唯一態射；有雙笛卡兒方塊結束於此的位置
    以 span 補全決定；其餘由第一個入箭頭的可容許態射決定，剩餘入箭頭再列舉。

    Raises:
        ScaleError: 搜尋節點數超出工作預算
    """
    C = E.base
    n = len(shape.positions)
    objects: List[Optional[ObjId]] = [None] * n
    arrows: List[Optional[MorId]] = [None] * len(shape.arrows)
    results: List[Diagram] = []
    visited = 0

    def position_candidates(p: int) -> Iterator[Tuple[ObjId, Dict[int, MorId]]]:
        incoming = shape.incoming[p]
        if p in shape.zero_positions:
            for z in E.zeros:
                fixed: Dict[int, MorId] = {}
                for a in incoming:
                    m = E.unique_morphism(objects[shape.arrows[a][0]], z)
                    if m is None or not _in_class(E, shape.kinds[a], m):
                        break
                    fixed[a] = m
                else:
                    yield z, fixed
            return
        bicartesian = [sq for sq, needs in shape.squares_ending_at[p] if needs]
        if bicartesian:
            top, left, right, bottom = bicartesian[0]
            for square in span_completions(E, arrows[top], arrows[left]):
                yield square.br, {right: square.right, bottom: square.bottom}
            return
        if not incoming:
            for obj in C.objects:
                yield obj, {}
            return
        first = incoming[0]
        for m in C.out_of(objects[shape.arrows[first][0]]):
            if _in_class(E, shape.kinds[first], m):
                yield C.target[m], {first: m}

    def remaining(p: int, obj: ObjId, fixed: Dict[int, MorId]) -> Iterator[Dict[int, MorId]]:
        open_arrows = [a for a in shape.incoming[p] if a not in fixed]

        def extend(i: int, chosen: Dict[int, MorId]) -> Iterator[Dict[int, MorId]]:
            if i == len(open_arrows):
                yield chosen
                return
            a = open_arrows[i]
            for m in C.hom(objects[shape.arrows[a][0]], obj):
                if _in_class(E, shape.kinds[a], m):
                    chosen[a] = m
                    yield from extend(i + 1, chosen)
                    del chosen[a]

        yield from extend(0, dict(fixed))

    def squares_hold(p: int) -> bool:
        for sq, needs_bicart in shape.squares_ending_at[p]:
            square = _square_of(shape, sq, objects, arrows)
            if not square.commutes(C):
                return False
            if needs_bicart and not is_bicartesian(E, square, check_classes=False):
                return False
        return True

    def place(p: int) -> None:
        nonlocal visited
        if p == n:
            results.append((tuple(objects), tuple(arrows)))
            return
        for obj, fixed in position_candidates(p):
            objects[p] = obj
            for chosen in remaining(p, obj, fixed):
                visited += 1
                if visited > settings.WORK_BUDGET:
                    raise ScaleError(f"diagrams of shape {shape.name} in {E.name}", visited, settings.WORK_BUDGET)
                for a, m in chosen.items():
                    arrows[a] = m
                if squares_hold(p):
                    place(p + 1)
                for a in chosen:
                    arrows[a] = None
            objects[p] = None

    place(0)
    results.sort()
    logger.debug("Diagrams enumerated", shape=shape.name, structure=E.name, count=len(results), nodes=visited)
    return results


# ==================== 同構族 ====================

def transport(
    C: FinCategory,
    shape: DiagramShape,
    objects: Sequence[ObjId],
    arrows: Sequence[MorId],
    family: Sequence[MorId],
) -> Diagram:
    """沿同構族 φ 運輸圖：物件取 φ_p 的目標，箭頭 a ↦ φ_t ∘ a ∘ φ_s⁻¹"""
    new_objects = tuple(C.target[phi] for phi in family)
    new_arrows = []
    for a, (s, t) in enumerate(shape.arrows):
        back = C.inverse(family[s])
        new_arrows.append(C.compose(family[t], C.compose(arrows[a], back)))
    return new_objects, tuple(new_arrows)


def weight(C: FinCategory, objects: Sequence[ObjId], free: Sequence[int]) -> int:
    """∏_{p 自由} |從 A_p 出發的同構|"""
    total = 1
    for p in free:
        total *= len(C.isomorphisms_out(objects[p]))
    return total


def _search_families(
    C: FinCategory,
    shape: DiagramShape,
    source: Diagram,
    target: Diagram,
    candidates: Sequence[Sequence[MorId]],
    order: Sequence[int],
) -> Iterator[List[Optional[MorId]]]:
    src_arrows, dst_arrows = source[1], target[1]
    family: List[Optional[MorId]] = [None] * len(shape.positions)

    def consistent(p: int) -> bool:
        for a in shape.incoming[p] + shape.outgoing[p]:
            s, t = shape.arrows[a]
            if family[s] is None or family[t] is None:
                continue
            if C.compose(dst_arrows[a], family[s]) != C.compose(family[t], src_arrows[a]):
                return False
        return True

    def assign(i: int) -> Iterator[List[Optional[MorId]]]:
        if i == len(order):
            yield family
            return
        p = order[i]
        for phi in candidates[p]:
            family[p] = phi
            if consistent(p):
                yield from assign(i + 1)
        family[p] = None

    yield from assign(0)


def _connected_order(shape: DiagramShape, start: Sequence[int], free: Sequence[int]) -> List[int]:
    """自由位置的順序：每次取與已排序位置相連箭頭最多者"""
    placed = set(start)
    remaining = list(free)
    order: List[int] = []
    while remaining:
        def links(p: int) -> int:
            return sum(
                1 for a in shape.incoming[p] + shape.outgoing[p]
                if shape.arrows[a][0] in placed or shape.arrows[a][1] in placed
            )
        best = max(remaining, key=lambda p: (links(p), -p))
        order.append(best)
        placed.add(best)
        remaining.remove(best)
    return order


def diagram_isomorphisms(
    C: FinCategory,
    shape: DiagramShape,
    source: Diagram,
    target: Diagram,
    limit: Optional[int] = None,
) -> List[Family]:
    """
    兩個同形狀圖之間所有（或最多 limit 個）同構族

    Returns:
        List[Family]: 每個族為依位置排列的同構
    """
    candidates = [
        tuple(m for m in C.hom(source[0][p], target[0][p]) if C.is_iso(m))
        for p in range(len(shape.positions))
    ]
    if any(not c for c in candidates):
        return []
    order = _connected_order(shape, [], range(len(shape.positions)))
    found: List[Family] = []
    for family in _search_families(C, shape, source, target, candidates, order):
        found.append(tuple(family))
        if limit is not None and len(found) >= limit:
            break
    return found


def diagram_morphisms(C: FinCategory, shape: DiagramShape, source: Diagram, target: Diagram) -> List[Family]:
    """兩個圖之間所有自然態射族（不限同構）"""
    candidates = [C.hom(source[0][p], target[0][p]) for p in range(len(shape.positions))]
    if any(not c for c in candidates):
        return []
    order = _connected_order(shape, [], range(len(shape.positions)))
    return [tuple(f) for f in _search_families(C, shape, source, target, candidates, order)]


def relative_automorphism(
    C: FinCategory,
    shape: DiagramShape,
    diagram: Diagram,
    kept: FrozenSet[int],
) -> Optional[Family]:
    """
    在保留位置上為恆等的非恆等自同構族；不存在時回傳 None
    """
    objects = diagram[0]
    candidates: List[Tuple[MorId, ...]] = []
    for p, obj in enumerate(objects):
        candidates.append((C.identity[obj],) if p in kept else C.automorphisms(obj))
    free = [p for p in range(len(objects)) if p not in kept and len(candidates[p]) > 1]
    if not free:
        return None
    trivial = [p for p in range(len(objects)) if p in kept or len(candidates[p]) == 1]
    order = trivial + _connected_order(shape, trivial, free)
    for family in _search_families(C, shape, diagram, diagram, candidates, order):
        if any(family[p] != C.identity[objects[p]] for p in free):
            return tuple(family)
    return None


# ==================== 重新索引 ====================

def _path_morphism(C: FinCategory, shape: DiagramShape, diagram: Diagram, start: Position, end: Position) -> MorId:
    if start == end:
        return C.identity[diagram[0][shape.index(start)]]
    moved = [slot for slot, (a, b) in enumerate(zip(start, end)) if a != b]
    if len(moved) != 1 or end[moved[0]] < start[moved[0]]:
        raise ValidationError('reindex', (start, end), "positions must differ by a forward move in one coordinate")
    slot = moved[0]
    steps = []
    current = start
    while current != end:
        following = current[:slot] + (current[slot] + 1,) + current[slot + 1:]
        a = shape.arrow(current, following)
        if a is None:
            raise ValidationError('reindex', (current, following), f"no arrow in shape {shape.name}")
        steps.append(diagram[1][a])
        current = following
    return C.compose_path(steps)


def reindex(
    C: FinCategory,
    source_shape: DiagramShape,
    diagram: Diagram,
    target_shape: DiagramShape,
    position_map: Callable[[Position], Position],
) -> Diagram:
    """
    沿位置映射重新索引圖：目標箭頭取來源中對應路徑的合成（路徑長度 0 取恆等）
    """
    objects = tuple(diagram[0][source_shape.index(position_map(p))] for p in target_shape.positions)
    arrows = tuple(
        _path_morphism(C, source_shape, diagram,
                       position_map(target_shape.positions[s]), position_map(target_shape.positions[t]))
        for s, t in target_shape.arrows
    )
    return objects, arrows
