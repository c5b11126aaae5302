"""
Diagram shapes
圖形（diagram shape）- 網格、矩形與乘積網格的位置、箭頭與方塊

A diagram of a given shape is stored as two tuples aligned with the shape:
objects (one per position) and arrows (one morphism id per elementary arrow).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product
from typing import Dict, FrozenSet, List, Optional, Tuple

from src.utils.types import ArrowKind, MultiExactness, Position


# 方塊：箭頭索引 (top, left, right, bottom)；tl -top-> tr -right-> br，tl -left-> bl -bottom-> br
SquareArrows = Tuple[int, int, int, int]


@dataclass(frozen=True)
class DiagramShape:
    """
    圖形

    Attributes:
        name: 顯示用名稱
        positions: 位置（依拓撲順序：箭頭的來源先於目標）
        arrows: (來源索引, 目標索引)
        kinds: 每個箭頭要求的類別
        squares: 必須為雙笛卡兒的方塊
        commuting: 只需交換的方塊
        zero_positions: 必須是零物件的位置索引
    """

    name: str
    positions: Tuple[Position, ...]
    arrows: Tuple[Tuple[int, int], ...]
    kinds: Tuple[ArrowKind, ...]
    squares: Tuple[SquareArrows, ...] = ()
    commuting: Tuple[SquareArrows, ...] = ()
    zero_positions: FrozenSet[int] = frozenset()

    @cached_property
    def _position_index(self) -> Dict[Position, int]:
        return {p: i for i, p in enumerate(self.positions)}

    @cached_property
    def _arrow_index(self) -> Dict[Tuple[int, int], int]:
        return {pair: a for a, pair in enumerate(self.arrows)}

    @cached_property
    def incoming(self) -> Tuple[Tuple[int, ...], ...]:
        """每個位置的入箭頭索引"""
        result: List[List[int]] = [[] for _ in self.positions]
        for a, (_, t) in enumerate(self.arrows):
            result[t].append(a)
        return tuple(tuple(r) for r in result)

    @cached_property
    def outgoing(self) -> Tuple[Tuple[int, ...], ...]:
        result: List[List[int]] = [[] for _ in self.positions]
        for a, (s, _) in enumerate(self.arrows):
            result[s].append(a)
        return tuple(tuple(r) for r in result)

    @cached_property
    def squares_ending_at(self) -> Tuple[Tuple[Tuple[SquareArrows, bool], ...], ...]:
        """位置 -> [(方塊, 是否需雙笛卡兒)]，方塊的 br 為該位置"""
        result: List[List[Tuple[SquareArrows, bool]]] = [[] for _ in self.positions]
        for sq in self.squares:
            result[self.arrows[sq[2]][1]].append((sq, True))
        for sq in self.commuting:
            result[self.arrows[sq[2]][1]].append((sq, False))
        return tuple(tuple(r) for r in result)

    def index(self, position: Position) -> int:
        return self._position_index[position]

    def has_position(self, position: Position) -> bool:
        return position in self._position_index

    def arrow(self, source: Position, target: Position) -> Optional[int]:
        """兩個位置間的基本箭頭索引"""
        s, t = self._position_index.get(source), self._position_index.get(target)
        if s is None or t is None:
            return None
        return self._arrow_index.get((s, t))

    def __len__(self) -> int:
        return len(self.positions)


# ==================== 圖形工廠 ====================

@lru_cache(maxsize=None)
def chain_shape(k: int) -> DiagramShape:
    """A_1 ↣ A_2 ↣ ⋯ ↣ A_k，位置 (j,)"""
    positions = tuple((j,) for j in range(1, k + 1))
    arrows = tuple((j, j + 1) for j in range(k - 1))
    return DiagramShape(
        name=f"chain[{k}]",
        positions=positions,
        arrows=arrows,
        kinds=tuple(ArrowKind.MONO for _ in arrows),
    )


@lru_cache(maxsize=None)
def arrow_grid_shape(k: int) -> DiagramShape:
    """
    Ar[k]：位置 (i, j)，0 <= i <= j <= k，列優先

    水平箭頭 (i,j) -> (i,j+1) 為單態射，垂直箭頭 (i,j) -> (i+1,j) 為滿態射；
    對角線 (i,i) 為零物件；基本方塊的右下角為 (i,j)，1 <= i < j。
    """
    positions = tuple((i, j) for i in range(k + 1) for j in range(i, k + 1))
    index = {p: n for n, p in enumerate(positions)}
    arrows: List[Tuple[int, int]] = []
    kinds: List[ArrowKind] = []
    horizontal: Dict[Position, int] = {}
    vertical: Dict[Position, int] = {}
    for (i, j) in positions:
        if j < k:
            horizontal[(i, j)] = len(arrows)
            arrows.append((index[(i, j)], index[(i, j + 1)]))
            kinds.append(ArrowKind.MONO)
        if i < j:
            vertical[(i, j)] = len(arrows)
            arrows.append((index[(i, j)], index[(i + 1, j)]))
            kinds.append(ArrowKind.EPI)
    squares = tuple(
        (horizontal[(i - 1, j - 1)], vertical[(i - 1, j - 1)], vertical[(i - 1, j)], horizontal[(i, j - 1)])
        for (i, j) in positions if 1 <= i < j
    )
    return DiagramShape(
        name=f"Ar[{k}]",
        positions=positions,
        arrows=tuple(arrows),
        kinds=tuple(kinds),
        squares=squares,
        zero_positions=frozenset(index[(i, i)] for i in range(k + 1)),
    )


@lru_cache(maxsize=None)
def rectangle_shape(a: int, b: int) -> DiagramShape:
    """
    [a]×[b]：位置 (r, c)；水平 (r,c) -> (r,c+1) 單態射，垂直 (r,c) -> (r+1,c) 滿態射
    """
    positions = tuple((r, c) for r in range(a + 1) for c in range(b + 1))
    index = {p: n for n, p in enumerate(positions)}
    arrows: List[Tuple[int, int]] = []
    kinds: List[ArrowKind] = []
    horizontal: Dict[Position, int] = {}
    vertical: Dict[Position, int] = {}
    for (r, c) in positions:
        if c < b:
            horizontal[(r, c)] = len(arrows)
            arrows.append((index[(r, c)], index[(r, c + 1)]))
            kinds.append(ArrowKind.MONO)
        if r < a:
            vertical[(r, c)] = len(arrows)
            arrows.append((index[(r, c)], index[(r + 1, c)]))
            kinds.append(ArrowKind.EPI)
    squares = tuple(
        (horizontal[(r, c)], vertical[(r, c)], vertical[(r, c + 1)], horizontal[(r + 1, c)])
        for (r, c) in positions if r < a and c < b
    )
    return DiagramShape(
        name=f"[{a}]x[{b}]",
        positions=positions,
        arrows=tuple(arrows),
        kinds=tuple(kinds),
        squares=squares,
    )


def multi_position(pairs: Tuple[Tuple[int, int], ...]) -> Position:
    """((i1, j1), (i2, j2), ...) -> (i1, j1, i2, j2, ...)"""
    return tuple(x for pair in pairs for x in pair)


def split_position(position: Position) -> Tuple[Tuple[int, int], ...]:
    return tuple((position[2 * t], position[2 * t + 1]) for t in range(len(position) // 2))


@lru_cache(maxsize=None)
def product_grid_shape(levels: Tuple[int, ...], exactness: MultiExactness = MultiExactness.SEPARATE) -> DiagramShape:
    """
    Ar[k_1]×⋯×Ar[k_n]

    separate：任一座標在對角線上即為零；同一軸內的基本方塊須為雙笛卡兒，跨軸方塊只需交換。
    joint：只有所有座標都在對角線上才為零；任一個 i-移動（滿）與 j-移動（單）構成的方塊
    須為雙笛卡兒，其餘方塊只需交換。
    """
    per_axis = [[(i, j) for i in range(k + 1) for j in range(i, k + 1)] for k in levels]
    positions = tuple(multi_position(pairs) for pairs in product(*per_axis))
    index = {p: n for n, p in enumerate(positions)}
    n_axes = len(levels)

    arrows: List[Tuple[int, int]] = []
    kinds: List[ArrowKind] = []
    # (position, axis, move) -> arrow index; move 'i' is vertical (epi), 'j' is horizontal (mono)
    moves: Dict[Tuple[Position, int, str], int] = {}

    def shifted(p: Position, axis: int, move: str) -> Optional[Position]:
        q = list(p)
        slot = 2 * axis + (0 if move == 'i' else 1)
        q[slot] += 1
        if q[2 * axis] > q[2 * axis + 1] or q[2 * axis + 1] > levels[axis]:
            return None
        return tuple(q)

    for p in positions:
        for axis in range(n_axes):
            for move in ('j', 'i'):
                q = shifted(p, axis, move)
                if q is None:
                    continue
                moves[(p, axis, move)] = len(arrows)
                arrows.append((index[p], index[q]))
                kinds.append(ArrowKind.MONO if move == 'j' else ArrowKind.EPI)

    squares: List[SquareArrows] = []
    commuting: List[SquareArrows] = []
    all_moves = [(axis, move) for axis in range(n_axes) for move in ('j', 'i')]
    for p in positions:
        for x, (ax1, mv1) in enumerate(all_moves):
            for (ax2, mv2) in all_moves[x + 1:]:
                if ax1 == ax2 and mv1 == mv2:
                    continue
                q1, q2 = shifted(p, ax1, mv1), shifted(p, ax2, mv2)
                if q1 is None or q2 is None:
                    continue
                r = shifted(q1, ax2, mv2)
                if r is None or shifted(q2, ax1, mv1) != r:
                    continue
                if mv1 == 'j' and mv2 == 'i':
                    top, left = moves[(p, ax1, mv1)], moves[(p, ax2, mv2)]
                    right, bottom = moves[(q1, ax2, mv2)], moves[(q2, ax1, mv1)]
                elif mv1 == 'i' and mv2 == 'j':
                    top, left = moves[(p, ax2, mv2)], moves[(p, ax1, mv1)]
                    right, bottom = moves[(q2, ax1, mv1)], moves[(q1, ax2, mv2)]
                else:
                    top, left = moves[(p, ax1, mv1)], moves[(p, ax2, mv2)]
                    right, bottom = moves[(q1, ax2, mv2)], moves[(q2, ax1, mv1)]
                    commuting.append((top, left, right, bottom))
                    continue
                mixed_kind = {mv1, mv2} == {'i', 'j'}
                same_axis = ax1 == ax2
                if mixed_kind and (same_axis or exactness == MultiExactness.JOINT):
                    squares.append((top, left, right, bottom))
                else:
                    commuting.append((top, left, right, bottom))

    def is_zero(p: Position) -> bool:
        diagonal = [p[2 * t] == p[2 * t + 1] for t in range(n_axes)]
        return all(diagonal) if exactness == MultiExactness.JOINT else any(diagonal)

    return DiagramShape(
        name="x".join(f"Ar[{k}]" for k in levels) + f"({exactness.value})",
        positions=positions,
        arrows=tuple(arrows),
        kinds=tuple(kinds),
        squares=tuple(squares),
        commuting=tuple(commuting),
        zero_positions=frozenset(index[p] for p in positions if is_zero(p)),
    )


def induced_shape(shape: DiagramShape, kept: Tuple[int, ...], name: Optional[str] = None) -> Tuple[DiagramShape, Tuple[int, ...]]:
    """
    保留位置上的誘導子形狀（只保留兩端都被保留的基本箭頭與方塊）

    Returns:
        (子形狀, 子形狀位置 -> 原位置)
    """
    position_map = tuple(sorted(kept))
    local = {p: n for n, p in enumerate(position_map)}
    arrow_map: Dict[int, int] = {}
    arrows: List[Tuple[int, int]] = []
    kinds: List[ArrowKind] = []
    for a, (s, t) in enumerate(shape.arrows):
        if s in local and t in local:
            arrow_map[a] = len(arrows)
            arrows.append((local[s], local[t]))
            kinds.append(shape.kinds[a])

    def keep_square(sq: SquareArrows) -> Optional[SquareArrows]:
        if all(a in arrow_map for a in sq):
            return tuple(arrow_map[a] for a in sq)  # type: ignore[return-value]
        return None

    squares = tuple(s for s in (keep_square(sq) for sq in shape.squares) if s is not None)
    commuting = tuple(s for s in (keep_square(sq) for sq in shape.commuting) if s is not None)
    sub = DiagramShape(
        name=name or f"{shape.name}|{len(position_map)}",
        positions=tuple(shape.positions[p] for p in position_map),
        arrows=tuple(arrows),
        kinds=tuple(kinds),
        squares=squares,
        commuting=commuting,
        zero_positions=frozenset(local[p] for p in shape.zero_positions if p in local),
    )
    return sub, position_map
