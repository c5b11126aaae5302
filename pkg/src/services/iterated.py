"""
Iterated S-construction
多重 S 建構 S^(n) - 乘積網格的列舉、多重單純結構，以及函子正合範疇 [Ar[k], E]
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Dict, FrozenSet, List, Tuple

from src.config import settings
from src.config.constants import MAX_ITERATED_ARITY, MAX_ITERATED_LEVEL
from src.domain.category import FinCategory, ProtoExactStructure, Square
from src.domain.cells import MultiGridCell
from src.domain.diagrams import arrow_grid_shape, multi_position, product_grid_shape, split_position
from src.domain.simplicial import IsoModel, MultiDegree, MultiSimplicialSet
from src.services.diagram_service import Family, diagram_morphisms, enumerate_diagrams, reindex
from src.services.groupoids import DiagramIsoModel, FamilyComposition, cell_diagram
from src.services.s_construction import s_disc
from src.services.universal import is_bicartesian
from src.utils.exceptions import ScaleError, ValidationError
from src.utils.logger import get_logger
from src.utils.types import BicartMode, MultiExactness, Position


logger = get_logger('IteratedS')


def _check_levels(levels: Tuple[int, ...]) -> None:
    if not 1 <= len(levels) <= MAX_ITERATED_ARITY:
        raise ValidationError('levels', list(levels), f"arity must be in [1, {MAX_ITERATED_ARITY}]")
    if any(k < 0 or k > MAX_ITERATED_LEVEL for k in levels):
        raise ValidationError('levels', list(levels), f"each level must be in [0, {MAX_ITERATED_LEVEL}]")


def s_iterated(
    E: ProtoExactStructure,
    levels: Tuple[int, ...],
    exactness: MultiExactness = MultiExactness.SEPARATE,
) -> List[MultiGridCell]:
    """
    所有正合多重函子 Ar[k_1]×⋯×Ar[k_n] -> E

    Raises:
        ValidationError: 軸數或層級超出桌面規模
        ScaleError: 搜尋超出工作預算
    """
    levels = tuple(levels)
    _check_levels(levels)
    exactness = MultiExactness(exactness)
    shape = product_grid_shape(levels, exactness)
    return [
        MultiGridCell(levels=levels, objects=objs, arrows=arrows, exactness=exactness)
        for objs, arrows in enumerate_diagrams(E, shape)
    ]


def _axis_map(axis: int, index_map: Callable[[int], int]) -> Callable[[Position], Position]:
    def position_map(p: Position) -> Position:
        pairs = list(split_position(p))
        i, j = pairs[axis]
        pairs[axis] = (index_map(i), index_map(j))
        return multi_position(tuple(pairs))
    return position_map


def multi_face(E: ProtoExactStructure, cell: MultiGridCell, axis: int, m: int) -> MultiGridCell:
    """沿 axis 的 d_m（重新索引）"""
    levels = cell.levels[:axis] + (cell.levels[axis] - 1,) + cell.levels[axis + 1:]
    target = product_grid_shape(levels, cell.exactness)
    objects, arrows = reindex(E.base, cell.shape, cell_diagram(cell), target,
                              _axis_map(axis, lambda a: a if a < m else a + 1))
    return MultiGridCell(levels=levels, objects=objects, arrows=arrows, exactness=cell.exactness)


def multi_degeneracy(E: ProtoExactStructure, cell: MultiGridCell, axis: int, m: int) -> MultiGridCell:
    """沿 axis 的 s_m"""
    levels = cell.levels[:axis] + (cell.levels[axis] + 1,) + cell.levels[axis + 1:]
    target = product_grid_shape(levels, cell.exactness)
    objects, arrows = reindex(E.base, cell.shape, cell_diagram(cell), target,
                              _axis_map(axis, lambda a: a if a <= m else a - 1))
    return MultiGridCell(levels=levels, objects=objects, arrows=arrows, exactness=cell.exactness)


class MultiGridIsoModel:
    """切片的同構模型：保留該軸兩端皆在頂點集合內的位置，其餘軸完整保留"""

    def __init__(self, C: FinCategory, cells: Dict[MultiDegree, Tuple[MultiGridCell, ...]],
                 exactness: MultiExactness):
        self.C = C
        self.cells = cells
        self.exactness = exactness

    def slice_model(self, axis: int, fixed: MultiDegree) -> IsoModel:
        def degree(n: int) -> MultiDegree:
            return fixed[:axis] + (n,) + fixed[axis + 1:]

        def diagram_of(n: int, c: int):
            cell = self.cells[degree(n)][c]
            return cell.shape, cell_diagram(cell)

        def positions_for(n: int, vertices: Tuple[int, ...]) -> FrozenSet[int]:
            shape = product_grid_shape(degree(n), self.exactness)
            chosen = set(vertices)
            return frozenset(
                idx for idx, p in enumerate(shape.positions)
                if split_position(p)[axis][0] in chosen and split_position(p)[axis][1] in chosen
            )

        return DiagramIsoModel(self.C, diagram_of, positions_for)


def s_iterated_set(
    E: ProtoExactStructure,
    bounds: Tuple[int, ...],
    exactness: MultiExactness = MultiExactness.SEPARATE,
) -> MultiSimplicialSet:
    """S^(n)(E) 截斷於每軸的 bounds"""
    bounds = tuple(bounds)
    _check_levels(bounds)
    exactness = MultiExactness(exactness)
    cells = {d: tuple(s_iterated(E, d, exactness)) for d in product(*(range(b + 1) for b in bounds))}
    X = MultiSimplicialSet.from_operators(
        name=f"S^({len(bounds)})({E.name})[{exactness.value}]",
        bounds=bounds,
        cells=cells,
        face=lambda axis, d, i, c: multi_face(E, c, axis, i),
        degeneracy=lambda axis, d, i, c: multi_degeneracy(E, c, axis, i),
        iso_model=MultiGridIsoModel(E.base, cells, exactness),
    )
    logger.info("Iterated S assembled", structure=E.name, bounds=list(bounds), exactness=exactness.value,
                counts={",".join(map(str, d)): len(c) for d, c in cells.items()})
    return X


# ==================== 函子正合範疇 ====================

@dataclass(frozen=True)
class LevelwiseOracle:
    """方塊在每個位置都是 E 中的雙笛卡兒方塊"""

    structure: ProtoExactStructure
    grid: FinCategory

    def is_bicartesian(self, square: Square) -> bool:
        families = self.grid._cache['families']
        objects = self.grid._cache['cells']
        E = self.structure
        for p in range(len(objects[square.tl].objects)):
            local = Square(
                tl=objects[square.tl].objects[p], tr=objects[square.tr].objects[p],
                bl=objects[square.bl].objects[p], br=objects[square.br].objects[p],
                top=families[square.top][p], left=families[square.left][p],
                right=families[square.right][p], bottom=families[square.bottom][p],
            )
            if not is_bicartesian(E, local, check_classes=False):
                return False
        return True

    def corner_filter(self, tl: int, tr: int, bl: int, br: int) -> bool:
        return True


def functor_exact_category(E: ProtoExactStructure, k: int) -> ProtoExactStructure:
    """
    [Ar[k], E]：物件為 S_k(E) 的網格，態射為與結構映射交換的族（不限同構）；
    單態射、滿態射、零物件與雙笛卡兒方塊皆逐位置判定

    Raises:
        ScaleError: 態射數超出工作預算
    """
    grids = tuple(s_disc(E, k))
    shape = arrow_grid_shape(k)
    C = E.base
    source: Dict[int, int] = {}
    target: Dict[int, int] = {}
    families: Dict[int, Family] = {}
    index: Dict[Tuple[int, Family], int] = {}
    identity: Dict[int, int] = {}
    for a, first in enumerate(grids):
        for b, second in enumerate(grids):
            for family in diagram_morphisms(C, shape, cell_diagram(first), cell_diagram(second)):
                m = len(source)
                if m >= settings.WORK_BUDGET:
                    raise ScaleError(f"morphisms of [Ar[{k}], {E.name}]", m, settings.WORK_BUDGET)
                source[m], target[m], families[m] = a, b, family
                index[(a, family)] = m
                if a == b and family == tuple(C.identity[obj] for obj in first.objects):
                    identity[a] = m

    base = FinCategory(
        objects=tuple(range(len(grids))),
        source=source,
        target=target,
        identity=identity,
        composition=FamilyComposition(C, source, target, families, index),
        object_labels={a: "[" + ",".join(C.label(o) for o in g.objects) + "]" for a, g in enumerate(grids)},
        name=f"[Ar[{k}],{E.name}]",
    )
    base._cache['families'] = families
    base._cache['cells'] = grids
    monos = frozenset(m for m, fam in families.items() if all(f in E.monos for f in fam))
    epis = frozenset(m for m, fam in families.items() if all(f in E.epis for f in fam))
    zeros = tuple(a for a, g in enumerate(grids) if all(E.is_zero(o) for o in g.objects))
    structure = ProtoExactStructure(
        base=base,
        monos=monos,
        epis=epis,
        zeros=zeros,
        bicart_mode=BicartMode.LEVELWISE,
        oracle=LevelwiseOracle(E, base),
        name=base.name,
        enlargement=E.enlargement,
    )
    logger.info("Functor exact category built", structure=E.name, degree=k,
                objects=len(grids), morphisms=len(source))
    return structure
