"""
Cells of the constructions
建構的格（cell）：子物件序列、Ar[k] 網格、乘積網格、矩形網格，以及格的群胚
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Tuple

from src.domain.category import ProtoExactStructure
from src.domain.diagrams import (
    DiagramShape, arrow_grid_shape, chain_shape, multi_position, product_grid_shape, rectangle_shape,
)
from src.utils.types import MorId, MultiExactness, ObjId, Position


@dataclass(frozen=True, order=True)
class SeqCell:
    """A_1 ↣ A_2 ↣ ⋯ ↣ A_k（k = 0 為空序列）"""

    objects: Tuple[ObjId, ...]
    links: Tuple[MorId, ...]

    @property
    def level(self) -> int:
        return len(self.objects)

    @property
    def shape(self) -> DiagramShape:
        return chain_shape(self.level)

    @property
    def arrows(self) -> Tuple[MorId, ...]:
        return self.links

    def describe(self, E: ProtoExactStructure) -> str:
        if not self.objects:
            return "()"
        parts = [E.base.label(self.objects[0])]
        for obj in self.objects[1:]:
            parts.append(f" >-> {E.base.label(obj)}")
        return "".join(parts)


@dataclass(frozen=True, order=True)
class GridCell:
    """
    Ar[k] -> E 的正合函子

    objects 與 arrows 對齊 arrow_grid_shape(level)。
    """

    level: int
    objects: Tuple[ObjId, ...]
    arrows: Tuple[MorId, ...]

    @property
    def shape(self) -> DiagramShape:
        return arrow_grid_shape(self.level)

    def obj(self, i: int, j: int) -> ObjId:
        return self.objects[self.shape.index((i, j))]

    def h(self, i: int, j: int) -> MorId:
        """A_ij ↣ A_i,j+1"""
        return self.arrows[self.shape.arrow((i, j), (i, j + 1))]

    def v(self, i: int, j: int) -> MorId:
        """A_ij ↠ A_i+1,j"""
        return self.arrows[self.shape.arrow((i, j), (i + 1, j))]

    def row0(self) -> SeqCell:
        k = self.level
        return SeqCell(
            objects=tuple(self.obj(0, j) for j in range(1, k + 1)),
            links=tuple(self.h(0, j) for j in range(1, k)),
        )


@dataclass(frozen=True, order=True)
class MultiGridCell:
    """Ar[k_1]×⋯×Ar[k_n] -> E；位置為攤平的 (i1, j1, i2, j2, ...)"""

    levels: Tuple[int, ...]
    objects: Tuple[ObjId, ...]
    arrows: Tuple[MorId, ...]
    exactness: MultiExactness = MultiExactness.SEPARATE

    @property
    def shape(self) -> DiagramShape:
        return product_grid_shape(self.levels, self.exactness)

    def obj(self, *pairs: Tuple[int, int]) -> ObjId:
        return self.objects[self.shape.index(multi_position(tuple(pairs)))]


@dataclass(frozen=True, order=True)
class RectCell:
    """[a]×[b] -> E（列為滿態射方向，行為單態射方向）"""

    rows: int
    cols: int
    objects: Tuple[ObjId, ...]
    arrows: Tuple[MorId, ...]

    @property
    def shape(self) -> DiagramShape:
        return rectangle_shape(self.rows, self.cols)

    def obj(self, r: int, c: int) -> ObjId:
        return self.objects[self.shape.index((r, c))]


@dataclass(frozen=True, eq=False)
class GroupoidOfCells:
    """
    格的群胚：物件為格，態射為與所有結構映射交換的同構族

    態射不預先列舉；見 src.services.groupoids。
    """

    name: str
    structure: ProtoExactStructure
    cells: Tuple[Any, ...]
    _cache: Dict[Any, Any] = field(default_factory=dict, repr=False, compare=False)

    def index(self, cell: Any) -> Optional[int]:
        table = self._cache.get('index')
        if table is None:
            table = {c: n for n, c in enumerate(self.cells)}
            self._cache['index'] = table
        return table.get(cell)

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)


def cell_positions(cell: Any) -> Sequence[Position]:
    return cell.shape.positions


@dataclass(frozen=True, order=True)
class DiagramCell:
    """任意形狀上的圖（同一群胚內形狀相同）"""

    objects: Tuple[ObjId, ...]
    arrows: Tuple[MorId, ...]
    shape: DiagramShape = field(compare=False)
