"""
Sigma-sets
Σ-集合：Δ×Δ 加上終物件 [-1] 上的預層（截斷於 p-次數）

A cell at [a, b] has p-degree a+1+b. Axis 0 operators act on the first index,
axis 1 on the second. The augmentation is stored only at [0, 0]; at [a, b] it
is the [0, 0] image followed by repeated s_0 on both axes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from src.domain.category import ProtoExactStructure
from src.utils.exceptions import TruncationError, ValidationError
from src.utils.types import CellId, LevelCount, SigmaIndex


@dataclass(frozen=True, order=True)
class SigmaObj:
    """Σ 的物件：[-1]（a = b = -1）或 [a, b]"""

    a: int
    b: int

    def __post_init__(self) -> None:
        if (self.a, self.b) != (-1, -1) and (self.a < 0 or self.b < 0):
            raise ValidationError('SigmaObj', (self.a, self.b), "pair indices must be nonnegative")

    @classmethod
    def augmentation(cls) -> 'SigmaObj':
        return cls(-1, -1)

    @classmethod
    def pair(cls, a: int, b: int) -> 'SigmaObj':
        return cls(a, b)

    @property
    def is_augmentation(self) -> bool:
        return self.a == -1

    def __str__(self) -> str:
        return "[-1]" if self.is_augmentation else f"[{self.a},{self.b}]"


def p_degree(o: SigmaObj) -> int:
    """[a, b] ↦ a+1+b，[-1] ↦ 0"""
    return 0 if o.is_augmentation else o.a + 1 + o.b


def sigma_indices(bound: int) -> Iterator[SigmaIndex]:
    """p-次數 <= bound 的所有 (a, b)，依 (p-次數, a) 排序"""
    for degree in range(1, bound + 1):
        for a in range(degree):
            yield a, degree - 1 - a


# (axis, a, b, i)
OperatorKey = Tuple[int, int, int, int]


def shifted(index: SigmaIndex, axis: int, delta: int) -> SigmaIndex:
    a, b = index
    return (a + delta, b) if axis == 0 else (a, b + delta)


@dataclass(frozen=True, eq=False)
class SigmaSet:
    """
    截斷的離散 Σ-集合

    Attributes:
        bound: p-次數上限 N
        cells: (a, b) -> payloads
        aug_cells: [-1] 的 payloads
        faces: (axis, a, b, i) -> 索引表
        degeneracies: (axis, a, b, i) -> 索引表
        aug_map: [-1] 的格 -> [0, 0] 的格
        generators: 呈現用的生成元 ((a, b), cell)；None 表示未呈現
        exact_category: 正合神經的來源（讓檢查使用運輸判準）
    """

    bound: int
    cells: Mapping[SigmaIndex, Tuple[Any, ...]]
    aug_cells: Tuple[Any, ...]
    faces: Mapping[OperatorKey, Tuple[CellId, ...]]
    degeneracies: Mapping[OperatorKey, Tuple[CellId, ...]]
    aug_map: Tuple[CellId, ...]
    name: str = "X"
    generators: Optional[Tuple[Tuple[SigmaIndex, CellId], ...]] = None
    exact_category: Optional[ProtoExactStructure] = None
    _cache: Dict[Any, Any] = field(default_factory=dict, repr=False, compare=False)

    def require(self, degree: int) -> None:
        if degree > self.bound:
            raise TruncationError(degree, self.bound, what=f"p-degree of {self.name}")

    def indices(self) -> Iterator[SigmaIndex]:
        yield from sigma_indices(self.bound)

    def count(self, index: SigmaIndex) -> int:
        self.require(index[0] + 1 + index[1])
        return len(self.cells[index])

    def payload(self, index: SigmaIndex, cell: CellId) -> Any:
        return self.cells[index][cell]

    def index_of(self, index: SigmaIndex, payload: Any) -> Optional[CellId]:
        key = ('index', index)
        table = self._cache.get(key)
        if table is None:
            table = {p: c for c, p in enumerate(self.cells[index])}
            self._cache[key] = table
        return table.get(payload)

    def aug_index_of(self, payload: Any) -> Optional[CellId]:
        table = self._cache.get('aug_index')
        if table is None:
            table = {p: z for z, p in enumerate(self.aug_cells)}
            self._cache['aug_index'] = table
        return table.get(payload)

    def face(self, axis: int, index: SigmaIndex, i: int, cell: CellId) -> CellId:
        return self.faces[(axis, index[0], index[1], i)][cell]

    def degeneracy(self, axis: int, index: SigmaIndex, i: int, cell: CellId) -> CellId:
        return self.degeneracies[(axis, index[0], index[1], i)][cell]

    def augmentation(self, index: SigmaIndex, z: CellId) -> CellId:
        """z 在 [a, b] 的增廣像（由 [0, 0] 以 s_0 逐軸升上）"""
        cell = self.aug_map[z]
        a, b = index
        for n in range(a):
            cell = self.degeneracy(0, (n, 0), 0, cell)
        for n in range(b):
            cell = self.degeneracy(1, (a, n), 0, cell)
        return cell

    def aug_preimages(self, cell: CellId) -> Tuple[CellId, ...]:
        table = self._cache.get('aug_inverse')
        if table is None:
            table = {}
            for z, c in enumerate(self.aug_map):
                table.setdefault(c, []).append(z)
            table = {c: tuple(zs) for c, zs in table.items()}
            self._cache['aug_inverse'] = table
        return table.get(cell, ())

    def level_counts(self) -> List[LevelCount]:
        counts = [LevelCount(level="-1", cells=len(self.aug_cells))]
        counts += [LevelCount(level=f"{a},{b}", cells=len(self.cells[(a, b)])) for a, b in self.indices()]
        return counts

    @classmethod
    def from_operators(
        cls,
        name: str,
        bound: int,
        cells: Mapping[SigmaIndex, Sequence[Any]],
        aug_cells: Sequence[Any],
        face: Callable[[int, SigmaIndex, int, Any], Any],
        degeneracy: Callable[[int, SigmaIndex, int, Any], Any],
        augment: Callable[[Any], Any],
        generators: Optional[Sequence[Tuple[SigmaIndex, Any]]] = None,
        exact_category: Optional[ProtoExactStructure] = None,
    ) -> 'SigmaSet':
        """
        由 payload 與運算子函式建立；生成元以 payload 給出

        Raises:
            ValidationError: 運算子的結果不在對應的格集合中
        """
        levels = {index: tuple(cells[index]) for index in sigma_indices(bound)}
        lookup_tables = {index: {p: c for c, p in enumerate(level)} for index, level in levels.items()}

        def lookup(index: SigmaIndex, payload: Any, op: str) -> CellId:
            found = lookup_tables[index].get(payload)
            if found is None:
                raise ValidationError(op, repr(payload), f"image is not a cell at {index} in {name}")
            return found

        faces: Dict[OperatorKey, Tuple[CellId, ...]] = {}
        degeneracies: Dict[OperatorKey, Tuple[CellId, ...]] = {}
        for (a, b), level in levels.items():
            for axis, k in ((0, a), (1, b)):
                if k >= 1:
                    lower = shifted((a, b), axis, -1)
                    for i in range(k + 1):
                        faces[(axis, a, b, i)] = tuple(
                            lookup(lower, face(axis, (a, b), i, p), f"d{i}@{axis}") for p in level)
                if a + b + 2 <= bound:
                    upper = shifted((a, b), axis, +1)
                    for i in range(k + 1):
                        degeneracies[(axis, a, b, i)] = tuple(
                            lookup(upper, degeneracy(axis, (a, b), i, p), f"s{i}@{axis}") for p in level)
        aug = tuple(aug_cells)
        aug_map = tuple(lookup((0, 0), augment(z), "aug") for z in aug) if bound >= 1 else ()
        gens = None
        if generators is not None:
            gens = tuple((index, lookup(index, p, "generator")) for index, p in generators)
        return cls(
            bound=bound, cells=levels, aug_cells=aug, faces=faces, degeneracies=degeneracies,
            aug_map=aug_map, name=name, generators=gens, exact_category=exact_category,
        )


@dataclass(frozen=True, order=True)
class SigmaMap:
    """
    樣板（有生成元呈現的 Σ-集合）到 X 的映射，由生成元與增廣格的像決定

    Attributes:
        template: 樣板名稱
        aug: 樣板每個增廣格的像（X 的增廣格）
        gens: 樣板每個生成元的像（X 的格）
    """

    template: str
    aug: Tuple[CellId, ...]
    gens: Tuple[CellId, ...]
