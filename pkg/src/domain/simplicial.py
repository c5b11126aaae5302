"""
Truncated simplicial sets and check reports
截斷單純集合、多重單純集合與檢查報告

Cells of a level are stored as a tuple of payloads; a cell id is its index in
that tuple. Operators are index maps.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import (
    Any, Callable, Dict, FrozenSet, Iterator, List, Mapping, Optional, Protocol, Sequence, Tuple,
)

from src.utils.exceptions import TruncationError, ValidationError
from src.utils.types import CellId, LevelCount, TwoSegalFamily


class IsoModel(Protocol):
    """
    格為正合圖時的同構模型：讓檢查以運輸判準（而非嚴格雙射）判定

    kept_positions 把頂點子集轉成保留位置；weight 與 relative_automorphism
    作用於 level n 的格。
    """

    def kept_positions(self, n: int, vertex_sets: Sequence[Sequence[int]]) -> FrozenSet[int]: ...

    def weight(self, n: int, cell: CellId, kept: FrozenSet[int]) -> int: ...

    def relative_automorphism(self, n: int, cell: CellId, kept: FrozenSet[int]) -> Optional[Tuple[int, ...]]: ...


@dataclass(frozen=True, eq=False)
class TruncSimplicialSet:
    """
    截斷於 bound 的單純集合

    Attributes:
        bound: 層級上限 N
        cells: level -> 格的 payload
        faces: (n, i) -> level n 到 n-1 的索引表，1 <= n <= N，0 <= i <= n
        degeneracies: (n, i) -> level n 到 n+1 的索引表，0 <= n < N，0 <= i <= n
        iso_model: 可選的同構模型
    """

    bound: int
    cells: Tuple[Tuple[Any, ...], ...]
    faces: Mapping[Tuple[int, int], Tuple[CellId, ...]]
    degeneracies: Mapping[Tuple[int, int], Tuple[CellId, ...]]
    name: str = "X"
    iso_model: Optional[IsoModel] = None
    _cache: Dict[Any, Any] = field(default_factory=dict, repr=False, compare=False)

    def count(self, n: int) -> int:
        self.require(n)
        return len(self.cells[n])

    def require(self, n: int) -> None:
        if n > self.bound:
            raise TruncationError(n, self.bound, what=f"level of {self.name}")

    def face(self, n: int, i: int, cell: CellId) -> CellId:
        return self.faces[(n, i)][cell]

    def degeneracy(self, n: int, i: int, cell: CellId) -> CellId:
        return self.degeneracies[(n, i)][cell]

    def payload(self, n: int, cell: CellId) -> Any:
        return self.cells[n][cell]

    def index_of(self, n: int, payload: Any) -> Optional[CellId]:
        key = ('index', n)
        table = self._cache.get(key)
        if table is None:
            table = {p: c for c, p in enumerate(self.cells[n])}
            self._cache[key] = table
        return table.get(payload)

    def level_counts(self) -> List[LevelCount]:
        return [LevelCount(level=str(n), cells=len(cells)) for n, cells in enumerate(self.cells)]

    @classmethod
    def from_operators(
        cls,
        name: str,
        cells: Sequence[Sequence[Any]],
        face: Callable[[int, int, Any], Any],
        degeneracy: Callable[[int, int, Any], Any],
        iso_model: Optional[IsoModel] = None,
    ) -> 'TruncSimplicialSet':
        """
        由 payload 層級與運算子函式建立（運算子結果以 payload 查表）

        Raises:
            ValidationError: 運算子的結果不在下一層的格集合中
        """
        levels = tuple(tuple(level) for level in cells)
        bound = len(levels) - 1
        index = [{p: c for c, p in enumerate(level)} for level in levels]

        def lookup(n: int, payload: Any, op: str) -> CellId:
            found = index[n].get(payload)
            if found is None:
                raise ValidationError(op, repr(payload), f"image is not a cell of level {n} in {name}")
            return found

        faces: Dict[Tuple[int, int], Tuple[CellId, ...]] = {}
        degeneracies: Dict[Tuple[int, int], Tuple[CellId, ...]] = {}
        for n in range(1, bound + 1):
            for i in range(n + 1):
                faces[(n, i)] = tuple(lookup(n - 1, face(n, i, p), f"d{i}") for p in levels[n])
        for n in range(bound):
            for i in range(n + 1):
                degeneracies[(n, i)] = tuple(lookup(n + 1, degeneracy(n, i, p), f"s{i}") for p in levels[n])
        return cls(
            bound=bound, cells=levels, faces=faces, degeneracies=degeneracies,
            name=name, iso_model=iso_model,
        )


MultiDegree = Tuple[int, ...]


class MultiIsoModel(Protocol):
    def slice_model(self, axis: int, fixed: MultiDegree) -> IsoModel: ...


@dataclass(frozen=True, eq=False)
class MultiSimplicialSet:
    """
    n 重單純集合（每軸各自截斷）

    Attributes:
        bounds: 每軸的層級上限
        cells: 多重次數 -> payload
        faces: (axis, degree, i) -> 索引表（degree[axis] 減一）
        degeneracies: (axis, degree, i) -> 索引表（degree[axis] 加一）
    """

    bounds: Tuple[int, ...]
    cells: Mapping[MultiDegree, Tuple[Any, ...]]
    faces: Mapping[Tuple[int, MultiDegree, int], Tuple[CellId, ...]]
    degeneracies: Mapping[Tuple[int, MultiDegree, int], Tuple[CellId, ...]]
    name: str = "X"
    iso_model: Optional[MultiIsoModel] = None

    @property
    def arity(self) -> int:
        return len(self.bounds)

    def degrees(self) -> Iterator[MultiDegree]:
        yield from product(*(range(b + 1) for b in self.bounds))

    def count(self, degree: MultiDegree) -> int:
        return len(self.cells[degree])

    def face(self, axis: int, degree: MultiDegree, i: int, cell: CellId) -> CellId:
        return self.faces[(axis, degree, i)][cell]

    def degeneracy(self, axis: int, degree: MultiDegree, i: int, cell: CellId) -> CellId:
        return self.degeneracies[(axis, degree, i)][cell]

    def level_counts(self) -> List[LevelCount]:
        return [LevelCount(level=",".join(map(str, d)), cells=len(self.cells[d])) for d in self.degrees()]

    @classmethod
    def from_operators(
        cls,
        name: str,
        bounds: Tuple[int, ...],
        cells: Mapping[MultiDegree, Sequence[Any]],
        face: Callable[[int, MultiDegree, int, Any], Any],
        degeneracy: Callable[[int, MultiDegree, int, Any], Any],
        iso_model: Optional[MultiIsoModel] = None,
    ) -> 'MultiSimplicialSet':
        levels = {d: tuple(cells[d]) for d in product(*(range(b + 1) for b in bounds))}
        index = {d: {p: c for c, p in enumerate(level)} for d, level in levels.items()}

        def lookup(d: MultiDegree, payload: Any, op: str) -> CellId:
            found = index[d].get(payload)
            if found is None:
                raise ValidationError(op, repr(payload), f"image is not a cell of degree {d} in {name}")
            return found

        faces: Dict[Tuple[int, MultiDegree, int], Tuple[CellId, ...]] = {}
        degeneracies: Dict[Tuple[int, MultiDegree, int], Tuple[CellId, ...]] = {}
        for d, level in levels.items():
            for axis, k in enumerate(d):
                if k >= 1:
                    lower = d[:axis] + (k - 1,) + d[axis + 1:]
                    for i in range(k + 1):
                        faces[(axis, d, i)] = tuple(lookup(lower, face(axis, d, i, p), f"d{i}@{axis}") for p in level)
                if k < bounds[axis]:
                    upper = d[:axis] + (k + 1,) + d[axis + 1:]
                    for i in range(k + 1):
                        degeneracies[(axis, d, i)] = tuple(
                            lookup(upper, degeneracy(axis, d, i, p), f"s{i}@{axis}") for p in level
                        )
        return cls(bounds=tuple(bounds), cells=levels, faces=faces, degeneracies=degeneracies,
                   name=name, iso_model=iso_model)


# ==================== 2-Segal 細分 ====================

@dataclass(frozen=True, order=True)
class SubdivisionSpec:
    """
    (n+1) 邊形以對角線 {i, j} 切成兩塊

    第一塊為頂點 {i..j}，第二塊為 {0..i} ∪ {j..n}，共用邊 {i, j}。
    """

    n: int
    i: int
    j: int

    def __post_init__(self) -> None:
        if not (0 <= self.i < self.j <= self.n):
            raise ValidationError('diagonal', (self.i, self.j), f"need 0 <= i < j <= n = {self.n}")
        if self.j - self.i < 2:
            raise ValidationError('diagonal', (self.i, self.j), "j - i must be at least 2")
        if (self.i, self.j) == (0, self.n):
            raise ValidationError('diagonal', (self.i, self.j), "(0, n) is an edge, not a diagonal")

    @property
    def first_leg(self) -> Tuple[int, ...]:
        return tuple(range(self.i, self.j + 1))

    @property
    def second_leg(self) -> Tuple[int, ...]:
        return tuple(range(0, self.i + 1)) + tuple(range(self.j, self.n + 1))

    @property
    def family(self) -> str:
        if self.i == 0:
            return TwoSegalFamily.LOWER.value
        if self.j == self.n:
            return TwoSegalFamily.UPPER.value
        return "inner"

    def in_family(self, family: TwoSegalFamily) -> bool:
        if family == TwoSegalFamily.ALL:
            return True
        if family == TwoSegalFamily.LOWER:
            return self.i == 0
        return self.j == self.n

    @classmethod
    def diagonals(cls, n: int, family: TwoSegalFamily = TwoSegalFamily.ALL) -> List['SubdivisionSpec']:
        specs = [
            cls(n, i, j)
            for i in range(n + 1) for j in range(i + 2, n + 1)
            if (i, j) != (0, n)
        ]
        return [s for s in specs if s.in_family(family)]


# ==================== 報告 ====================

@dataclass
class Verdict:
    """單一層級（或單一細分）的判定"""

    condition: str
    level: int
    passed: bool
    checked: int = 0
    detail: str = ""
    method: str = "strict"
    failures: int = 0
    witnesses: List[Dict[str, Any]] = field(default_factory=list)
    failure_kinds: Dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'condition': self.condition,
            'level': self.level,
            'detail': self.detail,
            'passed': self.passed,
            'method': self.method,
            'checked': self.checked,
            'failures': self.failures,
            'failure_kinds': dict(sorted(self.failure_kinds.items())),
            'witnesses': self.witnesses,
        }


@dataclass
class CheckReport:
    """
    檢查報告

    失敗的判定一定帶有可重新驗證的反例；checked_range 記錄實際檢查的層級範圍。
    """

    condition: str
    subject: str
    verdicts: List[Verdict] = field(default_factory=list)
    checked_range: Tuple[int, int] = (0, 0)
    notes: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def failing(self) -> List[Verdict]:
        return [v for v in self.verdicts if not v.passed]

    @property
    def witnesses(self) -> List[Dict[str, Any]]:
        return [w for v in self.verdicts for w in v.witnesses]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'condition': self.condition,
            'subject': self.subject,
            'passed': self.passed,
            'checked_range': list(self.checked_range),
            'verdicts': [v.to_dict() for v in self.verdicts],
            'notes': self.notes,
        }
