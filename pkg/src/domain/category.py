"""
Domain Models - Finite categories with proto-exact structure
有限範疇領域模型 - 以完整的複合表表示（extensional）

Ids are small integers. Object ids and morphism ids live in separate id
spaces; the enumeration order of a hom-set is ascending morphism id, and the
canonical tie-break of universal constructions compares those ids.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import (
    Any, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Protocol, Tuple,
)

from src.utils.types import BicartMode, MorId, ObjId, SquareKey


@dataclass(frozen=True, eq=False)
class FinCategory:
    """
    有限範疇

    Attributes:
        objects: 物件 id（遞增）
        source / target: 態射 -> 物件
        identity: 物件 -> 恆等態射
        composition: (g, f) -> g∘f，僅在 target(f) == source(g) 時定義
        object_labels / morphism_labels: 顯示用名稱
        inverses: 可選的反元素表（內建範疇預先計算），缺省時以搜尋求得
    """

    objects: Tuple[ObjId, ...]
    source: Mapping[MorId, ObjId]
    target: Mapping[MorId, ObjId]
    identity: Mapping[ObjId, MorId]
    composition: Mapping[Tuple[MorId, MorId], MorId]
    object_labels: Mapping[ObjId, str] = field(default_factory=dict)
    morphism_labels: Mapping[MorId, str] = field(default_factory=dict)
    name: str = "C"
    inverses: Optional[Mapping[MorId, MorId]] = None
    _cache: Dict[str, Any] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        homs: Dict[Tuple[ObjId, ObjId], List[MorId]] = {}
        for m in sorted(self.source):
            homs.setdefault((self.source[m], self.target[m]), []).append(m)
        self._cache['homs'] = {key: tuple(ms) for key, ms in homs.items()}
        self._cache['morphisms'] = tuple(sorted(self.source))

    # ========== 查詢 ==========

    @property
    def morphisms(self) -> Tuple[MorId, ...]:
        return self._cache['morphisms']

    def hom(self, a: ObjId, b: ObjId) -> Tuple[MorId, ...]:
        """Hom(a, b) in ascending id order."""
        return self._cache['homs'].get((a, b), ())

    def out_of(self, a: ObjId) -> Tuple[MorId, ...]:
        key = ('out', a)
        if key not in self._cache:
            self._cache[key] = tuple(m for b in self.objects for m in self.hom(a, b))
        return self._cache[key]

    def into(self, b: ObjId) -> Tuple[MorId, ...]:
        key = ('into', b)
        if key not in self._cache:
            self._cache[key] = tuple(m for a in self.objects for m in self.hom(a, b))
        return self._cache[key]

    def compose(self, g: MorId, f: MorId) -> MorId:
        """g∘f (apply f first)."""
        return self.composition[(g, f)]

    def compose_path(self, path: Iterable[MorId]) -> MorId:
        """Compose morphisms listed in the order they are applied."""
        result: Optional[MorId] = None
        for m in path:
            result = m if result is None else self.compose(m, result)
        if result is None:
            raise ValueError("empty path has no composite")
        return result

    def label(self, obj: ObjId) -> str:
        return self.object_labels.get(obj, str(obj))

    def morphism_label(self, m: MorId) -> str:
        return self.morphism_labels.get(m, str(m))

    # ========== 同構 ==========

    def inverse(self, m: MorId) -> Optional[MorId]:
        """Two-sided inverse of m, or None."""
        table = self._cache.get('inverse_table')
        if table is None:
            table = dict(self.inverses) if self.inverses is not None else self._search_inverses()
            self._cache['inverse_table'] = table
        return table.get(m)

    def _search_inverses(self) -> Dict[MorId, MorId]:
        found: Dict[MorId, MorId] = {}
        for m in self.morphisms:
            a, b = self.source[m], self.target[m]
            for g in self.hom(b, a):
                if self.compose(g, m) == self.identity[a] and self.compose(m, g) == self.identity[b]:
                    found[m] = g
                    break
        return found

    def is_iso(self, m: MorId) -> bool:
        return self.inverse(m) is not None

    def isomorphisms_out(self, a: ObjId) -> Tuple[MorId, ...]:
        key = ('isos_out', a)
        if key not in self._cache:
            self._cache[key] = tuple(m for m in self.out_of(a) if self.is_iso(m))
        return self._cache[key]

    def automorphisms(self, a: ObjId) -> Tuple[MorId, ...]:
        return tuple(m for m in self.isomorphisms_out(a) if self.target[m] == a)

    def isomorphic(self, a: ObjId, b: ObjId) -> bool:
        return any(self.target[m] == b for m in self.isomorphisms_out(a))

    def composable_pairs(self) -> Iterator[Tuple[MorId, MorId]]:
        """All (g, f) with target(f) == source(g)."""
        for b in self.objects:
            for f in self.into(b):
                for g in self.out_of(b):
                    yield g, f


@dataclass(frozen=True, order=True)
class Square:
    """
    可交換方塊

        tl --top--> tr
        |           |
       left       right
        v           v
        bl -bottom> br
    """

    tl: ObjId
    tr: ObjId
    bl: ObjId
    br: ObjId
    top: MorId
    left: MorId
    right: MorId
    bottom: MorId

    def key(self) -> SquareKey:
        return (self.tl, self.tr, self.bl, self.br, self.top, self.left, self.right, self.bottom)

    @classmethod
    def from_key(cls, key: Iterable[int]) -> 'Square':
        return cls(*key)

    @classmethod
    def from_morphisms(cls, C: FinCategory, top: MorId, left: MorId, right: MorId, bottom: MorId) -> 'Square':
        return cls(
            tl=C.source[top], tr=C.target[top], bl=C.target[left], br=C.target[right],
            top=top, left=left, right=right, bottom=bottom,
        )

    def commutes(self, C: FinCategory) -> bool:
        return C.compose(self.right, self.top) == C.compose(self.bottom, self.left)

    def boundary_consistent(self, C: FinCategory) -> bool:
        return (
            C.source[self.top] == self.tl and C.target[self.top] == self.tr
            and C.source[self.left] == self.tl and C.target[self.left] == self.bl
            and C.source[self.right] == self.tr and C.target[self.right] == self.br
            and C.source[self.bottom] == self.bl and C.target[self.bottom] == self.br
        )


class BicartesianOracle(Protocol):
    """Native bicartesian predicate (rank rule, levelwise functor categories)."""

    def is_bicartesian(self, square: Square) -> bool: ...

    def corner_filter(self, tl: ObjId, tr: ObjId, bl: ObjId, br: ObjId) -> bool: ...


@dataclass(frozen=True, eq=False)
class ProtoExactStructure:
    """
    原正合結構：可容許單態射、可容許滿態射、零物件與雙笛卡兒方塊

    Attributes:
        base: 底層有限範疇
        monos / epis: 可容許態射集合
        zeros: 零物件（遞增）
        bicart_mode: designated / derived / rank_rule / levelwise
        designated: designated 模式下的方塊清單
        oracle: rank_rule / levelwise 模式的原生判定
        enlargement: NotExactClosedError 建議的擴大方式
    """

    base: FinCategory
    monos: FrozenSet[MorId]
    epis: FrozenSet[MorId]
    zeros: Tuple[ObjId, ...]
    bicart_mode: BicartMode
    designated: FrozenSet[SquareKey] = frozenset()
    oracle: Optional[BicartesianOracle] = None
    name: str = "E"
    enlargement: Optional[str] = None
    dimension: Optional[Mapping[ObjId, int]] = None
    _cache: Dict[Any, Any] = field(default_factory=dict, repr=False, compare=False)

    @property
    def canonical_zero(self) -> ObjId:
        return self.zeros[0]

    def is_zero(self, obj: ObjId) -> bool:
        return obj in self._zero_set

    @property
    def _zero_set(self) -> FrozenSet[ObjId]:
        if 'zero_set' not in self._cache:
            self._cache['zero_set'] = frozenset(self.zeros)
        return self._cache['zero_set']

    def unique_morphism(self, a: ObjId, b: ObjId) -> Optional[MorId]:
        """The morphism a -> b when Hom(a, b) is a singleton."""
        hom = self.base.hom(a, b)
        return hom[0] if len(hom) == 1 else None

    def with_mode(self, mode: BicartMode, **changes: Any) -> 'ProtoExactStructure':
        """Same classes with another bicartesian decision mode (fresh caches)."""
        return ProtoExactStructure(
            base=self.base,
            monos=self.monos,
            epis=self.epis,
            zeros=self.zeros,
            bicart_mode=mode,
            designated=changes.get('designated', self.designated),
            oracle=changes.get('oracle', self.oracle),
            name=changes.get('name', f"{self.name}[{mode.value}]"),
            enlargement=self.enlargement,
            dimension=self.dimension,
        )


@dataclass(frozen=True, eq=False)
class FinFunctor:
    """有限範疇之間的函子（物件與態射對應表）"""

    source: FinCategory
    target: FinCategory
    object_map: Mapping[ObjId, ObjId]
    morphism_map: Mapping[MorId, MorId]
    name: str = "F"


@dataclass(frozen=True)
class IsoClassIndex:
    """同構類劃分；代表元為類中最小 id"""

    classes: Tuple[Tuple[ObjId, ...], ...]
    class_of: Mapping[ObjId, int]

    @property
    def representatives(self) -> Tuple[ObjId, ...]:
        return tuple(cls[0] for cls in self.classes)

    def representative(self, obj: ObjId) -> ObjId:
        return self.classes[self.class_of[obj]][0]

    def size_of_class(self, obj: ObjId) -> int:
        return len(self.classes[self.class_of[obj]])

    def __len__(self) -> int:
        return len(self.classes)


@dataclass(frozen=True)
class CategoryViolation:
    """範疇或結構公理的違反（資料，而非例外）"""

    rule: str
    witness: Tuple[int, ...]
    message: str = ""


@dataclass
class CategoryReport:
    """validate_category / validate_structure / validate_functor 的結果"""

    subject: str
    violations: List[CategoryViolation] = field(default_factory=list)
    checked: Dict[str, int] = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return not self.violations

    def add(self, rule: str, witness: Tuple[int, ...], message: str = "") -> None:
        self.violations.append(CategoryViolation(rule, tuple(witness), message))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'subject': self.subject,
            'valid': self.valid,
            'checked': dict(self.checked),
            'violations': [
                {'rule': v.rule, 'witness': list(v.witness), 'message': v.message}
                for v in self.violations
            ],
        }
