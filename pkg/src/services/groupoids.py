"""
Groupoid equivalence checks
群胚等價判定 - 明確（有限範疇）與運輸判準（正合圖的群胚）兩種路徑

A restriction functor between groupoids of diagrams is an equivalence iff it is
surjective on cells, every fiber has exactly ∏_{free p} |Isos_out(A_p)| cells,
and no non-identity family that is the identity on the kept positions fixes a
fiber cell.
"""
from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import (
    Any, Callable, Dict, FrozenSet, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple, Union,
)

from src.config import settings
from src.domain.category import FinCategory, FinFunctor
from src.domain.cells import GroupoidOfCells
from src.domain.diagrams import DiagramShape, arrow_grid_shape
from src.domain.simplicial import Verdict
from src.services.diagram_service import (
    Diagram, Family, diagram_isomorphisms, relative_automorphism, transport, weight,
)
from src.services.fincat_service import iso_classes
from src.utils.exceptions import ScaleError, ValidationError
from src.utils.logger import get_logger
from src.utils.types import CellId, MorId


logger = get_logger('Groupoids')


# ==================== 運輸判準 ====================

def restriction_verdict(
    condition: str,
    level: int,
    cells: Iterable[Any],
    image_of: Callable[[Any], Hashable],
    targets: Iterable[Hashable],
    weight_of: Optional[Callable[[Any], int]] = None,
    stabilizer_of: Optional[Callable[[Any], Optional[Tuple[int, ...]]]] = None,
    detail: str = "",
    describe: Callable[[Any], Any] = lambda x: x,
) -> Verdict:
    """
    判定限制映射是否為雙射（嚴格）或群胚等價（運輸判準）

    Args:
        condition: 條件名稱
        level: 層級
        cells: 來源格
        image_of: 格 -> 目標鍵
        targets: 獨立計算的目標集合
        weight_of: 格 -> 預期纖維大小；None 表示嚴格雙射
        stabilizer_of: 格 -> 相對非恆等自同構（或 None）
        describe: 反例中格與目標鍵的可序列化表示

    Returns:
        Verdict: 含 surjective / fiber / stabilizer 反例
    """
    fibers: Dict[Hashable, List[Any]] = {}
    checked = 0
    for cell in cells:
        checked += 1
        fibers.setdefault(image_of(cell), []).append(cell)
    target_set = set(targets)

    witnesses: List[Dict[str, Any]] = []
    kinds: Dict[str, int] = {}

    def record(witness: Dict[str, Any]) -> None:
        kinds[witness['kind']] = kinds.get(witness['kind'], 0) + 1
        if len(witnesses) < settings.MAX_WITNESSES:
            witnesses.append(witness)

    for key in sorted(target_set - set(fibers), key=repr):
        record({'kind': 'no_preimage', 'level': level, 'target': describe(key)})
    for key in sorted(set(fibers) - target_set, key=repr):
        record({'kind': 'image_outside_target', 'level': level, 'target': describe(key),
                'cell': describe(fibers[key][0])})

    for key in sorted(fibers, key=repr):
        fiber = fibers[key]
        expected = 1 if weight_of is None else weight_of(fiber[0])
        if len(fiber) != expected:
            witness = {'kind': 'collision' if len(fiber) > expected else 'fiber_deficit',
                       'level': level, 'target': describe(key), 'fiber_size': len(fiber),
                       'expected': expected, 'cells': [describe(c) for c in fiber[:2]]}
            record(witness)
            continue
        if stabilizer_of is not None:
            family = stabilizer_of(fiber[0])
            if family is not None:
                record({'kind': 'stabilizer', 'level': level, 'target': describe(key),
                        'cell': describe(fiber[0]), 'family': list(family)})

    failures = sum(kinds.values())
    return Verdict(
        condition=condition,
        level=level,
        passed=failures == 0,
        checked=checked,
        detail=detail,
        method="strict" if weight_of is None else "transport",
        failures=failures,
        witnesses=witnesses,
        failure_kinds=kinds,
    )


@lru_cache(maxsize=None)
def grid_positions(n: int, vertices: Tuple[int, ...]) -> FrozenSet[int]:
    """Ar[n] 中兩端都在頂點集合內的位置索引"""
    shape = arrow_grid_shape(n)
    chosen = set(vertices)
    return frozenset(shape.index((i, j)) for (i, j) in shape.positions if i in chosen and j in chosen)


class DiagramIsoModel:
    """
    單純集合的格為正合圖時的同構模型

    Args:
        C: 底層範疇
        diagram_of: (level, cell) -> (shape, (objects, arrows))
        positions_for: (level, 頂點集合) -> 保留位置
    """

    def __init__(
        self,
        C: FinCategory,
        diagram_of: Callable[[int, CellId], Tuple[DiagramShape, Diagram]],
        positions_for: Callable[[int, Tuple[int, ...]], FrozenSet[int]],
    ):
        self.C = C
        self._diagram_of = diagram_of
        self._positions_for = positions_for

    def diagram(self, n: int, cell: CellId) -> Tuple[DiagramShape, Diagram]:
        return self._diagram_of(n, cell)

    def kept_positions(self, n: int, vertex_sets: Sequence[Sequence[int]]) -> FrozenSet[int]:
        kept: FrozenSet[int] = frozenset()
        for vertices in vertex_sets:
            kept = kept | self._positions_for(n, tuple(sorted(set(vertices))))
        return kept

    def weight(self, n: int, cell: CellId, kept: FrozenSet[int]) -> int:
        shape, diagram = self._diagram_of(n, cell)
        free = [p for p in range(len(shape.positions)) if p not in kept]
        return weight(self.C, diagram[0], free)

    def relative_automorphism(self, n: int, cell: CellId, kept: FrozenSet[int]) -> Optional[Tuple[int, ...]]:
        shape, diagram = self._diagram_of(n, cell)
        return relative_automorphism(self.C, shape, diagram, kept)


# ==================== 格的群胚 ====================

def cell_diagram(cell: Any) -> Diagram:
    return tuple(cell.objects), tuple(cell.arrows)


def cell_isomorphisms(G: GroupoidOfCells, first: Any, second: Any, limit: Optional[int] = None) -> List[Family]:
    """兩個格之間的同構族"""
    if first.shape != second.shape:
        return []
    return diagram_isomorphisms(G.structure.base, first.shape, cell_diagram(first), cell_diagram(second), limit)


def cell_automorphisms(G: GroupoidOfCells, cell: Any) -> List[Family]:
    return cell_isomorphisms(G, cell, cell)


def transport_cell(G: GroupoidOfCells, cell: Any, family: Sequence[MorId]) -> Any:
    """沿族運輸一個格，回傳同類型的格"""
    objects, arrows = transport(G.structure.base, cell.shape, cell.objects, cell.arrows, family)
    return type(cell)(**{**_cell_fields(cell), 'objects': objects, 'arrows': arrows})


def _cell_fields(cell: Any) -> Dict[str, Any]:
    return {name: getattr(cell, name) for name in cell.__dataclass_fields__}


class FamilyComposition(Mapping):
    """逐位置合成的族複合表（延遲計算）"""

    def __init__(self, C: FinCategory, source: Dict[int, int], target: Dict[int, int],
                 families: Dict[int, Family], index: Dict[Tuple[int, Family], int]):
        self._C, self._source, self._target = C, source, target
        self._families, self._index = families, index

    def __getitem__(self, key: Tuple[int, int]) -> int:
        g, f = key
        if g not in self._source or f not in self._source or self._target[f] != self._source[g]:
            raise KeyError(key)
        fam = tuple(self._C.compose(a, b) for a, b in zip(self._families[g], self._families[f]))
        return self._index[(self._source[f], fam)]

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        by_source: Dict[int, List[int]] = {}
        for m, s in self._source.items():
            by_source.setdefault(s, []).append(m)
        for f, t in self._target.items():
            for g in by_source.get(t, []):
                yield g, f

    def __len__(self) -> int:
        out: Dict[int, int] = {}
        for s in self._source.values():
            out[s] = out.get(s, 0) + 1
        return sum(out.get(t, 0) for t in self._target.values())


def groupoid_category(G: GroupoidOfCells) -> FinCategory:
    """
    把格的群胚具體化為有限範疇（態射 = 從每個格出發的所有運輸族）

    Raises:
        ScaleError: 態射總數超出工作預算
        ValidationError: 格集合對運輸不封閉
    """
    cached = G._cache.get('category')
    if cached is not None:
        return cached
    C = G.structure.base
    estimate = 0
    for cell in G.cells:
        estimate += weight(C, cell.objects, range(len(cell.objects)))
    if estimate > settings.WORK_BUDGET:
        raise ScaleError(f"morphisms of {G.name}", estimate, settings.WORK_BUDGET)

    source: Dict[int, int] = {}
    target: Dict[int, int] = {}
    families: Dict[int, Family] = {}
    index: Dict[Tuple[int, Family], int] = {}
    identity: Dict[int, int] = {}
    for c, cell in enumerate(G.cells):
        choices = [C.isomorphisms_out(obj) for obj in cell.objects]
        ident = tuple(C.identity[obj] for obj in cell.objects)
        for family in product(*choices):
            moved = transport_cell(G, cell, family)
            d = G.index(moved)
            if d is None:
                raise ValidationError('cells', G.name, "cell set is not closed under transport")
            m = len(source)
            source[m], target[m], families[m] = c, d, tuple(family)
            index[(c, tuple(family))] = m
            if tuple(family) == ident:
                identity[c] = m

    inverses = {
        m: index[(target[m], tuple(C.inverse(phi) for phi in families[m]))]
        for m in source
    }
    category = FinCategory(
        objects=tuple(range(len(G.cells))),
        source=source,
        target=target,
        identity=identity,
        composition=FamilyComposition(C, source, target, families, index),
        name=G.name,
        inverses=inverses,
    )
    category._cache['families'] = families
    G._cache['category'] = category
    logger.debug("Groupoid materialized", groupoid=G.name, objects=len(G.cells), morphisms=len(source))
    return category


# ==================== 限制函子 ====================

@dataclass(frozen=True, eq=False)
class RestrictionFunctor:
    """
    格群胚之間的限制函子

    Attributes:
        source / target: 格的群胚（兩者都對運輸封閉）
        position_map: 目標位置 -> 來源位置
        image: 來源格 -> 目標格
    """

    name: str
    source: GroupoidOfCells
    target: GroupoidOfCells
    position_map: Tuple[int, ...]
    image: Callable[[Any], Any]

    @property
    def kept(self) -> FrozenSet[int]:
        return frozenset(self.position_map)

    def to_fin_functor(self) -> FinFunctor:
        """具體化為有限範疇之間的函子（受工作預算限制）"""
        S, T = groupoid_category(self.source), groupoid_category(self.target)
        s_fams, t_index = S._cache['families'], {}
        for m, fam in T._cache['families'].items():
            t_index[(T.source[m], fam)] = m
        object_map = {c: self.target.index(self.image(cell)) for c, cell in enumerate(self.source.cells)}
        morphism_map = {
            m: t_index[(object_map[S.source[m]], tuple(s_fams[m][p] for p in self.position_map))]
            for m in S.morphisms
        }
        return FinFunctor(source=S, target=T, object_map=object_map, morphism_map=morphism_map, name=self.name)


@dataclass
class EquivalenceReport:
    """群胚等價判定結果"""

    name: str
    essentially_surjective: bool
    fully_faithful: bool
    method: str
    witnesses: List[Dict[str, Any]] = field(default_factory=list)
    isomorphism: Optional[bool] = None
    counts: Dict[str, int] = field(default_factory=dict)

    @property
    def equivalent(self) -> bool:
        return self.essentially_surjective and self.fully_faithful

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'essentially_surjective': self.essentially_surjective,
            'fully_faithful': self.fully_faithful,
            'isomorphism': self.isomorphism,
            'method': self.method,
            'counts': self.counts,
            'witnesses': self.witnesses,
        }


def _explicit_equivalence(F: FinFunctor, exhaustive: bool) -> EquivalenceReport:
    S, T = F.source, F.target
    witnesses: List[Dict[str, Any]] = []
    s_classes, t_classes = iso_classes(S), iso_classes(T)

    hit = {t_classes.class_of[F.object_map[a]] for a in S.objects}
    missed = [cls[0] for n, cls in enumerate(t_classes.classes) if n not in hit]
    for rep in missed[:settings.MAX_WITNESSES]:
        witnesses.append({'kind': 'missed_class', 'object': rep, 'label': T.label(rep)})
    essentially_surjective = not missed

    fully_faithful = True
    seen: Dict[int, int] = {}
    for rep in s_classes.representatives:
        image_class = t_classes.class_of[F.object_map[rep]]
        if image_class in seen:
            fully_faithful = False
            witnesses.append({'kind': 'classes_identified', 'objects': [seen[image_class], rep]})
        seen.setdefault(image_class, rep)
        auts = S.automorphisms(rep)
        images = {F.morphism_map[m] for m in auts}
        target_auts = T.automorphisms(F.object_map[rep])
        if len(images) != len(auts):
            fully_faithful = False
            witnesses.append({'kind': 'not_faithful', 'object': rep})
        elif len(images) != len(target_auts):
            fully_faithful = False
            witnesses.append({'kind': 'not_full', 'object': rep})

    if exhaustive:
        for a in S.objects:
            for b in S.objects:
                images = [F.morphism_map[m] for m in S.hom(a, b)]
                target_hom = T.hom(F.object_map[a], F.object_map[b])
                if len(set(images)) != len(images) or len(images) != len(target_hom):
                    fully_faithful = False
                    witnesses.append({'kind': 'hom_not_bijective', 'objects': [a, b]})

    isomorphism = (
        len(set(F.object_map.values())) == len(S.objects) == len(T.objects)
        and len(set(F.morphism_map.values())) == len(S.morphisms) == len(T.morphisms)
    )
    return EquivalenceReport(
        name=F.name,
        essentially_surjective=essentially_surjective,
        fully_faithful=fully_faithful,
        method="explicit",
        witnesses=witnesses[:settings.MAX_WITNESSES],
        isomorphism=isomorphism,
        counts={'source_classes': len(s_classes), 'target_classes': len(t_classes)},
    )


def _transport_equivalence(R: RestrictionFunctor) -> EquivalenceReport:
    C = R.source.structure.base
    kept = R.kept
    free_positions: Dict[Any, List[int]] = {}

    def free(cell: Any) -> List[int]:
        key = cell.shape
        if key not in free_positions:
            free_positions[key] = [p for p in range(len(cell.shape.positions)) if p not in kept]
        return free_positions[key]

    verdict = restriction_verdict(
        condition=R.name,
        level=0,
        cells=R.source.cells,
        image_of=R.image,
        targets=R.target.cells,
        weight_of=lambda cell: weight(C, cell.objects, free(cell)),
        stabilizer_of=lambda cell: relative_automorphism(C, cell.shape, cell_diagram(cell), kept),
        describe=repr,
    )
    kinds = verdict.failure_kinds
    surjective = not kinds.get('no_preimage') and not kinds.get('image_outside_target')
    fibers_ok = not any(kinds.get(k) for k in ('collision', 'fiber_deficit', 'stabilizer'))
    all_kept = len(kept) == len(R.source.cells[0].objects) if R.source.cells else True
    return EquivalenceReport(
        name=R.name,
        essentially_surjective=surjective,
        fully_faithful=fibers_ok,
        method="transport",
        witnesses=verdict.witnesses,
        isomorphism=verdict.passed and all_kept,
        counts={'source_cells': len(R.source.cells), 'target_cells': len(R.target.cells)},
    )


def check_groupoid_equivalence(
    F: Union[FinFunctor, RestrictionFunctor],
    exhaustive: bool = False,
    method: str = "auto",
) -> EquivalenceReport:
    """
    判定群胚之間的函子是否為等價

    Args:
        F: FinFunctor（明確路徑）或 RestrictionFunctor（運輸判準）
        exhaustive: 明確路徑下逐對檢查 Hom 集合
        method: auto / explicit / transport；RestrictionFunctor 可強制 explicit

    Returns:
        EquivalenceReport
    """
    if isinstance(F, RestrictionFunctor):
        report = _explicit_equivalence(F.to_fin_functor(), exhaustive) if method == "explicit" \
            else _transport_equivalence(F)
    else:
        report = _explicit_equivalence(F, exhaustive)
    logger.info(
        "Equivalence checked",
        functor=report.name, method=report.method,
        essentially_surjective=report.essentially_surjective, fully_faithful=report.fully_faithful,
    )
    return report
