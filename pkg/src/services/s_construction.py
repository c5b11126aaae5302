"""
Waldhausen S-construction
S 建構 - Ar[k] 網格的列舉、面與退化、第 0 列投影與低維度的辨識

A level-k cell is an exact functor Ar[k] -> E stored as a GridCell. Faces and
degeneracies re-index the grid; composites of elementary arrows fill the gaps.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

from src.domain.category import ProtoExactStructure, Square
from src.domain.cells import DiagramCell, GridCell, GroupoidOfCells, SeqCell
from src.domain.diagrams import DiagramShape, arrow_grid_shape, induced_shape
from src.domain.simplicial import TruncSimplicialSet
from src.services.diagram_service import diagram_violations, enumerate_diagrams, reindex
from src.services.groupoids import (
    DiagramIsoModel, EquivalenceReport, RestrictionFunctor, cell_diagram, check_groupoid_equivalence,
    grid_positions,
)
from src.services.seq_service import seq_groupoid
from src.services.universal import (
    _precondition_failure, _resolve_tie_break, complete_span_to_pushout, is_bicartesian,
)
from src.utils.exceptions import ValidationError
from src.utils.logger import get_logger
from src.utils.types import MorId, ObjId, Position, TieBreak


logger = get_logger('SConstruction')


# ==================== 格 ====================

def s_disc(E: ProtoExactStructure, k: int) -> List[GridCell]:
    """
    所有正合函子 Ar[k] -> E（回溯列舉，已排序）

    Raises:
        ScaleError: 搜尋超出工作預算
    """
    if k < 0:
        raise ValidationError('k', k, "level must be nonnegative")
    cells = [GridCell(level=k, objects=objs, arrows=arrows)
             for objs, arrows in enumerate_diagrams(E, arrow_grid_shape(k))]
    logger.debug("S level enumerated", structure=E.name, degree=k, cells=len(cells))
    return cells


def s_groupoid(E: ProtoExactStructure, k: int) -> GroupoidOfCells:
    return GroupoidOfCells(name=f"S_{k}({E.name})", structure=E, cells=tuple(s_disc(E, k)))


def validate_grid(E: ProtoExactStructure, g: GridCell) -> List[str]:
    """網格違反的條件（空清單表示有效）"""
    return diagram_violations(E, g.shape, g.objects, g.arrows)


# ==================== 面與退化 ====================

def _regrid(E: ProtoExactStructure, g: GridCell, level: int, index_map: Callable[[int], int]) -> GridCell:
    shape = arrow_grid_shape(level)
    objects, arrows = reindex(
        E.base, g.shape, cell_diagram(g), shape,
        lambda p: (index_map(p[0]), index_map(p[1])),
    )
    return GridCell(level=level, objects=objects, arrows=arrows)


def s_face(E: ProtoExactStructure, g: GridCell, m: int) -> GridCell:
    """d_m：刪去第 m 列與第 m 行，跨越處以合成補上"""
    if not 0 <= m <= g.level or g.level == 0:
        raise ValidationError('m', m, f"face index must be in [0, {g.level}] at a positive level")
    return _regrid(E, g, g.level - 1, lambda a: a if a < m else a + 1)


def s_degeneracy(E: ProtoExactStructure, g: GridCell, m: int) -> GridCell:
    """s_m：重複第 m 列與第 m 行，重複處為恆等"""
    if not 0 <= m <= g.level:
        raise ValidationError('m', m, f"degeneracy index must be in [0, {g.level}]")
    return _regrid(E, g, g.level + 1, lambda a: a if a <= m else a - 1)


def grid_iso_model(E: ProtoExactStructure, levels: List[List[GridCell]]) -> DiagramIsoModel:
    return DiagramIsoModel(
        E.base,
        diagram_of=lambda n, c: (arrow_grid_shape(n), cell_diagram(levels[n][c])),
        positions_for=grid_positions,
    )


def s_simplicial(E: ProtoExactStructure, N: int) -> TruncSimplicialSet:
    """S_•(E) 截斷於 N"""
    levels = [s_disc(E, k) for k in range(N + 1)]
    X = TruncSimplicialSet.from_operators(
        name=f"S({E.name})",
        cells=levels,
        face=lambda n, i, g: s_face(E, g, i),
        degeneracy=lambda n, i, g: s_degeneracy(E, g, i),
        iso_model=grid_iso_model(E, levels),
    )
    logger.info("S assembled", structure=E.name, bound=N, counts=[len(level) for level in levels])
    return X


# ==================== 由序列補全 ====================

def complete_seq_to_grid(
    E: ProtoExactStructure,
    c: SeqCell,
    tie_break: Union[TieBreak, str, None] = None,
) -> GridCell:
    """
    以標準推出把鏈補全為網格：對角線取標準零物件，A_ij（i >= 1）為 (A_{i-1,j-1} -> A_{i-1,j}, A_{i-1,j-1} ->> A_{i,j-1}) 的推出

    Raises:
        NotExactClosedError: 推出不在截斷範疇中
    """
    choice = _resolve_tie_break(tie_break)
    C = E.base
    k = c.level
    z = E.canonical_zero
    shape = arrow_grid_shape(k)
    objects: Dict[Position, ObjId] = {(i, i): z for i in range(k + 1)}
    horizontal: Dict[Position, MorId] = {}
    vertical: Dict[Position, MorId] = {}
    for j in range(1, k + 1):
        objects[(0, j)] = c.objects[j - 1]
    if k >= 1:
        horizontal[(0, 0)] = E.unique_morphism(z, c.objects[0])
    for j in range(1, k):
        horizontal[(0, j)] = c.links[j - 1]

    for i in range(1, k + 1):
        vertical[(i - 1, i)] = E.unique_morphism(objects[(i - 1, i)], z)
        for j in range(i + 1, k + 1):
            square = complete_span_to_pushout(E, horizontal[(i - 1, j - 1)], vertical[(i - 1, j - 1)], choice)
            objects[(i, j)] = square.br
            vertical[(i - 1, j)] = square.right
            horizontal[(i, j - 1)] = square.bottom

    arrows: List[MorId] = []
    for s, t in shape.arrows:
        source = shape.positions[s]
        arrows.append(horizontal[source] if shape.positions[t][1] > source[1] else vertical[source])
    return GridCell(level=k, objects=tuple(objects[p] for p in shape.positions), arrows=tuple(arrows))


def row0_projection(E: ProtoExactStructure, k: int, source: Optional[GroupoidOfCells] = None) -> RestrictionFunctor:
    """S_k(E) -> Seq_k(E)，網格 ↦ A_01 >-> ⋯ >-> A_0k"""
    shape = arrow_grid_shape(k)
    return RestrictionFunctor(
        name=f"row0: S_{k} -> Seq_{k} ({E.name})",
        source=source or s_groupoid(E, k),
        target=seq_groupoid(E, k),
        position_map=tuple(shape.index((0, j)) for j in range(1, k + 1)),
        image=lambda g: g.row0(),
    )


def enumeration_cross_check(
    E: ProtoExactStructure,
    k: int,
    tie_break: Union[TieBreak, str, None] = None,
) -> Dict[str, Any]:
    """
    直接列舉與「鏈 + 標準補全」兩種方式的交叉檢查

    每個補全都必須是 s_disc 的格且第 0 列還原原鏈；其餘的格由第 0 列投影的
    運輸判準（纖維大小與相對自同構）說明。
    """
    direct = s_groupoid(E, k)
    chains = seq_groupoid(E, k)
    completions = [complete_seq_to_grid(E, c, tie_break) for c in chains.cells]
    missing = [g for g in completions if direct.index(g) is None]
    row0_mismatch = [c for c, g in zip(chains.cells, completions) if g.row0() != c]
    equivalence = check_groupoid_equivalence(row0_projection(E, k, source=direct))
    return {
        'structure': E.name,
        'level': k,
        'direct_cells': len(direct.cells),
        'chains': len(chains.cells),
        'distinct_completions': len(set(completions)),
        'completions_outside_direct': len(missing),
        'row0_mismatches': len(row0_mismatch),
        'row0_equivalence': equivalence.equivalent,
        'passed': not missing and not row0_mismatch and equivalence.equivalent,
    }


# ==================== 低維度辨識 ====================

@dataclass(frozen=True)
class Restriction:
    """網格形狀在保留位置上的誘導子形狀與對應"""

    shape: DiagramShape
    sub: DiagramShape
    position_map: Tuple[int, ...]
    arrow_map: Tuple[int, ...]

    def image(self, cell: Any) -> DiagramCell:
        return DiagramCell(
            objects=tuple(cell.objects[p] for p in self.position_map),
            arrows=tuple(cell.arrows[a] for a in self.arrow_map),
            shape=self.sub,
        )


def restriction_of(shape: DiagramShape, kept: Tuple[Position, ...], name: str) -> Restriction:
    sub, position_map = induced_shape(shape, tuple(shape.index(p) for p in kept), name=name)
    arrow_map = tuple(
        shape.arrow(shape.positions[position_map[s]], shape.positions[position_map[t]])
        for s, t in sub.arrows
    )
    return Restriction(shape=shape, sub=sub, position_map=position_map, arrow_map=arrow_map)


EXSEQ_POSITIONS: Tuple[Position, ...] = ((0, 1), (0, 2), (1, 2))
BICART_POSITIONS: Tuple[Position, ...] = ((0, 2), (0, 3), (1, 2), (1, 3))


def exact_sequences(E: ProtoExactStructure) -> List[DiagramCell]:
    """
    短正合序列 A >-> B ->> C（獨立於 S_2 列舉）：(A, B, 0, C) 為雙笛卡兒方塊
    """
    C = E.base
    z = E.canonical_zero
    r = restriction_of(arrow_grid_shape(2), EXSEQ_POSITIONS, "ExSeq")
    cells: List[DiagramCell] = []
    for m in sorted(E.monos):
        a, b = C.source[m], C.target[m]
        to_zero = E.unique_morphism(a, z)
        for e in C.out_of(b):
            if e not in E.epis:
                continue
            from_zero = E.unique_morphism(z, C.target[e])
            square = Square(a, b, z, C.target[e], m, to_zero, e, from_zero)
            if _is_exact_pair(E, square):
                cells.append(DiagramCell(objects=(a, b, C.target[e]), arrows=_ordered(r, {(0, 1): m, (0, 2): e}),
                                         shape=r.sub))
    return sorted(cells)


def _ordered(r: Restriction, by_source: Dict[Position, MorId]) -> Tuple[MorId, ...]:
    return tuple(by_source[r.sub.positions[s]] for s, _ in r.sub.arrows)


def _is_exact_pair(E: ProtoExactStructure, square: Square) -> bool:
    return _precondition_failure(E, square) is None and is_bicartesian(E, square, check_classes=False)


def bicartesian_squares(E: ProtoExactStructure) -> List[DiagramCell]:
    """所有雙笛卡兒方塊（獨立於 S_3 列舉）"""
    r = restriction_of(arrow_grid_shape(3), BICART_POSITIONS, "BiCartSq")
    return [DiagramCell(objects=objs, arrows=arrows, shape=r.sub) for objs, arrows in enumerate_diagrams(E, r.sub)]


def _identification(
    E: ProtoExactStructure,
    k: int,
    kept: Tuple[Position, ...],
    name: str,
    targets: Callable[[Restriction], List[DiagramCell]],
    source: GroupoidOfCells,
    method: str,
) -> EquivalenceReport:
    r = restriction_of(arrow_grid_shape(k), kept, name)
    functor = RestrictionFunctor(
        name=f"S_{k} -> {name} ({E.name})",
        source=source,
        target=GroupoidOfCells(name=f"{name}({E.name})", structure=E, cells=tuple(targets(r))),
        position_map=r.position_map,
        image=r.image,
    )
    return check_groupoid_equivalence(functor, method=method)


@dataclass
class IdentificationReport:
    """S_0 ≅ Z(E)、S_1 ≃ core(E)、S_2 ≃ ExSeq(E)、S_3 ≃ BiCartSq(E)"""

    structure: str
    equivalences: Dict[str, EquivalenceReport] = field(default_factory=dict)
    counts: Dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        zero = self.equivalences.get('S0=Z')
        return all(r.equivalent for r in self.equivalences.values()) and bool(zero and zero.isomorphism)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'structure': self.structure,
            'passed': self.passed,
            'counts': self.counts,
            'equivalences': {name: r.to_dict() for name, r in self.equivalences.items()},
        }


def low_degree_identifications(E: ProtoExactStructure, method: str = "auto") -> IdentificationReport:
    """
    以 check_groupoid_equivalence 驗證四個低維度辨識；目標群胚皆獨立列舉
    """
    report = IdentificationReport(structure=E.name)
    groupoids = {k: s_groupoid(E, k) for k in range(4)}

    def points(objects: Tuple[ObjId, ...]) -> Callable[[Restriction], List[DiagramCell]]:
        return lambda r: [DiagramCell(objects=(a,), arrows=(), shape=r.sub) for a in objects]

    report.equivalences['S0=Z'] = _identification(
        E, 0, ((0, 0),), "Z", points(E.zeros), groupoids[0], method)
    report.equivalences['S1=core'] = _identification(
        E, 1, ((0, 1),), "core", points(E.base.objects), groupoids[1], method)
    ses = exact_sequences(E)
    report.equivalences['S2=ExSeq'] = _identification(
        E, 2, EXSEQ_POSITIONS, "ExSeq", lambda r: ses, groupoids[2], method)
    report.equivalences['S3=BiCartSq'] = _identification(
        E, 3, BICART_POSITIONS, "BiCartSq", lambda r: bicartesian_squares(E), groupoids[3], method)
    report.counts = {f"S{k}": len(g.cells) for k, g in groupoids.items()}
    report.counts['exact_sequences'] = len(ses)
    logger.info("Low-degree identifications checked", structure=E.name, passed=report.passed)
    return report


# ==================== 顯示 ====================

def render_grid(E: ProtoExactStructure, g: GridCell) -> str:
    """
    把網格畫成階梯圖（第 i 列為 A_{i,i+1} ... A_{ik}）

    A01 >-> A02
             |
            A12
    """
    k = g.level
    if k == 0:
        return E.base.label(g.obj(0, 0))
    labels = {(i, j): E.base.label(g.obj(i, j)) for i in range(k) for j in range(i + 1, k + 1)}
    width = max(len(s) for s in labels.values())
    cell_width = width + 5
    lines: List[str] = []
    for i in range(k):
        pad = " " * (cell_width * i)
        row = " >-> ".join(labels[(i, j)].ljust(width) for j in range(i + 1, k + 1))
        lines.append((pad + row).rstrip())
        if i < k - 1:
            bars = "".join(("|".center(width) + " " * 5) for _ in range(i + 2, k + 1))
            lines.append((" " * (cell_width * (i + 1)) + bars).rstrip())
    return "\n".join(lines)
