"""
Seq construction
子物件序列建構 Seq^disc - 面映射以標準推出取商，並提供非單純性的見證搜尋

Level k holds the chains A_1 >-> ... >-> A_k. Quotients by A_1 are chosen by
complete_span_to_pushout, so the face d_0 depends on the tie-break; d_0 d_0 and
d_0 d_1 may then differ as cells while being isomorphic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Union

from src.config.constants import SEQ_WITNESS_MAX_LEVEL, SEQ_WITNESS_MIN_LEVEL
from src.domain.category import ProtoExactStructure
from src.domain.cells import GroupoidOfCells, SeqCell
from src.domain.diagrams import chain_shape
from src.domain.simplicial import TruncSimplicialSet
from src.services.diagram_service import diagram_isomorphisms, enumerate_diagrams
from src.services.universal import _resolve_tie_break, complete_span_to_pushout
from src.utils.exceptions import NotExactClosedError, ValidationError
from src.utils.logger import get_logger
from src.utils.types import MorId, TieBreak


logger = get_logger('SeqService')


# ==================== 格 ====================

def seq_disc(E: ProtoExactStructure, k: int) -> List[SeqCell]:
    """長度 k 的單態射鏈（k = 0 為空鏈）"""
    if k < 0:
        raise ValidationError('k', k, "level must be nonnegative")
    if k == 0:
        return [SeqCell(objects=(), links=())]
    return [SeqCell(objects=objs, links=arrows) for objs, arrows in enumerate_diagrams(E, chain_shape(k))]


def seq_groupoid(E: ProtoExactStructure, k: int) -> GroupoidOfCells:
    return GroupoidOfCells(name=f"Seq_{k}({E.name})", structure=E, cells=tuple(seq_disc(E, k)))


# ==================== 面與退化 ====================

def _quotients(E: ProtoExactStructure, c: SeqCell, tie_break: TieBreak) -> SeqCell:
    """d_0：A_j ↦ A_j / A_1（j >= 2），並由推出的泛性質誘導連結"""
    C = E.base
    z = E.canonical_zero
    to_zero = E.unique_morphism(c.objects[0], z)
    squares = []
    inclusion: Optional[MorId] = None
    for j in range(1, c.level):
        link = c.links[j - 1]
        inclusion = link if inclusion is None else C.compose(link, inclusion)
        squares.append(complete_span_to_pushout(E, inclusion, to_zero, tie_break))

    links = []
    for j in range(len(squares) - 1):
        here, there = squares[j], squares[j + 1]
        wanted = C.compose(there.right, c.links[j + 1])
        induced = [u for u in C.hom(here.br, there.br) if C.compose(u, here.right) == wanted]
        if len(induced) != 1 or induced[0] not in E.monos:
            raise NotExactClosedError(
                f"Quotient chain of {c.describe(E)} has no admissible induced mono at step {j + 1}",
                diagram={'cell': list(c.objects)},
                enlargement=E.enlargement,
            )
        links.append(induced[0])
    return SeqCell(objects=tuple(sq.br for sq in squares), links=tuple(links))


def seq_face(
    E: ProtoExactStructure,
    c: SeqCell,
    i: int,
    tie_break: Union[TieBreak, str, None] = None,
) -> SeqCell:
    """
    d_i：i > 0 刪去 A_i 並合成連結；i = 0 以標準推出取對 A_1 的商

    Raises:
        NotExactClosedError: 商不在截斷範疇中
    """
    k = c.level
    if not 0 <= i <= k:
        raise ValidationError('i', i, f"face index must be in [0, {k}]")
    if k == 0:
        raise ValidationError('c', c, "the empty chain has no faces")
    if i == 0:
        return _quotients(E, c, _resolve_tie_break(tie_break))
    objects = c.objects[:i - 1] + c.objects[i:]
    if i == 1:
        links = c.links[1:]
    elif i == k:
        links = c.links[:-1]
    else:
        merged = E.base.compose(c.links[i - 1], c.links[i - 2])
        links = c.links[:i - 2] + (merged,) + c.links[i:]
    return SeqCell(objects=objects, links=links)


def seq_degeneracy(E: ProtoExactStructure, c: SeqCell, i: int) -> SeqCell:
    """s_0 在前面補上標準零物件；s_i（i >= 1）以恆等連結重複 A_i"""
    k = c.level
    if not 0 <= i <= k:
        raise ValidationError('i', i, f"degeneracy index must be in [0, {k}]")
    C = E.base
    if i == 0:
        z = E.canonical_zero
        if k == 0:
            return SeqCell(objects=(z,), links=())
        return SeqCell(objects=(z,) + c.objects, links=(E.unique_morphism(z, c.objects[0]),) + c.links)
    a = c.objects[i - 1]
    return SeqCell(
        objects=c.objects[:i] + (a,) + c.objects[i:],
        links=c.links[:i - 1] + (C.identity[a],) + c.links[i - 1:],
    )


def seq_simplicial(
    E: ProtoExactStructure,
    N: int,
    tie_break: Union[TieBreak, str, None] = None,
) -> TruncSimplicialSet:
    """Seq^disc(E) 截斷於 N（不一定滿足單純恆等式）"""
    choice = _resolve_tie_break(tie_break)
    levels = [seq_disc(E, k) for k in range(N + 1)]
    X = TruncSimplicialSet.from_operators(
        name=f"Seq({E.name})[{choice.value}]",
        cells=levels,
        face=lambda n, i, c: seq_face(E, c, i, choice),
        degeneracy=lambda n, i, c: seq_degeneracy(E, c, i),
    )
    logger.info("Seq assembled", structure=E.name, bound=N, tie_break=choice.value,
                counts=[len(level) for level in levels])
    return X


# ==================== 非單純性見證 ====================

@dataclass
class SeqWitness:
    """
    d_0 d_0 與 d_0 d_1 不同的鏈，附上連接兩者的同構族；找不到時為窮舉相等證書
    """

    structure: str
    tie_break: str
    found: bool
    cell: Optional[SeqCell] = None
    lhs: Optional[SeqCell] = None
    rhs: Optional[SeqCell] = None
    iso: Optional[List[MorId]] = None
    certificate: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        def chain(c: Optional[SeqCell]) -> Optional[Dict[str, List[int]]]:
            return None if c is None else {'objects': list(c.objects), 'links': list(c.links)}

        return {
            'kind': 'seq_nonsimpliciality',
            'structure': self.structure,
            'tie_break': self.tie_break,
            'found': self.found,
            'identity': 'd0d1=d0d0',
            'cell': chain(self.cell),
            'lhs': chain(self.lhs),
            'rhs': chain(self.rhs),
            'iso': self.iso,
            'certificate': self.certificate,
        }


def seq_nonsimpliciality_witness(
    E: ProtoExactStructure,
    tie_break: Union[TieBreak, str, None] = None,
    max_level: int = SEQ_WITNESS_MAX_LEVEL,
) -> SeqWitness:
    """
    在 3..max_level 層搜尋 d_0 d_0(σ) ≠ d_0 d_1(σ) 的鏈

    Returns:
        SeqWitness: found 為 True 時帶有鏈、兩邊結果與同構族；
        否則 certificate 記錄檢查過的層級與鏈數
    """
    choice = _resolve_tie_break(tie_break)
    C = E.base
    checked: Dict[str, int] = {}
    for n in range(SEQ_WITNESS_MIN_LEVEL, max_level + 1):
        cells = seq_disc(E, n)
        checked[str(n)] = len(cells)
        for sigma in cells:
            lhs = seq_face(E, seq_face(E, sigma, 0, choice), 0, choice)
            rhs = seq_face(E, seq_face(E, sigma, 1, choice), 0, choice)
            if lhs == rhs:
                continue
            isos = diagram_isomorphisms(C, lhs.shape, (lhs.objects, lhs.links), (rhs.objects, rhs.links), limit=1)
            logger.info("Seq witness found", structure=E.name, tie_break=choice.value, degree=n)
            return SeqWitness(
                structure=E.name, tie_break=choice.value, found=True,
                cell=sigma, lhs=lhs, rhs=rhs, iso=list(isos[0]) if isos else None,
            )
    logger.info("Seq witness search exhausted", structure=E.name, tie_break=choice.value, checked=checked)
    return SeqWitness(
        structure=E.name, tie_break=choice.value, found=False,
        certificate={'levels': checked, 'identity': 'd0d1=d0d0', 'all_equal': True},
    )


def verify_seq_witness(E: ProtoExactStructure, witness: SeqWitness) -> bool:
    """
    重新驗證：見證須不相等且同構族成立；證書須在所列層級上窮舉相等
    """
    choice = TieBreak(witness.tie_break)
    C = E.base
    if not witness.found:
        for level in witness.certificate.get('levels', {}):
            for sigma in seq_disc(E, int(level)):
                lhs = seq_face(E, seq_face(E, sigma, 0, choice), 0, choice)
                rhs = seq_face(E, seq_face(E, sigma, 1, choice), 0, choice)
                if lhs != rhs:
                    return False
        return True

    sigma = witness.cell
    lhs = seq_face(E, seq_face(E, sigma, 0, choice), 0, choice)
    rhs = seq_face(E, seq_face(E, sigma, 1, choice), 0, choice)
    if lhs != witness.lhs or rhs != witness.rhs or lhs == rhs or witness.iso is None:
        return False
    iso = witness.iso
    for p, phi in enumerate(iso):
        if C.source.get(phi) != lhs.objects[p] or C.target.get(phi) != rhs.objects[p] or not C.is_iso(phi):
            return False
    return all(
        C.compose(rhs.links[a], iso[a]) == C.compose(iso[a + 1], lhs.links[a])
        for a in range(len(lhs.links))
    )
