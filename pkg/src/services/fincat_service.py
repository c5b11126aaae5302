"""
Finite category service
有限範疇服務 - 公理驗證、同構類、核心群胚
"""
from __future__ import annotations

from typing import Dict, Iterable, List, Tuple

from src.config import settings
from src.domain.category import (
    CategoryReport, FinCategory, FinFunctor, IsoClassIndex, ProtoExactStructure, Square,
)
from src.utils.exceptions import ScaleError
from src.utils.logger import get_logger
from src.utils.types import BicartMode, MorId, ObjId


logger = get_logger('FinCatService')


def _triple_estimate(C: FinCategory) -> int:
    total = 0
    for b in C.objects:
        n_in = len(C.into(b))
        for c in C.objects:
            total += n_in * len(C.hom(b, c)) * len(C.out_of(c))
    return total


# ==================== 驗證 ====================

def validate_category(C: FinCategory) -> CategoryReport:
    """
    窮舉驗證範疇公理

    檢查恆等態射、複合的定義域、單位律與結合律。違反以資料回傳。

    Args:
        C: 有限範疇

    Returns:
        CategoryReport: 無違反時 valid 為 True

    Raises:
        ScaleError: 可複合三元組數量超出工作預算
    """
    estimate = _triple_estimate(C)
    if estimate > settings.WORK_BUDGET:
        raise ScaleError(f"composable triples of {C.name}", estimate, settings.WORK_BUDGET)

    report = CategoryReport(subject=C.name)

    for a in C.objects:
        ident = C.identity.get(a)
        if ident is None:
            report.add('missing_identity', (a,), f"object {C.label(a)} has no identity")
        elif C.source.get(ident) != a or C.target.get(ident) != a:
            report.add('identity_endpoints', (a, ident), "identity is not an endomorphism of its object")

    pairs = 0
    for g, f in C.composable_pairs():
        pairs += 1
        try:
            gf = C.compose(g, f)
        except KeyError:
            report.add('missing_composite', (g, f), "composable pair has no composite")
            continue
        if C.source.get(gf) != C.source[f] or C.target.get(gf) != C.target[g]:
            report.add('composite_endpoints', (g, f, gf), "composite has wrong source or target")

    if isinstance(C.composition, dict):
        for g, f in C.composition:
            if g not in C.source or f not in C.source or C.target[f] != C.source[g]:
                report.add('extra_composite', (g, f), "composite recorded for a non-composable pair")

    if not report.valid:
        report.checked = {'composable_pairs': pairs}
        return report

    for m in C.morphisms:
        a, b = C.source[m], C.target[m]
        if C.compose(m, C.identity[a]) != m or C.compose(C.identity[b], m) != m:
            report.add('unit_law', (m,), "identity is not a two-sided unit")

    triples = 0
    for b in C.objects:
        for f in C.into(b):
            for g in C.out_of(b):
                gf = C.compose(g, f)
                for h in C.out_of(C.target[g]):
                    triples += 1
                    if C.compose(h, gf) != C.compose(C.compose(h, g), f):
                        report.add('associativity', (h, g, f), "(h∘g)∘f differs from h∘(g∘f)")

    report.checked = {'composable_pairs': pairs, 'composable_triples': triples}
    logger.info("Category validated", category=C.name, valid=report.valid, triples=triples)
    return report


def validate_structure(E: ProtoExactStructure) -> CategoryReport:
    """
    驗證原正合結構的不變量

    恆等態射屬於兩類；兩類對複合封閉；零物件非空且與每個物件之間恰有一個態射
    （出發為單態射、抵達為滿態射）；designated 方塊交換且邊屬於正確的類。
    """
    C = E.base
    report = CategoryReport(subject=E.name)

    for a in C.objects:
        ident = C.identity[a]
        if ident not in E.monos:
            report.add('identity_not_mono', (a, ident))
        if ident not in E.epis:
            report.add('identity_not_epi', (a, ident))

    for name, cls in (('monos', E.monos), ('epis', E.epis)):
        for b in C.objects:
            for f in C.into(b):
                if f not in cls:
                    continue
                for g in C.out_of(b):
                    if g in cls and C.compose(g, f) not in cls:
                        report.add(f'{name}_not_closed', (g, f))

    if not E.zeros:
        report.add('no_zero_object', ())
    for z in E.zeros:
        for x in C.objects:
            out, into = C.hom(z, x), C.hom(x, z)
            if len(out) != 1 or out[0] not in E.monos:
                report.add('zero_out', (z, x), "zero must have a unique admissible mono to every object")
            if len(into) != 1 or into[0] not in E.epis:
                report.add('zero_in', (x, z), "every object must have a unique admissible epi to a zero")

    if E.bicart_mode == BicartMode.DESIGNATED:
        for key in sorted(E.designated):
            square = Square.from_key(key)
            if not square.boundary_consistent(C) or not square.commutes(C):
                report.add('designated_not_commuting', key)
            elif square.top not in E.monos or square.bottom not in E.monos:
                report.add('designated_horizontal_class', key)
            elif square.left not in E.epis or square.right not in E.epis:
                report.add('designated_vertical_class', key)

    report.checked = {'objects': len(C.objects), 'morphisms': len(C.morphisms)}
    logger.info("Structure validated", structure=E.name, valid=report.valid)
    return report


def validate_functor(F: FinFunctor) -> CategoryReport:
    """驗證函子保持來源、目標、恆等態射與複合"""
    S, T = F.source, F.target
    report = CategoryReport(subject=F.name)
    for a in S.objects:
        if a not in F.object_map:
            report.add('object_unmapped', (a,))
    for m in S.morphisms:
        if m not in F.morphism_map:
            report.add('morphism_unmapped', (m,))
    if not report.valid:
        return report

    for m in S.morphisms:
        fm = F.morphism_map[m]
        if T.source[fm] != F.object_map[S.source[m]] or T.target[fm] != F.object_map[S.target[m]]:
            report.add('endpoints', (m, fm))
    for a in S.objects:
        if F.morphism_map[S.identity[a]] != T.identity[F.object_map[a]]:
            report.add('identity', (a,))
    for g, f in S.composable_pairs():
        if F.morphism_map[S.compose(g, f)] != T.compose(F.morphism_map[g], F.morphism_map[f]):
            report.add('composition', (g, f))
    return report


# ==================== 同構類與群胚 ====================

def iso_classes(C: FinCategory) -> IsoClassIndex:
    """
    同構類劃分

    Returns:
        IsoClassIndex: 類依最小 id 排序，類內遞增
    """
    cached = C._cache.get('iso_classes')
    if cached is not None:
        return cached

    class_of: Dict[ObjId, int] = {}
    classes: List[Tuple[ObjId, ...]] = []
    for a in C.objects:
        if a in class_of:
            continue
        members = sorted({a} | {C.target[m] for m in C.isomorphisms_out(a)})
        for b in members:
            class_of[b] = len(classes)
        classes.append(tuple(members))

    index = IsoClassIndex(classes=tuple(classes), class_of=class_of)
    C._cache['iso_classes'] = index
    return index


def is_groupoid(C: FinCategory) -> bool:
    return all(C.is_iso(m) for m in C.morphisms)


def subcategory(C: FinCategory, objects: Iterable[ObjId], morphisms: Iterable[MorId], name: str) -> FinCategory:
    """由物件與（含恆等、對複合封閉的）態射子集構成的子範疇"""
    objs = tuple(sorted(set(objects)))
    kept = set(morphisms) | {C.identity[a] for a in objs}
    source = {m: C.source[m] for m in sorted(kept)}
    target = {m: C.target[m] for m in sorted(kept)}
    composition = {}
    for f in source:
        for g in source:
            if target[f] == source[g]:
                composition[(g, f)] = C.compose(g, f)
    inverses = {m: C.inverse(m) for m in source if C.inverse(m) in kept}
    return FinCategory(
        objects=objs,
        source=source,
        target=target,
        identity={a: C.identity[a] for a in objs},
        composition=composition,
        object_labels={a: C.label(a) for a in objs},
        morphism_labels={m: C.morphism_label(m) for m in source},
        name=name,
        inverses=inverses,
    )


def core(C: FinCategory) -> FinCategory:
    """
    最大子群胚：相同物件，態射為所有可逆態射
    """
    isos = [m for m in C.morphisms if C.is_iso(m)]
    result = subcategory(C, C.objects, isos, name=f"core({C.name})")
    logger.debug("Core computed", category=C.name, isomorphisms=len(isos))
    return result


def zero_groupoid(E: ProtoExactStructure) -> FinCategory:
    """零物件群胚 Z(E)"""
    C = E.base
    morphisms = [m for a in E.zeros for b in E.zeros for m in C.hom(a, b) if C.is_iso(m)]
    return subcategory(C, E.zeros, morphisms, name=f"Z({E.name})")


def identity_functor(C: FinCategory) -> FinFunctor:
    return FinFunctor(
        source=C,
        target=C,
        object_map={a: a for a in C.objects},
        morphism_map={m: m for m in C.morphisms},
        name=f"id({C.name})",
    )


def inclusion_functor(S: FinCategory, C: FinCategory) -> FinFunctor:
    """子範疇的包含函子（ids 共用）"""
    return FinFunctor(
        source=S,
        target=C,
        object_map={a: a for a in S.objects},
        morphism_map={m: m for m in S.morphisms},
        name=f"{S.name}->{C.name}",
    )
