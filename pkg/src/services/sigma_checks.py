"""
Sigma-set checks
Σ-集合的檢查 - 雙單純恆等式、增廣自然性、點化與（半）穩定性

Pointedness and stability are decided in their discrete form: a restriction
map is a bijection. On an exact nerve the cells are diagrams, and the same maps
are decided up to isomorphism with the transport criterion.
"""
from __future__ import annotations

from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Sequence, Tuple, Union

from src.config import settings
from src.domain.category import ProtoExactStructure
from src.domain.cells import RectCell
from src.domain.diagrams import rectangle_shape
from src.domain.sigma_set import SigmaSet, shifted, sigma_indices
from src.domain.simplicial import CheckReport, TruncSimplicialSet, Verdict
from src.services.diagram_service import relative_automorphism, weight
from src.services.groupoids import cell_diagram, restriction_verdict
from src.services.sigma_service import (
    _coface, _codegeneracy, _moves, _step, exact_nerve, mapping_space, p_delta, precompose, present, product_sigma_set,
    sigma_representable,
)
from src.services.simplicial_checks import fiber_product, validate_simplicial
from src.utils.exceptions import ValidationError
from src.utils.logger import get_logger
from src.utils.types import CellId, SigmaIndex, StabilityMode


logger = get_logger('SigmaChecks')


# ==================== 恆等式 ====================

def sigma_slice(X: SigmaSet, axis: int, fixed: int) -> TruncSimplicialSet:
    """固定另一軸為 fixed 的單純切片"""
    top = X.bound - 1 - fixed
    if top < 0:
        raise ValidationError('fixed', fixed, f"no cells with that index in {X.name}")

    def index(n: int) -> SigmaIndex:
        return (n, fixed) if axis == 0 else (fixed, n)

    faces = {}
    degeneracies = {}
    for n in range(top + 1):
        a, b = index(n)
        for i in range(n + 1):
            if n >= 1:
                faces[(n, i)] = X.faces[(axis, a, b, i)]
            if n < top:
                degeneracies[(n, i)] = X.degeneracies[(axis, a, b, i)]
    return TruncSimplicialSet(
        bound=top,
        cells=tuple(X.cells[index(n)] for n in range(top + 1)),
        faces=faces,
        degeneracies=degeneracies,
        name=f"{X.name}[axis {axis}, {'b' if axis == 0 else 'a'}={fixed}]",
    )


def _cross_instances(X: SigmaSet, index: SigmaIndex) -> Iterable[Tuple[str, List[Tuple], List[Tuple]]]:
    """跨軸交換：兩軸上的運算子（面或退化）以任一順序套用結果相同"""
    ops: Dict[int, List[Tuple[Tuple, SigmaIndex]]] = {
        axis: [(step, target) for step, target in _moves(X, index) if step[1] == axis] for axis in (0, 1)
    }
    for first, mid in ops[0]:
        for second, _ in ops[1]:
            kind0, _, _, i = first
            kind1, _, _, j = second
            other_mid = shifted(index, 1, -1 if kind1 == 'd' else +1)
            end = shifted(mid, 1, -1 if kind1 == 'd' else +1)
            if sum(end) + 1 > X.bound or sum(other_mid) + 1 > X.bound:
                continue
            lhs = [first, (kind1, 1, mid, j)]
            rhs = [second, (kind0, 0, other_mid, i)]
            yield f"{kind0}{i}@0 {kind1}{j}@1", lhs, rhs


def validate_sigma_set(X: SigmaSet) -> CheckReport:
    """
    每軸切片的單純恆等式、兩軸運算子的交換，以及增廣的自然性（窮舉）
    """
    report = CheckReport(condition="identities", subject=X.name, checked_range=(0, X.bound))
    for axis in (0, 1):
        for fixed in range(X.bound):
            for verdict in validate_simplicial(sigma_slice(X, axis, fixed)).verdicts:
                verdict.detail = f"axis {axis}, other index {fixed}"
                report.verdicts.append(verdict)

    failures, checked = 0, 0
    witnesses: List[Dict[str, Any]] = []
    for index in X.indices():
        for name, lhs, rhs in _cross_instances(X, index):
            for cell in range(X.count(index)):
                checked += 1
                left, right = cell, cell
                for step in lhs:
                    left = _step(X, step, left)
                for step in rhs:
                    right = _step(X, step, right)
                if left != right:
                    failures += 1
                    if len(witnesses) < settings.MAX_WITNESSES:
                        witnesses.append({'kind': 'commutation', 'identity': name, 'index': list(index),
                                          'cell': cell, 'lhs': left, 'rhs': right})
    report.verdicts.append(Verdict(
        condition="identities", level=X.bound, passed=failures == 0, checked=checked,
        detail="axes commute", failures=failures, witnesses=witnesses,
        failure_kinds={'commutation': failures} if failures else {},
    ))

    failures, checked = 0, 0
    witnesses = []
    for index in X.indices():
        for step, target in _moves(X, index):
            for z in range(len(X.aug_cells)):
                checked += 1
                moved = _step(X, step, X.augmentation(index, z))
                if moved != X.augmentation(target, z):
                    failures += 1
                    if len(witnesses) < settings.MAX_WITNESSES:
                        witnesses.append({'kind': 'augmentation', 'index': list(index), 'aug_cell': z,
                                          'op': [step[0], step[1], step[3]], 'lhs': moved,
                                          'rhs': X.augmentation(target, z)})
    report.verdicts.append(Verdict(
        condition="identities", level=0, passed=failures == 0, checked=checked,
        detail="augmentation naturality", failures=failures, witnesses=witnesses,
        failure_kinds={'augmentation': failures} if failures else {},
    ))
    logger.info("Sigma identities checked", subject=X.name, bound=X.bound, passed=report.passed)
    return report


# ==================== 點化與穩定性 ====================

def _transport(X: SigmaSet, index: SigmaIndex, kept_positions: Sequence[Tuple[int, int]],
               cell_of: Callable[[Any], CellId]) -> Dict[str, Any]:
    """X 為正合神經時的運輸判準參數；否則為嚴格雙射"""
    E = X.exact_category
    if E is None:
        return {}
    shape = rectangle_shape(*index)
    kept: FrozenSet[int] = frozenset(shape.index(p) for p in kept_positions)
    free = [p for p in range(len(shape.positions)) if p not in kept]

    def rect(item: Any) -> RectCell:
        return X.payload(index, cell_of(item))

    return {
        'weight_of': lambda item: weight(E.base, rect(item).objects, free),
        'stabilizer_of': lambda item: relative_automorphism(E.base, shape, cell_diagram(rect(item)), kept),
    }


def _describe(value: Any) -> Any:
    return list(value) if isinstance(value, tuple) else value


def check_pointedness(X: SigmaSet) -> CheckReport:
    """
    水平：{(z, e) : e ∈ X_{0,1} 的水平源為 z 的像} -> X_{0,0}（取水平目標）為雙射；
    垂直：{(z, e) : e ∈ X_{1,0} 的垂直目標為 z 的像} -> X_{0,0}（取垂直源）為雙射

    Raises:
        TruncationError: X 的截斷小於 2
    """
    X.require(2)
    report = CheckReport(condition="pointed", subject=X.name, checked_range=(2, 2))
    objects = range(X.count((0, 0)))

    horizontal = [(z, e) for e in range(X.count((0, 1))) for z in X.aug_preimages(X.face(1, (0, 1), 1, e))]
    report.verdicts.append(restriction_verdict(
        condition="pointed", level=2, cells=horizontal,
        image_of=lambda pair: X.face(1, (0, 1), 0, pair[1]), targets=objects,
        detail="horizontal: unique mono out of a zero",
        describe=_describe,
        **_transport(X, (0, 1), [(0, 1)], lambda pair: pair[1]),
    ))

    vertical = [(z, e) for e in range(X.count((1, 0))) for z in X.aug_preimages(X.face(0, (1, 0), 0, e))]
    report.verdicts.append(restriction_verdict(
        condition="pointed", level=2, cells=vertical,
        image_of=lambda pair: X.face(0, (1, 0), 1, pair[1]), targets=objects,
        detail="vertical: unique epi into a zero",
        describe=_describe,
        **_transport(X, (1, 0), [(0, 0)], lambda pair: pair[1]),
    ))
    logger.info("Pointedness checked", subject=X.name, passed=report.passed)
    return report


def _span_verdict(X: SigmaSet) -> Verdict:
    targets = fiber_product(
        range(X.count((1, 0))), range(X.count((0, 1))),
        lambda v: X.face(0, (1, 0), 1, v), lambda h: X.face(1, (0, 1), 1, h),
    )
    return restriction_verdict(
        condition="stable", level=3, cells=range(X.count((1, 1))),
        image_of=lambda c: (X.face(1, (1, 1), 1, c), X.face(0, (1, 1), 1, c)),
        targets=targets, detail="span: left edge and top edge at the top-left vertex",
        describe=_describe,
        **_transport(X, (1, 1), [(0, 0), (1, 0), (0, 1)], lambda c: c),
    )


def _cospan_verdict(X: SigmaSet) -> Verdict:
    targets = fiber_product(
        range(X.count((1, 0))), range(X.count((0, 1))),
        lambda v: X.face(0, (1, 0), 0, v), lambda h: X.face(1, (0, 1), 0, h),
    )
    return restriction_verdict(
        condition="stable", level=3, cells=range(X.count((1, 1))),
        image_of=lambda c: (X.face(1, (1, 1), 0, c), X.face(0, (1, 1), 0, c)),
        targets=targets, detail="cospan: right edge and bottom edge at the bottom-right vertex",
        describe=_describe,
        **_transport(X, (1, 1), [(0, 1), (1, 0), (1, 1)], lambda c: c),
    )


def check_stability(X: SigmaSet, mode: Union[StabilityMode, str] = StabilityMode.FULL) -> CheckReport:
    """
    X_{1,1} 由邊界上的展形決定（semi），並且也由餘展形決定（full）

    Raises:
        TruncationError: X 的截斷小於 3
    """
    mode = StabilityMode(mode)
    X.require(3)
    report = CheckReport(condition=f"stable:{mode.value}", subject=X.name, checked_range=(3, 3))
    report.verdicts.append(_span_verdict(X))
    if mode == StabilityMode.FULL:
        report.verdicts.append(_cospan_verdict(X))
    logger.info("Stability checked", subject=X.name, mode=mode.value, passed=report.passed)
    return report


# ==================== 指數實驗 ====================

def sigma_exponential(X: SigmaSet, ell: int, bound: int = 3) -> SigmaSet:
    """
    X^{PΔ[ℓ]} 截斷於 bound：(X^A)_{a,b} = Map(Σ[a,b]×A, X)，(X^A)_{-1} = Map(A, X)

    樣板截斷為 bound + 2ℓ + 1，X 須至少截斷到此。

    Raises:
        TruncationError: X 的截斷不足
    """
    B = bound + 2 * ell + 1
    X.require(B)
    A = p_delta(ell, B)
    templates: Dict[SigmaIndex, SigmaSet] = {
        (a, b): present(product_sigma_set([sigma_representable(a, b, B), A], B, name=f"Σ[{a},{b}]x{A.name}"))
        for a, b in sigma_indices(bound)
    }
    cells = {index: mapping_space(template, X) for index, template in templates.items()}

    def along(axis: int, theta: Callable[[int], int]) -> Callable[[SigmaIndex, Any], Any]:
        def cell_map(index: SigmaIndex, payload: Any) -> Any:
            (u, v), w = payload
            if axis == 0:
                return (tuple(theta(x) for x in u), v), w
            return (u, tuple(theta(x) for x in v)), w
        return cell_map

    return SigmaSet.from_operators(
        name=f"{X.name}^{A.name}",
        bound=bound,
        cells=cells,
        aug_cells=mapping_space(A, X),
        face=lambda axis, index, i, f: precompose(
            f, templates[index], X, templates[shifted(index, axis, -1)], along(axis, _coface(i))),
        degeneracy=lambda axis, index, i, f: precompose(
            f, templates[index], X, templates[shifted(index, axis, +1)], along(axis, _codegeneracy(i))),
        augment=lambda f: precompose(f, A, X, templates[(0, 0)], lambda index, payload: payload[1]),
    )


def exponential_stability_experiment(E: ProtoExactStructure, ell: int, bound: int = 3) -> Dict[str, Any]:
    """
    N^ex(E)^{PΔ[ℓ]} 是否仍為點化且穩定：建立指數並記錄兩項檢查的結果（實驗，不作斷言）

    Raises:
        ScaleError: 映射空間列舉超出工作預算
    """
    X = exact_nerve(E, bound + 2 * ell + 1)
    Y = sigma_exponential(X, ell, bound)
    pointed = check_pointedness(Y)
    stable = check_stability(Y, StabilityMode.FULL)
    outcome = {
        'subject': E.name,
        'ell': ell,
        'bound': bound,
        'counts': [dict(c) for c in Y.level_counts()],
        'pointed': pointed.passed,
        'stable': stable.passed,
        'reports': [pointed.to_dict(), stable.to_dict()],
    }
    logger.info("Exponential stability experiment", subject=E.name, ell=ell,
                pointed=pointed.passed, stable=stable.passed)
    return outcome
