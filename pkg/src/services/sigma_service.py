"""
Sigma-set constructions
Σ-集合的建構 - 路徑函子、樣板 PΔ[k]、映射空間、正合神經，以及 Σ 端的 S 建構

A template is a Sigma-set presented by generators: its maximal nondegenerate cells
and its augmentation cells. A map out of a template is stored as the images of the
generators; every other cell is reached from a generator by a fixed operator
path, and mapping_space verifies the whole assignment before keeping it.
"""
from __future__ import annotations

from collections import deque
from dataclasses import replace
from functools import lru_cache
from itertools import combinations_with_replacement, product
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from src.config import settings
from src.config.constants import MAX_TEMPLATE_ARITY, MAX_TEMPLATE_LEVEL
from src.domain.category import ProtoExactStructure
from src.domain.cells import GridCell, MultiGridCell, RectCell
from src.domain.diagrams import arrow_grid_shape, product_grid_shape, rectangle_shape, split_position
from src.domain.sigma_set import SigmaMap, SigmaSet, shifted, sigma_indices
from src.domain.simplicial import CheckReport, MultiSimplicialSet, TruncSimplicialSet, Verdict
from src.services.diagram_service import enumerate_diagrams, reindex
from src.services.groupoids import DiagramIsoModel, cell_diagram, grid_positions
from src.services.iterated import MultiGridIsoModel, s_iterated
from src.services.s_construction import s_degeneracy, s_disc, s_face
from src.services.simplicial_checks import standard_simplex
from src.utils.exceptions import ScaleError, TruncationError, ValidationError
from src.utils.logger import get_logger
from src.utils.types import CellId, MultiExactness, SigmaIndex


logger = get_logger('SigmaService')

# (kind, axis, index, i)：在 index 上套用 d_i 或 s_i
Step = Tuple[str, int, SigmaIndex, int]
CellKey = Tuple[SigmaIndex, CellId]


def _degree(index: SigmaIndex) -> int:
    return index[0] + 1 + index[1]


def _step(X: SigmaSet, step: Step, cell: CellId) -> CellId:
    kind, axis, index, i = step
    return X.face(axis, index, i, cell) if kind == 'd' else X.degeneracy(axis, index, i, cell)


def _run(X: SigmaSet, steps: Sequence[Step], cell: CellId) -> CellId:
    for step in steps:
        cell = _step(X, step, cell)
    return cell


def _moves(X: SigmaSet, index: SigmaIndex, faces_only: bool = False) -> List[Tuple[Step, SigmaIndex]]:
    """index 上所有在截斷內有定義的運算子與其目標"""
    moves = []
    for axis in (0, 1):
        k = index[axis]
        if k >= 1:
            for i in range(k + 1):
                moves.append((('d', axis, index, i), shifted(index, axis, -1)))
        if not faces_only and _degree(index) + 1 <= X.bound:
            for i in range(k + 1):
                moves.append((('s', axis, index, i), shifted(index, axis, +1)))
    return moves


# ==================== 路徑函子 ====================

def path_space(Y: TruncSimplicialSet, name: Optional[str] = None) -> SigmaSet:
    """
    𝒫Y：(𝒫Y)_{a,b} = Y_{a+1+b}，(𝒫Y)_{-1} = Y_0

    軸 0 的運算子作用於前 a+1 個頂點，軸 1 作用於後 b+1 個頂點；增廣映射為 s_0: Y_0 -> Y_1。

    Raises:
        TruncationError: Y 的截斷小於 1
    """
    if Y.bound < 1:
        raise TruncationError(1, Y.bound, what=f"level of {Y.name}")
    N = Y.bound
    cells: Dict[SigmaIndex, Tuple[Any, ...]] = {}
    faces: Dict[Tuple[int, int, int, int], Tuple[CellId, ...]] = {}
    degeneracies: Dict[Tuple[int, int, int, int], Tuple[CellId, ...]] = {}
    for a, b in sigma_indices(N):
        n = a + 1 + b
        cells[(a, b)] = Y.cells[n]
        for axis, k, offset in ((0, a, 0), (1, b, a + 1)):
            if k >= 1:
                for i in range(k + 1):
                    faces[(axis, a, b, i)] = Y.faces[(n, offset + i)]
            if n + 1 <= N:
                for i in range(k + 1):
                    degeneracies[(axis, a, b, i)] = Y.degeneracies[(n, offset + i)]
    return SigmaSet(
        bound=N, cells=cells, aug_cells=Y.cells[0], faces=faces, degeneracies=degeneracies,
        aug_map=Y.degeneracies[(0, 0)], name=name or f"P({Y.name})",
    )


# ==================== 生成元與呈現 ====================

def generators(A: SigmaSet) -> Tuple[Tuple[SigmaIndex, CellId], ...]:
    """
    極大非退化格：不是退化像也不是增廣像，且不是其他非退化格的面
    """
    degenerate: Dict[SigmaIndex, set] = {index: set() for index in A.indices()}
    for (axis, a, b, i), table in A.degeneracies.items():
        degenerate[shifted((a, b), axis, +1)].update(table)
    for index in A.indices():
        degenerate[index].update(A.augmentation(index, z) for z in range(len(A.aug_cells)))

    nondegenerate = {index: [c for c in range(A.count(index)) if c not in degenerate[index]]
                     for index in A.indices()}
    covered: Dict[SigmaIndex, set] = {index: set() for index in A.indices()}
    for index in A.indices():
        for (_, axis, _, i), lower in _moves(A, index, faces_only=True):
            table = A.faces[(axis, index[0], index[1], i)]
            covered[lower].update(table[c] for c in nondegenerate[index])
    return tuple((index, c) for index in A.indices() for c in nondegenerate[index] if c not in covered[index])


def present(A: SigmaSet) -> SigmaSet:
    """附上生成元（已有則原樣回傳）"""
    if A.generators is not None:
        return A
    return replace(A, generators=generators(A), _cache={})


def presentation(A: SigmaSet) -> Dict[CellKey, Tuple[Tuple[str, int], Tuple[Step, ...]]]:
    """
    每個格的取得方式：(('gen', g) 或 ('aug', z), 運算子路徑)

    Raises:
        ValidationError: 生成元無法生成所有格
    """
    cached = A._cache.get('presentation')
    if cached is not None:
        return cached
    if A.generators is None:
        raise ValidationError('template', A.name, "template has no generator presentation")
    recipes: Dict[CellKey, Tuple[Tuple[str, int], Tuple[Step, ...]]] = {}
    queue: deque = deque()
    for g, key in enumerate(A.generators):
        if key not in recipes:
            recipes[key] = (('gen', g), ())
            queue.append(key)
    for z, c in enumerate(A.aug_map):
        key = ((0, 0), c)
        if key not in recipes:
            recipes[key] = (('aug', z), ())
            queue.append(key)
    while queue:
        index, cell = queue.popleft()
        source, path = recipes[(index, cell)]
        for step, target in _moves(A, index):
            key = (target, _step(A, step, cell))
            if key not in recipes:
                recipes[key] = (source, path + (step,))
                queue.append(key)
    total = sum(A.count(index) for index in A.indices())
    if len(recipes) != total:
        raise ValidationError('generators', A.name, f"reach {len(recipes)} of {total} cells")
    A._cache['presentation'] = recipes
    return recipes


def evaluate(A: SigmaSet, X: SigmaSet, f: SigmaMap, index: SigmaIndex, cell: CellId) -> CellId:
    """f 在樣板格 (index, cell) 上的值"""
    (kind, n), path = presentation(A)[(index, cell)]
    start = f.gens[n] if kind == 'gen' else X.aug_map[f.aug[n]]
    return _run(X, path, start)


def evaluate_payload(A: SigmaSet, X: SigmaSet, f: SigmaMap, index: SigmaIndex, payload: Any) -> Any:
    cell = A.index_of(index, payload)
    if cell is None:
        raise ValidationError('payload', repr(payload), f"not a cell of {A.name} at {index}")
    return X.payload(index, evaluate(A, X, f, index, cell))


# ==================== 映射空間 ====================

def _face_closure(A: SigmaSet, key: CellKey) -> Dict[CellKey, Tuple[Step, ...]]:
    closure: Dict[CellKey, Tuple[Step, ...]] = {key: ()}
    queue: deque = deque([key])
    while queue:
        index, cell = queue.popleft()
        path = closure[(index, cell)]
        for step, target in _moves(A, index, faces_only=True):
            found = (target, _step(A, step, cell))
            if found not in closure:
                closure[found] = path + (step,)
                queue.append(found)
    return closure


def _is_map(A: SigmaSet, X: SigmaSet, f: SigmaMap) -> bool:
    images = {key: evaluate(A, X, f, *key) for key in presentation(A)}
    for index in A.indices():
        for step, target in _moves(A, index):
            for c in range(A.count(index)):
                if images[(target, _step(A, step, c))] != _step(X, step, images[(index, c)]):
                    return False
    return all(images[((0, 0), c)] == X.aug_map[f.aug[z]] for z, c in enumerate(A.aug_map))


def mapping_space(A: SigmaSet, X: SigmaSet, verify: bool = True) -> List[SigmaMap]:
    """
    Map(A, X)：對生成元回溯指派 X 的格，以共用面的值建索引剪枝；增廣生成元最後指派

    Args:
        A: 樣板（無生成元時即時計算）
        X: 目標 Σ-集合
        verify: 對每個候選檢查所有運算子與增廣關係

    Returns:
        List[SigmaMap]: 已排序

    Raises:
        TruncationError: X 的截斷小於 A
        ScaleError: 映射數超出工作預算
    """
    A = present(A)
    if X.bound < A.bound:
        raise TruncationError(A.bound, X.bound, what=f"p-degree of {X.name}")
    gens = list(A.generators)
    closures = [_face_closure(A, key) for key in gens]

    order: List[int] = []
    remaining = list(range(len(gens)))
    while remaining:
        def shared(g: int) -> int:
            degrees = [_degree(key[0]) for key in closures[g] if any(key in closures[h] for h in order)]
            return max(degrees, default=0)
        best = max(remaining, key=lambda g: (shared(g), _degree(gens[g][0]), -g))
        order.append(best)
        remaining.remove(best)

    constraints: Dict[int, List[Tuple[CellKey, Tuple[Step, ...], int, Tuple[Step, ...]]]] = {}
    for t, g in enumerate(order):
        found = []
        for key, path in closures[g].items():
            for h in order[:t]:
                if key in closures[h]:
                    found.append((key, path, h, closures[h][key]))
                    break
        found.sort(key=lambda c: (-_degree(c[0][0]), c[0]))
        constraints[g] = found

    indexes: Dict[Tuple[int, CellKey], Dict[CellId, List[CellId]]] = {}

    def candidates(g: int, assigned: Dict[int, CellId]) -> Sequence[CellId]:
        index = gens[g][0]
        if not constraints[g]:
            return range(X.count(index))
        key, path, h, other = constraints[g][0]
        table = indexes.get((g, key))
        if table is None:
            table = {}
            for x in range(X.count(index)):
                table.setdefault(_run(X, path, x), []).append(x)
            indexes[(g, key)] = table
        return table.get(_run(X, other, assigned[h]), ())

    aug_sources: List[Optional[Tuple[int, Tuple[Step, ...]]]] = []
    for c in A.aug_map:
        key = ((0, 0), c)
        holder = next((g for g in order if key in closures[g]), None)
        aug_sources.append(None if holder is None else (holder, closures[holder][key]))

    found_maps: List[SigmaMap] = []
    assigned: Dict[int, CellId] = {}

    def finish() -> None:
        options = []
        for source in aug_sources:
            if source is None:
                options.append(range(len(X.aug_cells)))
            else:
                g, path = source
                options.append(X.aug_preimages(_run(X, path, assigned[g])))
        gen_images = tuple(assigned[g] for g in range(len(gens)))
        for aug in product(*options):
            f = SigmaMap(template=A.name, aug=tuple(aug), gens=gen_images)
            if verify and not _is_map(A, X, f):
                continue
            found_maps.append(f)
            if len(found_maps) > settings.WORK_BUDGET:
                raise ScaleError(f"Map({A.name}, {X.name})", len(found_maps), settings.WORK_BUDGET)

    def assign(t: int) -> None:
        if t == len(order):
            finish()
            return
        g = order[t]
        for x in candidates(g, assigned):
            ok = all(_run(X, path, x) == _run(X, other, assigned[h])
                     for _, path, h, other in constraints[g][1:])
            if ok:
                assigned[g] = x
                assign(t + 1)
        assigned.pop(g, None)

    assign(0)
    found_maps.sort()
    logger.debug("Mapping space enumerated", template=A.name, target=X.name, maps=len(found_maps))
    return found_maps


def precompose(
    f: SigmaMap,
    source: SigmaSet,
    X: SigmaSet,
    target: SigmaSet,
    cell_map: Callable[[SigmaIndex, Any], Any],
    aug_map: Optional[Callable[[Any], Any]] = None,
) -> SigmaMap:
    """
    f ∘ θ，其中 θ: target -> source 以 payload 給出

    Args:
        cell_map: (index, target 的 payload) -> source 的 payload
        aug_map: target 增廣 payload -> source 增廣 payload
    """
    target = present(target)
    gens = tuple(
        evaluate(source, X, f, index, _require_cell(source, index, cell_map(index, target.payload(index, c))))
        for index, c in target.generators
    )
    aug: Tuple[CellId, ...] = ()
    if target.aug_cells:
        mapper = aug_map or (lambda p: cell_map((0, 0), p))
        aug = tuple(f.aug[_require_aug(source, mapper(p))] for p in target.aug_cells)
    return SigmaMap(template=target.name, aug=aug, gens=gens)


def _require_cell(A: SigmaSet, index: SigmaIndex, payload: Any) -> CellId:
    cell = A.index_of(index, payload)
    if cell is None:
        raise ValidationError('payload', repr(payload), f"not a cell of {A.name} at {index}")
    return cell


def _require_aug(A: SigmaSet, payload: Any) -> CellId:
    z = A.aug_index_of(payload)
    if z is None:
        raise ValidationError('payload', repr(payload), f"not an augmentation cell of {A.name}")
    return z


# ==================== 樣板 ====================

def _coface(i: int) -> Callable[[int], int]:
    return lambda v: v if v < i else v + 1


def _codegeneracy(i: int) -> Callable[[int], int]:
    return lambda v: v if v <= i else v - 1


@lru_cache(maxsize=None)
def p_delta(k: int, bound: Optional[int] = None) -> SigmaSet:
    """
    PΔ[k]，截斷於 bound（預設 k+1，即非退化格的最大 p-次數）

    Raises:
        ValidationError: k < 0 或 bound < k+1
    """
    if k < 0:
        raise ValidationError('k', k, "level must be nonnegative")
    bound = k + 1 if bound is None else bound
    if bound < k + 1:
        raise ValidationError('bound', bound, f"PΔ[{k}] needs p-degree {k + 1}")
    return present(path_space(standard_simplex(k, bound), name=f"PΔ[{k}]"))


def _check_template_levels(levels: Tuple[int, ...]) -> None:
    if not 1 <= len(levels) <= MAX_TEMPLATE_ARITY:
        raise ValidationError('levels', list(levels), f"arity must be in [1, {MAX_TEMPLATE_ARITY}]")
    if any(k < 0 or k > MAX_TEMPLATE_LEVEL for k in levels):
        raise ValidationError('levels', list(levels), f"each level must be in [0, {MAX_TEMPLATE_LEVEL}]")


def simplex_product(levels: Tuple[int, ...], bound: int) -> TruncSimplicialSet:
    """Δ[k_1]×⋯×Δ[k_n] 的對角單純集合：n 層的格為各分量單調映射的組"""
    per_level = [
        list(product(*(list(combinations_with_replacement(range(k + 1), n + 1)) for k in levels)))
        for n in range(bound + 1)
    ]
    return TruncSimplicialSet.from_operators(
        name="x".join(f"Δ[{k}]" for k in levels),
        cells=per_level,
        face=lambda n, i, p: tuple(u[:i] + u[i + 1:] for u in p),
        degeneracy=lambda n, i, p: tuple(u[:i + 1] + u[i:] for u in p),
    )


@lru_cache(maxsize=None)
def p_iterated_delta(levels: Tuple[int, ...], bound: Optional[int] = None) -> SigmaSet:
    """
    P^(n)Δ[k_1, …, k_n]：[a, b] 上的格為 ∏ Hom([a+1+b], [k_i])，運算子對角作用

    預設截斷為 Σk_i + 1。
    """
    levels = tuple(levels)
    _check_template_levels(levels)
    bound = sum(levels) + 1 if bound is None else bound
    name = "P(" + "x".join(f"Δ[{k}]" for k in levels) + ")"
    return present(path_space(simplex_product(levels, bound), name=name))


def product_sigma_set(factors: Sequence[SigmaSet], bound: Optional[int] = None, name: Optional[str] = None) -> SigmaSet:
    """逐物件的乘積，運算子與增廣逐分量作用"""
    factors = list(factors)
    bound = min(F.bound for F in factors) if bound is None else bound
    if any(F.bound < bound for F in factors):
        raise TruncationError(bound, min(F.bound for F in factors), what="p-degree of product factors")

    def componentwise(op: str) -> Callable[[int, SigmaIndex, int, Any], Any]:
        def apply(axis: int, index: SigmaIndex, i: int, payload: Any) -> Any:
            target = shifted(index, axis, -1 if op == 'd' else +1)
            images = []
            for F, q in zip(factors, payload):
                c = F.index_of(index, q)
                c = F.face(axis, index, i, c) if op == 'd' else F.degeneracy(axis, index, i, c)
                images.append(F.payload(target, c))
            return tuple(images)
        return apply

    return SigmaSet.from_operators(
        name=name or "x".join(F.name for F in factors),
        bound=bound,
        cells={index: list(product(*(F.cells[index] for F in factors))) for index in sigma_indices(bound)},
        aug_cells=list(product(*(F.aug_cells for F in factors))),
        face=componentwise('d'),
        degeneracy=componentwise('s'),
        augment=lambda p: tuple(F.payload((0, 0), F.aug_map[F.aug_index_of(q)]) for F, q in zip(factors, p)),
    )


@lru_cache(maxsize=None)
def sigma_representable(a: int, b: int, bound: int) -> SigmaSet:
    """Σ[a, b]：[c, d] 上的格為 ([c]->[a], [d]->[b]) 的單調映射對；[-1] 上為空"""
    return SigmaSet.from_operators(
        name=f"Σ[{a},{b}]",
        bound=bound,
        cells={
            (c, d): list(product(combinations_with_replacement(range(a + 1), c + 1),
                                 combinations_with_replacement(range(b + 1), d + 1)))
            for c, d in sigma_indices(bound)
        },
        aug_cells=[],
        face=lambda axis, index, i, p: (
            (p[0][:i] + p[0][i + 1:], p[1]) if axis == 0 else (p[0], p[1][:i] + p[1][i + 1:])),
        degeneracy=lambda axis, index, i, p: (
            (p[0][:i + 1] + p[0][i:], p[1]) if axis == 0 else (p[0], p[1][:i + 1] + p[1][i:])),
        augment=lambda p: p,
    )


# ==================== 積同構 ====================

def product_iso_check(levels: Tuple[int, ...]) -> CheckReport:
    """
    P^(n)Δ[k_1..k_n] 與 PΔ[k_1]×⋯×PΔ[k_n] 逐分量等同：在每個 Σ 物件上為雙射，且與所有運算子及增廣交換
    """
    levels = tuple(levels)
    _check_template_levels(levels)
    bound = sum(levels) + 1
    left = p_iterated_delta(levels, bound)
    right = product_sigma_set([p_delta(k, bound) for k in levels], bound)
    report = CheckReport(condition="product-iso", subject=f"{left.name} vs {right.name}", checked_range=(0, bound))

    def image(index: SigmaIndex, c: CellId) -> Optional[CellId]:
        return right.index_of(index, left.payload(index, c))

    for n in range(bound + 1):
        witnesses: List[Dict[str, Any]] = []
        checked = 0
        indices = [None] if n == 0 else [(a, n - 1 - a) for a in range(n)]
        for index in indices:
            if index is None:
                mapped = [right.aug_index_of(p) for p in left.aug_cells]
                sizes = (len(left.aug_cells), len(right.aug_cells))
            else:
                mapped = [image(index, c) for c in range(left.count(index))]
                sizes = (left.count(index), right.count(index))
            checked += len(mapped)
            label = "-1" if index is None else f"{index[0]},{index[1]}"
            if None in mapped or len(set(mapped)) != len(mapped) or sizes[0] != sizes[1]:
                witnesses.append({'kind': 'not_bijective', 'index': label, 'sizes': list(sizes)})
                continue
            if index is None:
                for z, c in enumerate(left.aug_map):
                    checked += 1
                    if right.index_of((0, 0), left.payload((0, 0), c)) != right.aug_map[mapped[z]]:
                        witnesses.append({'kind': 'augmentation', 'index': label, 'cell': z})
                continue
            for step, target in _moves(left, index):
                for c in range(left.count(index)):
                    checked += 1
                    if image(target, _step(left, step, c)) != _step(right, step, image(index, c)):
                        witnesses.append({'kind': 'operator', 'index': label, 'cell': c,
                                          'op': [step[0], step[1], step[3]]})
        report.verdicts.append(Verdict(
            condition="product-iso", level=n, passed=not witnesses, checked=checked,
            detail=f"p-degree {n}", failures=len(witnesses),
            witnesses=witnesses[:settings.MAX_WITNESSES],
            failure_kinds={'product_iso': len(witnesses)} if witnesses else {},
        ))
    logger.info("Product isomorphism checked", levels=list(levels), passed=report.passed)
    return report


# ==================== 正合神經 ====================

def _rect_face(E: ProtoExactStructure, cell: RectCell, axis: int, i: int) -> RectCell:
    rows, cols = (cell.rows - 1, cell.cols) if axis == 0 else (cell.rows, cell.cols - 1)
    move = _coface(i)
    position_map = (lambda p: (move(p[0]), p[1])) if axis == 0 else (lambda p: (p[0], move(p[1])))
    objects, arrows = reindex(E.base, cell.shape, cell_diagram(cell), rectangle_shape(rows, cols), position_map)
    return RectCell(rows=rows, cols=cols, objects=objects, arrows=arrows)


def _rect_degeneracy(E: ProtoExactStructure, cell: RectCell, axis: int, i: int) -> RectCell:
    rows, cols = (cell.rows + 1, cell.cols) if axis == 0 else (cell.rows, cell.cols + 1)
    move = _codegeneracy(i)
    position_map = (lambda p: (move(p[0]), p[1])) if axis == 0 else (lambda p: (p[0], move(p[1])))
    objects, arrows = reindex(E.base, cell.shape, cell_diagram(cell), rectangle_shape(rows, cols), position_map)
    return RectCell(rows=rows, cols=cols, objects=objects, arrows=arrows)


def exact_nerve(E: ProtoExactStructure, N: int) -> SigmaSet:
    """
    N^ex(E)：[a, b] 上為正合函子 [a]×[b] -> E（行為單態射、列為滿態射、方塊雙笛卡兒；
    沒有零對角線條件），增廣格為零物件，增廣映射送到其上的常數網格

    Raises:
        ValidationError: N < 1
        ScaleError: 列舉超出工作預算
    """
    if N < 1:
        raise ValidationError('N', N, "the exact nerve needs p-degree at least 1")
    cells = {
        (a, b): [RectCell(rows=a, cols=b, objects=objs, arrows=arrows)
                 for objs, arrows in enumerate_diagrams(E, rectangle_shape(a, b))]
        for a, b in sigma_indices(N)
    }
    X = SigmaSet.from_operators(
        name=f"Nex({E.name})",
        bound=N,
        cells=cells,
        aug_cells=list(E.zeros),
        face=lambda axis, index, i, c: _rect_face(E, c, axis, i),
        degeneracy=lambda axis, index, i, c: _rect_degeneracy(E, c, axis, i),
        augment=lambda z: RectCell(rows=0, cols=0, objects=(z,), arrows=()),
        exact_category=E,
    )
    logger.info("Exact nerve built", structure=E.name, bound=N,
                counts={f"{a},{b}": len(c) for (a, b), c in cells.items()})
    return X


# ==================== Σ 端的 S 建構 ====================

def _grid_parts(
    value_at: Callable[[SigmaIndex, Tuple[Tuple[int, ...], ...]], RectCell],
    pairs: Sequence[Tuple[int, int]],
    axis: Optional[int] = None,
    move: Optional[str] = None,
) -> RectCell:
    """位置（或由位置出發的基本箭頭）在樣板中對應的格的值"""
    components = []
    for t, (i, j) in enumerate(pairs):
        if t != axis:
            components.append((i, j) if move is None else ((i, i, j) if move == 'i' else (i, j, j)))
        else:
            components.append((i, i + 1, j) if move == 'i' else (i, j, j + 1))
    index = (0, 0) if move is None else ((1, 0) if move == 'i' else (0, 1))
    return value_at(index, tuple(components))


def _multigrid_diagram(
    X: SigmaSet,
    template: SigmaSet,
    f: SigmaMap,
    levels: Tuple[int, ...],
    encode: Callable[[Tuple[Tuple[int, ...], ...]], Any],
) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    def value_at(index: SigmaIndex, components: Tuple[Tuple[int, ...], ...]) -> RectCell:
        return evaluate_payload(template, X, f, index, encode(components))

    shape = product_grid_shape(levels, MultiExactness.JOINT)
    objects = tuple(_grid_parts(value_at, split_position(p)).objects[0] for p in shape.positions)
    arrows = []
    for s, t in shape.arrows:
        source, target = shape.positions[s], shape.positions[t]
        slot = next(n for n, (x, y) in enumerate(zip(source, target)) if x != y)
        cell = _grid_parts(value_at, split_position(source), axis=slot // 2, move='j' if slot % 2 else 'i')
        arrows.append(cell.arrows[0])
    return objects, tuple(arrows)


def sigma_map_to_grid(X: SigmaSet, template: SigmaSet, f: SigmaMap, k: int) -> GridCell:
    """
    f ∈ Map(PΔ[k], N^ex E) 對應的網格：A_ij 為樣板格 (i|j) 的值，水平箭頭取 (i|j,j+1)，
    垂直箭頭取 (i,i+1|j)
    """
    objects, arrows = _multigrid_diagram(X, template, f, (k,), lambda components: components[0])
    shape = arrow_grid_shape(k)
    joint = product_grid_shape((k,), MultiExactness.JOINT)
    position_of = {p: n for n, p in enumerate(joint.positions)}
    arrow_of = {(joint.positions[s], joint.positions[t]): a for a, (s, t) in enumerate(joint.arrows)}
    return GridCell(
        level=k,
        objects=tuple(objects[position_of[p]] for p in shape.positions),
        arrows=tuple(arrows[arrow_of[(shape.positions[s], shape.positions[t])]] for s, t in shape.arrows),
    )


def sigma_map_to_multigrid(X: SigmaSet, template: SigmaSet, f: SigmaMap, levels: Tuple[int, ...]) -> MultiGridCell:
    """f ∈ Map(P^(n)Δ[k_1..k_n], N^ex E) 對應的聯合正合多重網格"""
    objects, arrows = _multigrid_diagram(X, template, f, tuple(levels), lambda components: components)
    return MultiGridCell(levels=tuple(levels), objects=objects, arrows=arrows, exactness=MultiExactness.JOINT)


def _require_template_bound(X: SigmaSet, needed: int) -> None:
    if X.bound < needed:
        raise TruncationError(needed, X.bound, what=f"p-degree of {X.name}")


def s_construction_sigma(X: SigmaSet, N: int, verify: bool = True) -> TruncSimplicialSet:
    """
    S_k(X) = Map(PΔ[k], X)，0 <= k <= N；面與退化為與餘單純結構的前合成

    所有樣板共用截斷 N+1，因此 X 須截斷至 p-次數 N+1。X 為正合神經時附上網格同構模型。

    Raises:
        TruncationError: X 的截斷不足
    """
    _require_template_bound(X, N + 1)
    templates = [p_delta(k, N + 1) for k in range(N + 1)]
    levels = [mapping_space(templates[k], X, verify=verify) for k in range(N + 1)]

    def vertex_map(theta: Callable[[int], int]) -> Callable[[SigmaIndex, Any], Any]:
        return lambda index, payload: tuple(theta(v) for v in payload)

    iso_model = None
    E = X.exact_category
    if E is not None:
        grids = [[sigma_map_to_grid(X, templates[k], f, k) for f in levels[k]] for k in range(N + 1)]
        iso_model = DiagramIsoModel(
            E.base,
            diagram_of=lambda n, c: (arrow_grid_shape(n), cell_diagram(grids[n][c])),
            positions_for=grid_positions,
        )
    S = TruncSimplicialSet.from_operators(
        name=f"S({X.name})",
        cells=levels,
        face=lambda n, i, f: precompose(f, templates[n], X, templates[n - 1], vertex_map(_coface(i))),
        degeneracy=lambda n, i, f: precompose(f, templates[n], X, templates[n + 1], vertex_map(_codegeneracy(i))),
        iso_model=iso_model,
    )
    logger.info("Sigma S-construction assembled", subject=X.name, bound=N, counts=[len(level) for level in levels])
    return S


def s_iterated_sigma(X: SigmaSet, bounds: Tuple[int, ...], verify: bool = True) -> MultiSimplicialSet:
    """
    S^(n)_{k_1..k_n}(X) = Map(PΔ[k_1]×⋯×PΔ[k_n], X)，以 P^(n) 樣板計算

    Raises:
        TruncationError: X 的截斷小於 Σ bounds + 1
    """
    bounds = tuple(bounds)
    _check_template_levels(bounds)
    B = sum(bounds) + 1
    _require_template_bound(X, B)
    degrees = list(product(*(range(b + 1) for b in bounds)))
    templates = {d: p_iterated_delta(d, B) for d in degrees}
    cells = {d: tuple(mapping_space(templates[d], X, verify=verify)) for d in degrees}

    def along(axis: int, theta: Callable[[int], int]) -> Callable[[SigmaIndex, Any], Any]:
        return lambda index, payload: tuple(
            tuple(theta(v) for v in u) if t == axis else u for t, u in enumerate(payload))

    def lower(d: Tuple[int, ...], axis: int, delta: int) -> Tuple[int, ...]:
        return d[:axis] + (d[axis] + delta,) + d[axis + 1:]

    iso_model = None
    if X.exact_category is not None:
        grids = {d: tuple(sigma_map_to_multigrid(X, templates[d], f, d) for f in cells[d]) for d in degrees}
        iso_model = MultiGridIsoModel(X.exact_category.base, grids, MultiExactness.JOINT)
    M = MultiSimplicialSet.from_operators(
        name=f"S^({len(bounds)})({X.name})",
        bounds=bounds,
        cells=cells,
        face=lambda axis, d, i, f: precompose(f, templates[d], X, templates[lower(d, axis, -1)], along(axis, _coface(i))),
        degeneracy=lambda axis, d, i, f: precompose(
            f, templates[d], X, templates[lower(d, axis, +1)], along(axis, _codegeneracy(i))),
        iso_model=iso_model,
    )
    logger.info("Sigma iterated S assembled", subject=X.name, bounds=list(bounds),
                counts={",".join(map(str, d)): len(c) for d, c in cells.items()})
    return M


# ==================== 與 waldhausen 端的比較 ====================

def nerve_comparison(E: ProtoExactStructure, N: int) -> CheckReport:
    """
    S_k(N^ex E) 與 S_k(E) 的明確雙射，逐層檢查並檢查與面、退化映射的自然性
    """
    X = exact_nerve(E, N + 1)
    S = s_construction_sigma(X, N)
    grids = [[sigma_map_to_grid(X, p_delta(k, N + 1), f, k) for f in S.cells[k]] for k in range(N + 1)]
    report = CheckReport(condition="nerve-comparison", subject=E.name, checked_range=(0, N))
    for k in range(N + 1):
        level = grids[k]
        expected = set(s_disc(E, k))
        witnesses: List[Dict[str, Any]] = []
        if len(set(level)) != len(level) or set(level) != expected:
            witnesses.append({'kind': 'not_bijective', 'level': k, 'sigma': len(level), 'grids': len(expected)})
        else:
            for c, g in enumerate(level):
                if k >= 1:
                    witnesses.extend(
                        {'kind': 'not_natural', 'level': k, 'cell': c, 'face': i}
                        for i in range(k + 1)
                        if grids[k - 1][S.face(k, i, c)] != s_face(E, g, i)
                    )
                if k < N:
                    witnesses.extend(
                        {'kind': 'not_natural', 'level': k, 'cell': c, 'degeneracy': i}
                        for i in range(k + 1)
                        if grids[k + 1][S.degeneracy(k, i, c)] != s_degeneracy(E, g, i)
                    )
        report.verdicts.append(Verdict(
            condition="nerve-comparison", level=k, passed=not witnesses, checked=len(level),
            detail=f"|S_{k}(Nex)| = {len(level)}, |S_{k}| = {len(expected)}",
            failures=len(witnesses), witnesses=witnesses[:settings.MAX_WITNESSES],
            failure_kinds={'comparison': len(witnesses)} if witnesses else {},
        ))
    logger.info("Nerve comparison checked", structure=E.name, bound=N, passed=report.passed)
    return report


def iterated_comparison(E: ProtoExactStructure, levels: Tuple[int, ...]) -> Verdict:
    """Map(P^(n)Δ[levels], N^ex E) 與聯合正合的 s_iterated(E, levels) 的明確雙射"""
    levels = tuple(levels)
    B = sum(levels) + 1
    X = exact_nerve(E, B)
    template = p_iterated_delta(levels, B)
    grids = [sigma_map_to_multigrid(X, template, f, levels) for f in mapping_space(template, X)]
    expected = set(s_iterated(E, levels, MultiExactness.JOINT))
    passed = len(set(grids)) == len(grids) and set(grids) == expected
    return Verdict(
        condition="iterated-comparison", level=sum(levels), passed=passed, checked=len(grids),
        detail=f"levels {list(levels)}: sigma {len(grids)}, grids {len(expected)}",
        failures=0 if passed else 1,
        witnesses=[] if passed else [{'kind': 'not_bijective', 'sigma': len(grids), 'grids': len(expected)}],
        failure_kinds={} if passed else {'comparison': 1},
    )
