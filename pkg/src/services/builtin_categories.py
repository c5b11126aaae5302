"""
Builtin proto-exact categories
內建範疇產生器：有限體上的向量空間、有限帶點集合、純零物件範疇
"""
from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from itertools import product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from src.config import settings
from src.config.constants import (
    MAX_POINTED_SET_SIZE, MAX_VECT_DIMENSION, MAX_ZERO_OBJECTS, SUPPORTED_FIELDS,
)
from src.domain.category import FinCategory, ProtoExactStructure, Square
from src.utils.exceptions import ConfigurationError, ScaleError
from src.utils.logger import get_logger
from src.utils.types import BicartMode, Matrix, MorId, ObjId


logger = get_logger('BuiltinCategories')


# ==================== 有限體 ====================

class FiniteField:
    """
    GF(q) for q in {2, 3, 4, 5}; elements are 0..q-1.

    GF(4) encodes c0 + c1*a as c0 + 2*c1 with a^2 = a + 1.
    """

    def __init__(self, q: int):
        if q not in SUPPORTED_FIELDS:
            raise ConfigurationError(
                f"Unsupported field size q={q}",
                details={'q': q, 'supported': sorted(SUPPORTED_FIELDS)},
            )
        self.q = q
        self.characteristic, self.degree = SUPPORTED_FIELDS[q]
        self._add = [[self._raw_add(x, y) for y in range(q)] for x in range(q)]
        self._mul = [[self._raw_mul(x, y) for y in range(q)] for x in range(q)]
        self._neg = [next(y for y in range(q) if self._add[x][y] == 0) for x in range(q)]
        self._inv = [0] + [next(y for y in range(q) if self._mul[x][y] == 1) for x in range(1, q)]

    def _raw_add(self, x: int, y: int) -> int:
        if self.degree == 1:
            return (x + y) % self.q
        return x ^ y

    def _raw_mul(self, x: int, y: int) -> int:
        if self.degree == 1:
            return (x * y) % self.q
        x0, x1 = x & 1, x >> 1
        y0, y1 = y & 1, y >> 1
        # (x0 + x1 a)(y0 + y1 a) with a^2 = a + 1
        c0 = (x0 * y0 + x1 * y1) % 2
        c1 = (x0 * y1 + x1 * y0 + x1 * y1) % 2
        return c0 + 2 * c1

    def add(self, x: int, y: int) -> int:
        return self._add[x][y]

    def mul(self, x: int, y: int) -> int:
        return self._mul[x][y]

    def neg(self, x: int) -> int:
        return self._neg[x]

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self._inv[x]

    @property
    def label(self) -> str:
        return f"F{self.q}"

    # ========== 矩陣運算 ==========

    def matmul(self, a: Matrix, b: Matrix, cols: int) -> Matrix:
        """a (t x m) times b (m x cols)."""
        rows: List[Tuple[int, ...]] = []
        for row in a:
            out = []
            for j in range(cols):
                acc = 0
                for k, entry in enumerate(row):
                    if entry:
                        acc = self.add(acc, self.mul(entry, b[k][j]))
                out.append(acc)
            rows.append(tuple(out))
        return tuple(rows)

    def rank(self, matrix: Sequence[Sequence[int]]) -> int:
        rows = [list(r) for r in matrix]
        if not rows or not rows[0]:
            return 0
        n_cols = len(rows[0])
        rank = 0
        for col in range(n_cols):
            pivot = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
            if pivot is None:
                continue
            rows[rank], rows[pivot] = rows[pivot], rows[rank]
            scale = self.inv(rows[rank][col])
            rows[rank] = [self.mul(scale, x) for x in rows[rank]]
            for r in range(len(rows)):
                if r != rank and rows[r][col]:
                    factor = self.neg(rows[r][col])
                    rows[r] = [self.add(x, self.mul(factor, y)) for x, y in zip(rows[r], rows[rank])]
            rank += 1
        return rank

    def inverse_matrix(self, matrix: Matrix) -> Optional[Matrix]:
        n = len(matrix)
        aug = [list(matrix[i]) + [1 if i == j else 0 for j in range(n)] for i in range(n)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if aug[r][col]), None)
            if pivot is None:
                return None
            aug[col], aug[pivot] = aug[pivot], aug[col]
            scale = self.inv(aug[col][col])
            aug[col] = [self.mul(scale, x) for x in aug[col]]
            for r in range(n):
                if r != col and aug[r][col]:
                    factor = self.neg(aug[r][col])
                    aug[r] = [self.add(x, self.mul(factor, y)) for x, y in zip(aug[r], aug[col])]
        return tuple(tuple(row[n:]) for row in aug)


def _zero_matrix(rows: int, cols: int) -> Matrix:
    return tuple((0,) * cols for _ in range(rows))


def _identity_matrix(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def _all_matrices(q: int, rows: int, cols: int) -> Iterator[Matrix]:
    for flat in product(range(q), repeat=rows * cols):
        yield tuple(tuple(flat[r * cols:(r + 1) * cols]) for r in range(rows))


# ==================== 向量空間 ====================

class MatrixCompositionTable(Mapping):
    """Lazy composition table: (g, f) -> id of the matrix product."""

    def __init__(
        self,
        field_: FiniteField,
        source: Dict[MorId, ObjId],
        target: Dict[MorId, ObjId],
        matrices: Dict[MorId, Matrix],
        index: Dict[Tuple[ObjId, ObjId], Dict[Matrix, MorId]],
        dims: Dict[ObjId, int],
        homs: Dict[Tuple[ObjId, ObjId], List[MorId]],
    ):
        self._field = field_
        self._source = source
        self._target = target
        self._matrices = matrices
        self._index = index
        self._dims = dims
        self._homs = homs
        self._memo: Dict[Tuple[MorId, MorId], MorId] = {}

    def __getitem__(self, key: Tuple[MorId, MorId]) -> MorId:
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        g, f = key
        if g not in self._source or f not in self._source or self._target[f] != self._source[g]:
            raise KeyError(key)
        a, c = self._source[f], self._target[g]
        product_ = self._field.matmul(self._matrices[g], self._matrices[f], self._dims[a])
        result = self._index[(a, c)][product_]
        self._memo[key] = result
        return result

    def __iter__(self) -> Iterator[Tuple[MorId, MorId]]:
        objects = sorted(self._dims)
        for b in objects:
            into = [m for a in objects for m in self._homs.get((a, b), [])]
            out = [m for c in objects for m in self._homs.get((b, c), [])]
            for f in into:
                for g in out:
                    yield g, f

    def __len__(self) -> int:
        objects = sorted(self._dims)
        total = 0
        for b in objects:
            n_in = sum(len(self._homs.get((a, b), [])) for a in objects)
            n_out = sum(len(self._homs.get((b, c), [])) for c in objects)
            total += n_in * n_out
        return total


@dataclass(frozen=True)
class VectRankRule:
    """
    Rank rule for commuting squares of monos (top, bottom) and epis (left, right):
    bicartesian iff dim tl - dim tr - dim bl + dim br = 0 and tl -> tr+bl -> br is exact.
    """

    field_: FiniteField
    matrices: Dict[MorId, Matrix]
    dims: Dict[ObjId, int]

    def corner_filter(self, tl: ObjId, tr: ObjId, bl: ObjId, br: ObjId) -> bool:
        d = self.dims
        return d[tl] - d[tr] - d[bl] + d[br] == 0

    def is_bicartesian(self, square: Square) -> bool:
        d = self.dims
        if not self.corner_filter(square.tl, square.tr, square.bl, square.br):
            return False
        # [right | bottom]: (tr + bl) -> br must be onto
        right, bottom = self.matrices[square.right], self.matrices[square.bottom]
        joined = [tuple(right[r]) + tuple(bottom[r]) for r in range(d[square.br])]
        if self.field_.rank(joined) != d[square.br]:
            return False
        # (top ; left): tl -> tr + bl must be injective
        stacked = list(self.matrices[square.top]) + list(self.matrices[square.left])
        return self.field_.rank(stacked) == d[square.tl]


def _vect_label(field_: FiniteField, dim: int) -> str:
    if dim == 0:
        return "0"
    return field_.label if dim == 1 else f"{field_.label}^{dim}"


def builtin_vect(q: int, dmax: int, duplicate_zero: bool = True) -> ProtoExactStructure:
    """
    F_q 上維度 0..dmax 的向量空間（每個維度一個物件，外加一個重複的零物件）

    Args:
        q: 體的大小（2, 3, 4, 5）
        dmax: 最大維度（<= 4）
        duplicate_zero: 是否加入第二個零物件 0'

    Returns:
        rank_rule 模式的 ProtoExactStructure

    Raises:
        ConfigurationError: q 或 dmax 不支援
        ScaleError: 態射總數超過工作預算
    """
    field_ = FiniteField(q)
    if not 0 <= dmax <= MAX_VECT_DIMENSION:
        raise ConfigurationError(
            f"dmax={dmax} outside 0..{MAX_VECT_DIMENSION}",
            details={'dmax': dmax},
        )

    dims: Dict[ObjId, int] = {d: d for d in range(dmax + 1)}
    labels: Dict[ObjId, str] = {d: _vect_label(field_, d) for d in range(dmax + 1)}
    if duplicate_zero:
        dims[dmax + 1] = 0
        labels[dmax + 1] = "0'"
    objects = tuple(sorted(dims))

    estimate = sum(q ** (dims[a] * dims[b]) for a in objects for b in objects)
    if estimate > settings.WORK_BUDGET:
        raise ScaleError(f"vect({q},{dmax}) morphisms", estimate, settings.WORK_BUDGET)

    source: Dict[MorId, ObjId] = {}
    target: Dict[MorId, ObjId] = {}
    matrices: Dict[MorId, Matrix] = {}
    index: Dict[Tuple[ObjId, ObjId], Dict[Matrix, MorId]] = {}
    homs: Dict[Tuple[ObjId, ObjId], List[MorId]] = {}
    identity: Dict[ObjId, MorId] = {}
    morphism_labels: Dict[MorId, str] = {}

    next_id = 0
    for a in objects:
        for b in objects:
            rows, cols = dims[b], dims[a]
            ordered: List[Matrix] = []
            if a == b:
                ordered.append(_identity_matrix(rows))
            ordered.extend(m for m in _all_matrices(q, rows, cols) if not (a == b and m == ordered[0]))
            index[(a, b)] = {}
            homs[(a, b)] = []
            for matrix in ordered:
                source[next_id], target[next_id] = a, b
                matrices[next_id] = matrix
                index[(a, b)][matrix] = next_id
                homs[(a, b)].append(next_id)
                morphism_labels[next_id] = f"{labels[a]}->{labels[b]} {[list(r) for r in matrix]}"
                next_id += 1
            if a == b:
                identity[a] = homs[(a, b)][0]

    inverses: Dict[MorId, MorId] = {}
    for a in objects:
        for b in objects:
            if dims[a] != dims[b]:
                continue
            for m in homs[(a, b)]:
                inv = field_.inverse_matrix(matrices[m]) if dims[a] else ()
                if inv is not None:
                    inverses[m] = index[(b, a)][inv]

    composition = MatrixCompositionTable(field_, source, target, matrices, index, dims, homs)
    base = FinCategory(
        objects=objects,
        source=source,
        target=target,
        identity=identity,
        composition=composition,
        object_labels=labels,
        morphism_labels=morphism_labels,
        name=f"vect({q},{dmax})" + ("" if duplicate_zero else "[nodup]"),
        inverses=inverses,
    )

    monos = frozenset(m for m in source if field_.rank(matrices[m]) == dims[source[m]])
    epis = frozenset(m for m in source if field_.rank(matrices[m]) == dims[target[m]])
    zeros = tuple(o for o in objects if dims[o] == 0)

    logger.info(
        "Built vector-space category",
        q=q, dmax=dmax, objects=len(objects), morphisms=len(source), duplicate_zero=duplicate_zero,
    )
    return ProtoExactStructure(
        base=base,
        monos=monos,
        epis=epis,
        zeros=zeros,
        bicart_mode=BicartMode.RANK_RULE,
        oracle=VectRankRule(field_, matrices, dims),
        name=base.name,
        enlargement=f"vect({q},{dmax + 1})",
        dimension=dims,
    )


def vect_matrix(E: ProtoExactStructure, m: MorId) -> Matrix:
    """Matrix of a morphism of a builtin vector-space category."""
    oracle = E.oracle
    if not isinstance(oracle, VectRankRule):
        raise ConfigurationError(f"{E.name} is not a builtin vector-space category")
    return oracle.matrices[m]


def vect_morphism(E: ProtoExactStructure, a: ObjId, b: ObjId, matrix: Sequence[Sequence[int]]) -> MorId:
    """Id of the morphism a -> b with the given matrix (rows = dim b)."""
    wanted = tuple(tuple(r) for r in matrix)
    for m in E.base.hom(a, b):
        if vect_matrix(E, m) == wanted:
            return m
    raise KeyError((a, b, wanted))


# ==================== 帶點集合 ====================

def builtin_pointed_sets(nmax: int) -> ProtoExactStructure:
    """
    有限帶點集合 {*, 1, .., n-1}，n = 1..nmax

    單態射 = 單射；滿態射 = 非基點纖維皆為單點的滿射；零物件 = 單點集。
    雙笛卡兒方塊在建構時以泛性質搜尋得出（designated 模式）。
    """
    if not 1 <= nmax <= MAX_POINTED_SET_SIZE:
        raise ConfigurationError(
            f"nmax={nmax} outside 1..{MAX_POINTED_SET_SIZE}",
            details={'nmax': nmax},
        )
    from src.services.universal import derived_bicartesian

    sizes: Dict[ObjId, int] = {n - 1: n for n in range(1, nmax + 1)}
    objects = tuple(sorted(sizes))
    labels = {o: f"P{sizes[o]}" for o in objects}

    source: Dict[MorId, ObjId] = {}
    target: Dict[MorId, ObjId] = {}
    maps: Dict[MorId, Tuple[int, ...]] = {}
    index: Dict[Tuple[ObjId, ObjId], Dict[Tuple[int, ...], MorId]] = {}
    identity: Dict[ObjId, MorId] = {}
    morphism_labels: Dict[MorId, str] = {}
    next_id = 0
    for a in objects:
        for b in objects:
            ordered: List[Tuple[int, ...]] = []
            if a == b:
                ordered.append(tuple(range(sizes[a])))
            for images in product(range(sizes[b]), repeat=sizes[a] - 1):
                f = (0,) + images
                if not (a == b and f == ordered[0]):
                    ordered.append(f)
            index[(a, b)] = {}
            for f in ordered:
                source[next_id], target[next_id] = a, b
                maps[next_id] = f
                index[(a, b)][f] = next_id
                morphism_labels[next_id] = f"{labels[a]}->{labels[b]} {list(f)}"
                next_id += 1
            if a == b:
                identity[a] = index[(a, b)][ordered[0]]

    composition: Dict[Tuple[MorId, MorId], MorId] = {}
    for f, fmap in maps.items():
        for g in index_out(source, target, target[f]):
            gmap = maps[g]
            composition[(g, f)] = index[(source[f], target[g])][tuple(gmap[x] for x in fmap)]

    base = FinCategory(
        objects=objects,
        source=source,
        target=target,
        identity=identity,
        composition=composition,
        object_labels=labels,
        morphism_labels=morphism_labels,
        name=f"pointed_sets({nmax})",
    )

    def admissible_epi(f: Tuple[int, ...], n_target: int) -> bool:
        fibers = [0] * n_target
        for y in f:
            fibers[y] += 1
        return all(fibers[y] == 1 for y in range(1, n_target))

    monos = frozenset(m for m, f in maps.items() if len(set(f)) == len(f))
    epis = frozenset(m for m, f in maps.items() if admissible_epi(f, sizes[target[m]]))

    designated = []
    for top in sorted(monos):
        tl = source[top]
        for left in base.out_of(tl):
            if left not in epis:
                continue
            tr, bl = target[top], target[left]
            for br in objects:
                for right in base.hom(tr, br):
                    if right not in epis:
                        continue
                    for bottom in base.hom(bl, br):
                        if bottom not in monos:
                            continue
                        square = Square(tl, tr, bl, br, top, left, right, bottom)
                        if square.commutes(base) and derived_bicartesian(base, square):
                            designated.append(square.key())

    logger.info(
        "Built pointed-set category",
        nmax=nmax, morphisms=len(source), designated_squares=len(designated),
    )
    return ProtoExactStructure(
        base=base,
        monos=monos,
        epis=epis,
        zeros=(0,),
        bicart_mode=BicartMode.DESIGNATED,
        designated=frozenset(designated),
        name=base.name,
        enlargement=f"pointed_sets({nmax + 1})",
        dimension={o: sizes[o] - 1 for o in objects},
    )


def index_out(source: Dict[MorId, ObjId], target: Dict[MorId, ObjId], obj: ObjId) -> List[MorId]:
    return [m for m in source if source[m] == obj]


# ==================== 零物件範疇 ====================

def builtin_zeros(count: int = 1) -> ProtoExactStructure:
    """只含零物件的範疇：任兩物件之間恰有一個（同構）態射"""
    if not 1 <= count <= MAX_ZERO_OBJECTS:
        raise ConfigurationError(
            f"count={count} outside 1..{MAX_ZERO_OBJECTS}",
            details={'count': count},
        )
    objects = tuple(range(count))
    pair_id = {(a, b): a * count + b for a in objects for b in objects}
    source = {m: a for (a, b), m in pair_id.items()}
    target = {m: b for (a, b), m in pair_id.items()}
    composition = {
        (pair_id[(b, c)], pair_id[(a, b)]): pair_id[(a, c)]
        for a in objects for b in objects for c in objects
    }
    labels = {o: "0" + "'" * o for o in objects}
    base = FinCategory(
        objects=objects,
        source=source,
        target=target,
        identity={o: pair_id[(o, o)] for o in objects},
        composition=composition,
        object_labels=labels,
        morphism_labels={m: f"{labels[a]}->{labels[b]}" for (a, b), m in pair_id.items()},
        name=f"zeros({count})",
        inverses={pair_id[(a, b)]: pair_id[(b, a)] for a in objects for b in objects},
    )
    all_morphisms = frozenset(source)
    return ProtoExactStructure(
        base=base,
        monos=all_morphisms,
        epis=all_morphisms,
        zeros=objects,
        bicart_mode=BicartMode.DERIVED,
        name=base.name,
        dimension={o: 0 for o in objects},
    )
