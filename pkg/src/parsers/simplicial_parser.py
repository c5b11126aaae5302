"""
Simplicial-set and Sigma-set JSON parsers
單純集合與 Σ-集合的 JSON 解析與輸出

Simplicial format:
    {"N": int, "cells": {"0": [ids], ...}, "d": {"n,i": {cell: cell}}, "s": {"n,i": {cell: cell}}}
Sigma format:
    {"N": int, "cells": {"a,b": [ids]}, "aug_cells": [ids], "aug_map": {z: cell},
     "d": {"axis,a,b,i": {cell: cell}}, "s": {"axis,a,b,i": {cell: cell}},
     "generators": [["a,b", cell]]}
Cell ids are strings and become the payloads of the parsed set.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import Field
from pydantic import ValidationError as SchemaError

from src.domain.sigma_set import SigmaSet, sigma_indices
from src.domain.simplicial import TruncSimplicialSet
from src.parsers.category_parser import StrictModel
from src.utils.exceptions import ConfigurationError, ValidationError
from src.utils.logger import get_logger


logger = get_logger('SimplicialParser')


class SimplicialDocument(StrictModel):
    N: int = Field(ge=0)
    cells: Dict[str, List[str]]
    d: Dict[str, Dict[str, str]] = Field(default_factory=dict)
    s: Dict[str, Dict[str, str]] = Field(default_factory=dict)
    name: str = "X"


class SigmaDocument(StrictModel):
    N: int = Field(ge=1)
    cells: Dict[str, List[str]]
    aug_cells: List[str]
    aug_map: Dict[str, str]
    d: Dict[str, Dict[str, str]] = Field(default_factory=dict)
    s: Dict[str, Dict[str, str]] = Field(default_factory=dict)
    generators: Optional[List[Tuple[str, str]]] = None
    name: str = "X"


def _key(text: str, size: int, what: str) -> Tuple[int, ...]:
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError as e:
        raise ValidationError(what, text, "operator keys are comma-separated integers") from e
    if len(parts) != size:
        raise ValidationError(what, text, f"expected {size} comma-separated integers")
    return parts


def _table(mapping: Dict[str, str], source: List[str], target: List[str], what: str) -> Tuple[int, ...]:
    """{cell: cell} -> 索引表；每個來源格都必須有像"""
    index = {c: n for n, c in enumerate(target)}
    table = []
    for c in source:
        if c not in mapping:
            raise ValidationError(what, c, "operator table is missing this cell")
        if mapping[c] not in index:
            raise ValidationError(what, mapping[c], "image is not a cell of the target level")
        table.append(index[mapping[c]])
    return tuple(table)


def _validated(model: type, data: Union[Dict[str, Any], str], what: str) -> Any:
    try:
        return model.model_validate_json(data) if isinstance(data, str) else model.model_validate(data)
    except SchemaError as e:
        raise ValidationError(what, 'document', e.errors()[0]['msg']) from e


def parse_simplicial_set(data: Union[Dict[str, Any], str]) -> TruncSimplicialSet:
    """
    Raises:
        ValidationError: 格式錯誤、缺少層級或運算子表不完整
    """
    doc: SimplicialDocument = _validated(SimplicialDocument, data, 'simplicial set')
    levels = []
    for n in range(doc.N + 1):
        if str(n) not in doc.cells:
            raise ValidationError('cells', n, "missing level")
        levels.append(tuple(doc.cells[str(n)]))
    faces: Dict[Tuple[int, int], Tuple[int, ...]] = {}
    degeneracies: Dict[Tuple[int, int], Tuple[int, ...]] = {}
    for n in range(doc.N + 1):
        for i in range(n + 1):
            if n >= 1:
                key = f"{n},{i}"
                faces[(n, i)] = _table(doc.d.get(key, {}), list(levels[n]), list(levels[n - 1]), f"d {key}")
            if n < doc.N:
                key = f"{n},{i}"
                degeneracies[(n, i)] = _table(doc.s.get(key, {}), list(levels[n]), list(levels[n + 1]), f"s {key}")
    for text in list(doc.d) + list(doc.s):
        _key(text, 2, 'operator')
    X = TruncSimplicialSet(bound=doc.N, cells=tuple(levels), faces=faces, degeneracies=degeneracies, name=doc.name)
    logger.info("Simplicial set parsed", name=doc.name, bound=doc.N)
    return X


def parse_sigma_set(data: Union[Dict[str, Any], str]) -> SigmaSet:
    """
    Raises:
        ValidationError: 格式錯誤、缺少 Σ 物件或運算子表不完整
    """
    doc: SigmaDocument = _validated(SigmaDocument, data, 'sigma set')
    cells: Dict[Tuple[int, int], Tuple[str, ...]] = {}
    for a, b in sigma_indices(doc.N):
        if f"{a},{b}" not in doc.cells:
            raise ValidationError('cells', f"{a},{b}", "missing Sigma object")
        cells[(a, b)] = tuple(doc.cells[f"{a},{b}"])

    faces: Dict[Tuple[int, int, int, int], Tuple[int, ...]] = {}
    degeneracies: Dict[Tuple[int, int, int, int], Tuple[int, ...]] = {}
    for (a, b), level in cells.items():
        for axis, k in ((0, a), (1, b)):
            lower = (a - 1, b) if axis == 0 else (a, b - 1)
            upper = (a + 1, b) if axis == 0 else (a, b + 1)
            for i in range(k + 1):
                key = f"{axis},{a},{b},{i}"
                if k >= 1:
                    faces[(axis, a, b, i)] = _table(doc.d.get(key, {}), list(level), list(cells[lower]), f"d {key}")
                if a + b + 2 <= doc.N:
                    degeneracies[(axis, a, b, i)] = _table(
                        doc.s.get(key, {}), list(level), list(cells[upper]), f"s {key}")
    for text in list(doc.d) + list(doc.s):
        _key(text, 4, 'operator')

    aug_map = _table(doc.aug_map, doc.aug_cells, list(cells[(0, 0)]), "aug_map")
    generators = None
    if doc.generators is not None:
        generators = []
        for index_text, cell in doc.generators:
            index = _key(index_text, 2, 'generator')
            if cell not in cells.get(index, ()):
                raise ValidationError('generator', cell, f"not a cell at {index_text}")
            generators.append((index, cells[index].index(cell)))
        generators = tuple(generators)
    X = SigmaSet(
        bound=doc.N, cells=cells, aug_cells=tuple(doc.aug_cells), faces=faces, degeneracies=degeneracies,
        aug_map=aug_map, name=doc.name, generators=generators,
    )
    logger.info("Sigma set parsed", name=doc.name, bound=doc.N)
    return X


def _cell_names(level: Tuple[Any, ...], prefix: str) -> List[str]:
    """payload 為字串時原樣輸出，否則以位置命名"""
    return [p if isinstance(p, str) else f"{prefix}{n}" for n, p in enumerate(level)]


def simplicial_set_to_document(X: TruncSimplicialSet) -> Dict[str, Any]:
    names = [_cell_names(X.cells[n], f"c{n}_") for n in range(X.bound + 1)]
    return {
        'name': X.name,
        'N': X.bound,
        'cells': {str(n): names[n] for n in range(X.bound + 1)},
        'd': {f"{n},{i}": {names[n][c]: names[n - 1][t] for c, t in enumerate(table)}
              for (n, i), table in sorted(X.faces.items())},
        's': {f"{n},{i}": {names[n][c]: names[n + 1][t] for c, t in enumerate(table)}
              for (n, i), table in sorted(X.degeneracies.items())},
    }


def sigma_set_to_document(X: SigmaSet) -> Dict[str, Any]:
    """Σ-集合 -> 文件；樣板附上生成元呈現"""
    names = {index: _cell_names(X.cells[index], f"c{index[0]}{index[1]}_") for index in X.indices()}
    aug_names = _cell_names(X.aug_cells, "z")

    def shift(axis: int, a: int, b: int, delta: int) -> Tuple[int, int]:
        return (a + delta, b) if axis == 0 else (a, b + delta)

    doc: Dict[str, Any] = {
        'name': X.name,
        'N': X.bound,
        'cells': {f"{a},{b}": names[(a, b)] for a, b in X.indices()},
        'aug_cells': aug_names,
        'aug_map': {aug_names[z]: names[(0, 0)][c] for z, c in enumerate(X.aug_map)},
        'd': {f"{axis},{a},{b},{i}": {names[(a, b)][c]: names[shift(axis, a, b, -1)][t] for c, t in enumerate(table)}
              for (axis, a, b, i), table in sorted(X.faces.items())},
        's': {f"{axis},{a},{b},{i}": {names[(a, b)][c]: names[shift(axis, a, b, +1)][t] for c, t in enumerate(table)}
              for (axis, a, b, i), table in sorted(X.degeneracies.items())},
    }
    if X.generators is not None:
        doc['generators'] = [[f"{a},{b}", names[(a, b)][c]] for (a, b), c in X.generators]
    return doc


def load_json(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Raises:
        ConfigurationError: 檔案不存在或不是 JSON
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"Input file not found: {path}", details={'path': str(path)})
    try:
        return json.loads(path.read_text(encoding='utf-8'))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"Cannot read JSON from {path}", details={'error': str(e)}) from e
