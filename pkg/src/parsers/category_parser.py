"""
Category JSON parser
範疇 JSON 解析器 - 以 pydantic 驗證文件，轉成 ProtoExactStructure，並可反向輸出

Format:
    {"name": str, "objects": [{"id", "label", "zero"}],
     "morphisms": [{"id", "src", "dst", "mono", "epi", "label"}],
     "identities": {obj: mor}, "composition": [[g, f, gf]],
     "bicartesian": [[tl, tr, bl, br, top, left, right, bottom]]}

Ids are strings. Without "bicartesian" the squares are decided by their
universal property.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field
from pydantic import ValidationError as SchemaError

from src.domain.category import FinCategory, ProtoExactStructure
from src.services.fincat_service import validate_category, validate_structure
from src.utils.exceptions import ConfigurationError, ValidationError
from src.utils.logger import get_logger
from src.utils.types import BicartMode


logger = get_logger('CategoryParser')


# ==================== 文件結構 ====================

class StrictModel(BaseModel):
    """拒絕未知欄位"""

    model_config = ConfigDict(extra="forbid")


class ObjectEntry(StrictModel):
    id: str
    label: Optional[str] = None
    zero: bool = False


class MorphismEntry(StrictModel):
    id: str
    src: str
    dst: str
    mono: bool = False
    epi: bool = False
    label: Optional[str] = None


class CategoryDocument(StrictModel):
    name: str = "E"
    objects: List[ObjectEntry] = Field(min_length=1)
    morphisms: List[MorphismEntry]
    identities: Dict[str, str]
    composition: List[Tuple[str, str, str]]
    bicartesian: Optional[List[Tuple[str, str, str, str, str, str, str, str]]] = None


# ==================== 轉換 ====================

def _index(ids: List[str], kind: str) -> Dict[str, int]:
    table: Dict[str, int] = {}
    for n, key in enumerate(ids):
        if key in table:
            raise ValidationError(kind, key, "duplicate id")
        table[key] = n
    return table


def _lookup(table: Dict[str, int], key: str, kind: str) -> int:
    if key not in table:
        raise ValidationError(kind, key, "unknown id")
    return table[key]


def document_to_structure(doc: CategoryDocument) -> ProtoExactStructure:
    """
    文件 -> ProtoExactStructure（並驗證範疇與結構公理）

    Raises:
        ValidationError: 參照未知 id，或違反範疇／結構公理
    """
    objects = _index([o.id for o in doc.objects], 'object')
    morphisms = _index([m.id for m in doc.morphisms], 'morphism')
    source = {morphisms[m.id]: _lookup(objects, m.src, 'object') for m in doc.morphisms}
    target = {morphisms[m.id]: _lookup(objects, m.dst, 'object') for m in doc.morphisms}
    identity = {_lookup(objects, o, 'object'): _lookup(morphisms, m, 'morphism') for o, m in doc.identities.items()}
    composition = {
        (_lookup(morphisms, g, 'morphism'), _lookup(morphisms, f, 'morphism')): _lookup(morphisms, gf, 'morphism')
        for g, f, gf in doc.composition
    }
    base = FinCategory(
        objects=tuple(range(len(objects))),
        source=source,
        target=target,
        identity=identity,
        composition=composition,
        object_labels={objects[o.id]: o.label or o.id for o in doc.objects},
        morphism_labels={morphisms[m.id]: m.label or m.id for m in doc.morphisms},
        name=doc.name,
    )
    report = validate_category(base)
    if not report.valid:
        first = report.violations[0]
        raise ValidationError('category', doc.name, f"{first.rule} at {list(first.witness)}: {first.message}")

    designated = None
    if doc.bicartesian is not None:
        designated = frozenset(
            tuple(_lookup(objects, k, 'object') for k in sq[:4]) + tuple(_lookup(morphisms, k, 'morphism') for k in sq[4:])
            for sq in doc.bicartesian
        )
    E = ProtoExactStructure(
        base=base,
        monos=frozenset(morphisms[m.id] for m in doc.morphisms if m.mono),
        epis=frozenset(morphisms[m.id] for m in doc.morphisms if m.epi),
        zeros=tuple(objects[o.id] for o in doc.objects if o.zero),
        bicart_mode=BicartMode.DESIGNATED if designated is not None else BicartMode.DERIVED,
        designated=designated or frozenset(),
        name=doc.name,
    )
    report = validate_structure(E)
    if not report.valid:
        first = report.violations[0]
        raise ValidationError('structure', doc.name, f"{first.rule} at {list(first.witness)}: {first.message}")
    return E


def parse_category(data: Union[Dict[str, Any], str]) -> ProtoExactStructure:
    """
    解析字典或 JSON 字串

    Raises:
        ValidationError: 文件不符合格式（含未知欄位）或違反公理
    """
    try:
        doc = CategoryDocument.model_validate_json(data) if isinstance(data, str) \
            else CategoryDocument.model_validate(data)
    except SchemaError as e:
        raise ValidationError('category', 'document', e.errors()[0]['msg']) from e
    E = document_to_structure(doc)
    logger.info("Category parsed", name=E.name, objects=len(E.base.objects), morphisms=len(E.base.morphisms))
    return E


def load_category(path: Union[str, Path]) -> ProtoExactStructure:
    """
    Raises:
        ConfigurationError: 檔案不存在或無法讀取
        ValidationError: 內容無效
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"Category file not found: {path}", details={'path': str(path)})
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigurationError(f"Cannot read category file: {path}", details={'error': str(e)}) from e
    return parse_category(text)


def structure_to_document(E: ProtoExactStructure) -> Dict[str, Any]:
    """ProtoExactStructure -> 文件字典（designated 模式才輸出方塊清單）"""
    C = E.base

    def oid(o: int) -> str:
        return f"o{o}"

    def mid(m: int) -> str:
        return f"m{m}"

    zeros = set(E.zeros)
    doc = CategoryDocument(
        name=E.name,
        objects=[ObjectEntry(id=oid(o), label=C.label(o), zero=o in zeros) for o in C.objects],
        morphisms=[
            MorphismEntry(id=mid(m), src=oid(C.source[m]), dst=oid(C.target[m]),
                          mono=m in E.monos, epi=m in E.epis, label=C.morphism_label(m))
            for m in C.morphisms
        ],
        identities={oid(o): mid(C.identity[o]) for o in C.objects},
        composition=[(mid(g), mid(f), mid(C.compose(g, f))) for g, f in C.composable_pairs()],
        bicartesian=(
            [tuple(oid(k) for k in key[:4]) + tuple(mid(k) for k in key[4:]) for key in sorted(E.designated)]
            if E.bicart_mode == BicartMode.DESIGNATED else None
        ),
    )
    return doc.model_dump(exclude_none=True)


def dump_category(E: ProtoExactStructure) -> str:
    return json.dumps(structure_to_document(E), indent=2, ensure_ascii=False)
