"""
Semi-stable negative control
半穩定但不穩定的有限 Σ-集合：隨附 fixture 的載入、重新驗證與產生它的有界搜尋

The fixture is a small proto-exact category with designated bicartesian
squares. Its exact nerve is pointed and semi-stable, some cospan has two
completions, so full stability fails; its S-construction is lower 2-Segal
but not upper 2-Segal.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.config.constants import NEGATIVE_CONTROL_FIXTURE
from src.domain.category import ProtoExactStructure, Square
from src.domain.sigma_set import SigmaSet
from src.domain.simplicial import CheckReport
from src.parsers.category_parser import parse_category, structure_to_document
from src.repositories.fixture_repository import FixtureRepository
from src.services.sigma_checks import check_pointedness, check_stability
from src.services.sigma_service import exact_nerve, s_construction_sigma
from src.services.simplicial_checks import two_segal_check
from src.utils.exceptions import FixtureMissingError, LabException
from src.utils.logger import get_logger
from src.utils.types import BicartMode, SquareKey, StabilityMode, TwoSegalFamily


logger = get_logger('NegativeControl')

FIXTURE_NAME = NEGATIVE_CONTROL_FIXTURE

# claim -> 報告
CLAIMS = ('pointed', 'stable_semi', 'stable_full', 'two_segal_lower', 'two_segal_upper')


@dataclass
class NegativeControlReport:
    """fixture 重新驗證的結果"""

    name: str
    claims: Dict[str, bool]
    reports: Dict[str, CheckReport] = field(default_factory=dict)

    @property
    def outcomes(self) -> Dict[str, bool]:
        return {claim: report.passed for claim, report in self.reports.items()}

    @property
    def mismatches(self) -> List[str]:
        return [c for c in CLAIMS if self.outcomes.get(c) != self.claims.get(c)]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'claims': dict(self.claims),
            'outcomes': self.outcomes,
            'reports': {claim: report.to_dict() for claim, report in self.reports.items()},
        }


def load_fixture(repository: Optional[FixtureRepository] = None) -> Dict[str, Any]:
    """
    Raises:
        FixtureMissingError: 檔案不存在或缺少必要欄位
    """
    doc = (repository or FixtureRepository()).get(FIXTURE_NAME)
    missing = [k for k in ('category', 'nerve_bound', 'levels', 'claims') if k not in doc]
    if missing:
        raise FixtureMissingError(FIXTURE_NAME, f"missing fields {missing}")
    return doc


def verify_fixture(doc: Dict[str, Any]) -> Tuple[SigmaSet, NegativeControlReport]:
    """
    重新執行 fixture 宣稱的所有檢查

    Raises:
        FixtureMissingError: 範疇無效或截斷不足以執行檢查
    """
    name = doc.get('name', FIXTURE_NAME)
    try:
        E = parse_category(doc['category'])
        X = exact_nerve(E, int(doc['nerve_bound']))
        S = s_construction_sigma(X, int(doc['levels']))
        reports = {
            'pointed': check_pointedness(X),
            'stable_semi': check_stability(X, StabilityMode.SEMI),
            'stable_full': check_stability(X, StabilityMode.FULL),
            'two_segal_lower': two_segal_check(S, family=TwoSegalFamily.LOWER),
            'two_segal_upper': two_segal_check(S, family=TwoSegalFamily.UPPER),
        }
    except LabException as e:
        raise FixtureMissingError(name, f"fixture does not re-verify: {e.message}") from e
    report = NegativeControlReport(name=name, claims={c: bool(doc['claims'].get(c)) for c in CLAIMS}, reports=reports)
    logger.info("Negative control verified", fixture=name, outcomes=report.outcomes, mismatches=report.mismatches)
    return X, report


def semi_stable_negative_control(repository: Optional[FixtureRepository] = None) -> SigmaSet:
    """
    載入並重新驗證隨附的負控制 Σ-集合

    Returns:
        SigmaSet: fixture 範疇的正合神經

    Raises:
        FixtureMissingError: fixture 不存在，或任何宣稱的結果不成立
    """
    X, report = verify_fixture(load_fixture(repository))
    if report.mismatches:
        raise FixtureMissingError(report.name, f"claims do not hold: {report.mismatches}")
    return X


# ==================== 有界搜尋 ====================

def candidate_squares(E: ProtoExactStructure) -> List[SquareKey]:
    """所有交換且邊屬於正確類別的方塊"""
    C = E.base
    keys = []
    for top in sorted(E.monos):
        for left in C.out_of(C.source[top]):
            if left not in E.epis:
                continue
            for right in C.out_of(C.target[top]):
                if right not in E.epis:
                    continue
                for bottom in C.hom(C.target[left], C.target[right]):
                    square = Square.from_morphisms(C, top, left, right, bottom)
                    if bottom in E.monos and square.commutes(C):
                        keys.append(square.key())
    return sorted(keys)


def search_semi_stable_candidates(seed: int, budget: int, base: Optional[ProtoExactStructure] = None) -> List[Dict[str, Any]]:
    """
    在固定範疇上隨機挑選 designated 方塊子集，保留點化、半穩定但不穩定者

    Args:
        seed: 亂數種子
        budget: 嘗試次數
        base: 提供範疇與類別的結構（預設為 fixture 的範疇）

    Returns:
        命中的範疇文件（依方塊數排序），可直接寫成 fixture 的 "category"
    """
    if base is None:
        base = parse_category(load_fixture()['category'])
    squares = candidate_squares(base)
    rng = np.random.default_rng(seed)
    seen = set()
    hits: List[Dict[str, Any]] = []
    for trial in range(budget):
        chosen = frozenset(k for k, keep in zip(squares, rng.random(len(squares)) < 0.5) if keep)
        if chosen in seen:
            continue
        seen.add(chosen)
        E = base.with_mode(BicartMode.DESIGNATED, designated=chosen, name=f"{base.base.name}#{trial}")
        try:
            X = exact_nerve(E, 3)
            if not check_pointedness(X).passed or not check_stability(X, StabilityMode.SEMI).passed:
                continue
            if check_stability(X, StabilityMode.FULL).passed:
                continue
        except LabException as e:
            logger.debug("Candidate rejected", trial=trial, error=e.message)
            continue
        hits.append(structure_to_document(E))
        logger.info("Semi-stable candidate found", trial=trial, squares=len(chosen))
    hits.sort(key=lambda doc: (len(doc.get('bicartesian', [])), doc['bicartesian']))
    logger.info("Negative control search finished", seed=seed, budget=budget, hits=len(hits))
    return hits
