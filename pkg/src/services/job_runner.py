"""
Job runner
執行 JobSpec：取得範疇、建立建構、執行檢查並組成報告；另提供報告比較

Reports are deterministic apart from the timings block, which report_diff
ignores.
"""
from __future__ import annotations

import json
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

from pydantic import ValidationError as SchemaError

from src.config.constants import (
    EXIT_CHECK_FAILED, EXIT_CONFIGURATION, EXIT_CONSTRUCTION, EXIT_OK, HOM_ORDER, LOWER_FAMILY_CONVENTION,
    SIGMA_CHECK_BOUND, UPPER_FAMILY_CONVENTION,
)
from src.di.service_factory import get_service_factory
from src.domain.category import ProtoExactStructure
from src.domain.sigma_set import SigmaSet
from src.domain.simplicial import CheckReport, MultiSimplicialSet, TruncSimplicialSet
from src.models.models import STRUCTURE_CHECKS, JobSpec, Report
from src.services.groupoids import check_groupoid_equivalence
from src.services.iterated import s_iterated_set
from src.services.ktheory import k0_report
from src.services.s_construction import low_degree_identifications, row0_projection, s_simplicial
from src.services.seq_service import seq_nonsimpliciality_witness, seq_simplicial
from src.services.sigma_checks import check_pointedness, check_stability
from src.services.sigma_service import exact_nerve, product_iso_check, s_construction_sigma
from src.services.simplicial_checks import (
    edgewise_subdivision, multisimplicial_axis_check, nerve, segal_check, two_segal_check,
    validate_multisimplicial, validate_simplicial,
)
from src.utils.exceptions import (
    ConfigurationError, LabException, ReportParseError, ValidationError,
)
from src.utils.logger import get_logger
from src.utils.types import CheckName, Construction, ConventionBlock, MultiExactness, TwoSegalFamily


logger = get_logger('JobRunner')

Built = Union[TruncSimplicialSet, MultiSimplicialSet]

TWO_SEGAL_FAMILIES = {
    CheckName.TWO_SEGAL_ALL: TwoSegalFamily.ALL,
    CheckName.TWO_SEGAL_LOWER: TwoSegalFamily.LOWER,
    CheckName.TWO_SEGAL_UPPER: TwoSegalFamily.UPPER,
}


def exit_code_for(error: LabException) -> int:
    """設定與輸入錯誤為 2，建構層級的錯誤（截斷、非正合封閉、規模、fixture）為 3"""
    if isinstance(error, (ConfigurationError, ValidationError, ReportParseError)):
        return EXIT_CONFIGURATION
    return EXIT_CONSTRUCTION


def conventions(spec: JobSpec) -> ConventionBlock:
    return ConventionBlock(
        lower_family=LOWER_FAMILY_CONVENTION,
        upper_family=UPPER_FAMILY_CONVENTION,
        tie_break=spec.tie_break.value,
        truncation={'levels': max(spec.levels), 'sigma_checks': SIGMA_CHECK_BOUND},
        hom_order=HOM_ORDER,
    )


# ==================== 輸入與建構 ====================

def resolve_structure(spec: JobSpec) -> ProtoExactStructure:
    factory = get_service_factory()
    return factory.structure(spec.builtin) if spec.builtin is not None else factory.load(spec.input)


def build_construction(E: ProtoExactStructure, spec: JobSpec) -> Built:
    """
    Raises:
        TruncationError / NotExactClosedError / ScaleError: 由各建構傳出
    """
    N = spec.bound
    construction = spec.construction
    if construction == Construction.SEQ:
        return seq_simplicial(E, N, spec.tie_break)
    if construction == Construction.S:
        return s_simplicial(E, N)
    if construction == Construction.S2:
        levels = tuple(spec.levels) if len(spec.levels) > 1 else (N, N)
        return s_iterated_set(E, levels, MultiExactness.SEPARATE)
    if construction == Construction.SIGMA_S:
        return s_construction_sigma(exact_nerve(E, N + 1), N)
    if construction == Construction.ESD:
        return edgewise_subdivision(s_simplicial(E, N))
    return nerve(E.base, N)


# ==================== 檢查 ====================

def _entry(check: CheckName, passed: bool, report: Dict[str, Any]) -> Dict[str, Any]:
    return {'check': check.value, 'passed': passed, 'report': report}


def _per_axis(X: MultiSimplicialSet, condition: str, family: TwoSegalFamily) -> CheckReport:
    merged = CheckReport(condition=condition, subject=X.name, checked_range=(0, max(X.bounds)))
    for axis in range(X.arity):
        merged.verdicts.extend(multisimplicial_axis_check(X, axis, condition, family).verdicts)
    return merged


class _CheckContext:
    """單次執行內共用的結構與延遲建立的 Σ-集合"""

    def __init__(self, E: ProtoExactStructure, X: Optional[Built], spec: JobSpec):
        self.E = E
        self.X = X
        self.spec = spec
        self._sigma: Optional[SigmaSet] = None

    @property
    def sigma(self) -> SigmaSet:
        if self._sigma is None:
            self._sigma = exact_nerve(self.E, SIGMA_CHECK_BOUND)
        return self._sigma


def run_check(check: CheckName, ctx: _CheckContext) -> Dict[str, Any]:
    """
    執行單一檢查

    Raises:
        TruncationError / ScaleError: 由檢查傳出
    """
    X, E = ctx.X, ctx.E
    if check == CheckName.IDENTITIES:
        report = validate_multisimplicial(X) if isinstance(X, MultiSimplicialSet) else validate_simplicial(X)
        return _entry(check, report.passed, report.to_dict())
    if check == CheckName.SEGAL:
        report = _per_axis(X, "segal", TwoSegalFamily.ALL) if isinstance(X, MultiSimplicialSet) else segal_check(X)
        return _entry(check, report.passed, report.to_dict())
    if check in TWO_SEGAL_FAMILIES:
        family = TWO_SEGAL_FAMILIES[check]
        report = (_per_axis(X, "2segal", family) if isinstance(X, MultiSimplicialSet)
                  else two_segal_check(X, family=family))
        return _entry(check, report.passed, report.to_dict())
    if check == CheckName.POINTED:
        report = check_pointedness(ctx.sigma)
        return _entry(check, report.passed, report.to_dict())
    if check in (CheckName.STABLE_FULL, CheckName.STABLE_SEMI):
        report = check_stability(ctx.sigma, check.value.split(':')[1])
        return _entry(check, report.passed, report.to_dict())
    if check == CheckName.LOW_DEGREE:
        identification = low_degree_identifications(E)
        return _entry(check, identification.passed, identification.to_dict())
    if check == CheckName.ROW0:
        reports = [check_groupoid_equivalence(row0_projection(E, k)) for k in range(min(ctx.spec.bound, 3) + 1)]
        return _entry(check, all(r.equivalent for r in reports), {'levels': [r.to_dict() for r in reports]})
    if check == CheckName.PRODUCT_ISO:
        report = product_iso_check(tuple(ctx.spec.levels))
        return _entry(check, report.passed, report.to_dict())
    summary = k0_report(E)
    return _entry(check, bool(summary['certificate_verified']), summary)


# ==================== 執行 ====================

def _timed(timings: Dict[str, float], key: str, fn: Callable[[], Any]) -> Any:
    start = time.perf_counter()
    try:
        return fn()
    finally:
        timings[key] = round(time.perf_counter() - start, 6)


def run(spec: JobSpec) -> Report:
    """
    執行一個工作；錯誤轉成報告中的 error 區塊與對應的結束碼

    Returns:
        Report: exit_code 為 0（全部通過）、1（有檢查失敗）、2 或 3（錯誤）
    """
    timings: Dict[str, float] = {}
    counts: List[Dict[str, Any]] = []
    checks: List[Dict[str, Any]] = []
    extras: Dict[str, Any] = {}
    subject = spec.builtin or str(spec.input)
    log = logger.bind(construction=spec.construction.value, levels=spec.levels)
    log.info("Job started", subject=subject, checks=[c.value for c in spec.checks])
    try:
        E = _timed(timings, 'input', lambda: resolve_structure(spec))
        subject = E.name
        needs_construction = not spec.checks or any(c not in STRUCTURE_CHECKS for c in spec.checks)
        X = _timed(timings, 'construct', lambda: build_construction(E, spec)) if needs_construction else None
        if X is not None:
            counts = [dict(c) for c in X.level_counts()]
        ctx = _CheckContext(E, X, spec)
        for check in spec.checks:
            checks.append(_timed(timings, check.value, lambda: run_check(check, ctx)))
        if spec.construction == Construction.SEQ and CheckName.IDENTITIES in spec.checks and spec.bound >= 3:
            witness = seq_nonsimpliciality_witness(E, spec.tie_break, max_level=spec.bound)
            extras['seq_witness'] = witness.to_dict()
        exit_code = EXIT_OK if all(c['passed'] for c in checks) else EXIT_CHECK_FAILED
        error = None
    except LabException as e:
        log.error("Job failed", exception=e, subject=subject)
        exit_code, error = exit_code_for(e), e.to_dict()
        error.pop('timestamp', None)

    report = Report(
        job=spec,
        subject=subject,
        construction=spec.construction.value,
        conventions=dict(conventions(spec)),
        counts=counts,
        checks=checks,
        extras=extras,
        error=error,
        exit_code=exit_code,
        timings=timings,
    )
    log.info("Job finished", subject=subject, exit_code=exit_code)
    return report


def report_json(report: Report) -> str:
    return json.dumps(report.model_dump(mode='json'), indent=2, sort_keys=True, ensure_ascii=False)


def write_report(report: Report, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report_json(report) + "\n", encoding='utf-8')
    logger.info("Report written", path=str(path))
    return path


# ==================== 報告比較 ====================

def load_report(path: Union[str, Path]) -> Report:
    """
    Raises:
        ReportParseError: 檔案不存在、不是 JSON 或不符合報告格式（含版本不符）
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ReportParseError(str(path), f"cannot read: {e}") from e
    try:
        return Report.model_validate_json(text)
    except SchemaError as e:
        first = e.errors()[0]
        location = ".".join(str(p) for p in first.get('loc', ()))
        raise ReportParseError(str(path), f"{location}: {first['msg']}" if location else first['msg']) from e


def _diff(a: Any, b: Any, path: str, out: List[Dict[str, Any]]) -> None:
    if isinstance(a, dict) and isinstance(b, dict):
        for key in sorted(set(a) | set(b)):
            _diff(a.get(key), b.get(key), f"{path}.{key}" if path else str(key), out)
    elif isinstance(a, list) and isinstance(b, list) and len(a) == len(b):
        for n, (x, y) in enumerate(zip(a, b)):
            _diff(x, y, f"{path}[{n}]", out)
    elif a != b:
        out.append({'path': path, 'a': a, 'b': b})


def report_diff(a: Union[str, Path], b: Union[str, Path]) -> List[Dict[str, Any]]:
    """
    欄位層級的差異（忽略 timings）

    Returns:
        [{"path", "a", "b"}]，相同時為空串列
    """
    first, second = (load_report(p).model_dump(mode='json', exclude={'timings'}) for p in (a, b))
    out: List[Dict[str, Any]] = []
    _diff(first, second, "", out)
    logger.info("Reports compared", a=str(a), b=str(b), differences=len(out))
    return out
