"""
S-construction lab - command-line entry point
S 建構實驗室 - 命令列主程式

Subcommands:
    generate   write a builtin category (or a negative-control search hit) as JSON
    construct  build a construction and print its per-level cell counts
    check      run checks and write a report
    k0         print the K_0 invariants
    diff       compare two reports, ignoring timings
    config     print the effective settings

Exit codes: 0 pass, 1 a check failed or reports differ, 2 configuration error,
3 truncation / not-exact-closed / scale / fixture errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd
from pydantic import ValidationError as SchemaError

from src.config import settings
from src.config.constants import EXIT_CHECK_FAILED, EXIT_CONFIGURATION, EXIT_OK
from src.di import get_service_factory
from src.models.models import JobSpec, Report
from src.parsers.category_parser import dump_category
from src.services.job_runner import exit_code_for, report_diff, report_json, run, write_report
from src.services.ktheory import k0_report
from src.services.negative_control import search_semi_stable_candidates
from src.utils.exceptions import LabException
from src.utils.logger import get_logger
from src.utils.types import CheckName, Construction, TieBreak, TwoSegalFamily


logger = get_logger('CLI')


# ==================== 參數 ====================

def _add_source(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--builtin", help="vect:q,dmax[,nodup] | pointed:n | zeros:c | negative-control")
    source.add_argument("--input", help="category JSON file")


def _add_job(parser: argparse.ArgumentParser) -> None:
    _add_source(parser)
    parser.add_argument("--construction", default=Construction.S.value, choices=[c.value for c in Construction])
    parser.add_argument("--levels", default="3", help="truncation level, or comma-separated levels")
    parser.add_argument("--tie-break", default=None, choices=[t.value for t in TieBreak])
    parser.add_argument("--out", help="report path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sdot", description="Desk-scale lab for the Waldhausen S-construction.")
    parser.add_argument("--log-level", default=None, help="overrides SDOT_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    generate = sub.add_parser("generate", help="write a builtin category as JSON")
    generate.add_argument("--builtin", required=True)
    generate.add_argument("--seed", type=int, default=None, help="run the negative-control search with this seed")
    generate.add_argument("--budget", type=int, default=200, help="search trials")
    generate.add_argument("--out")

    construct = sub.add_parser("construct", help="build a construction and print cell counts")
    _add_job(construct)

    check = sub.add_parser("check", help="run checks and write a report")
    _add_job(check)
    check.add_argument("--checks", default=CheckName.IDENTITIES.value,
                       help="comma-separated: " + ", ".join(c.value for c in CheckName))
    check.add_argument("--family", default=None, choices=[f.value for f in TwoSegalFamily],
                       help="shorthand for adding 2segal:<family>")

    k0 = sub.add_parser("k0", help="print K_0 invariants")
    _add_source(k0)
    k0.add_argument("--out")

    diff = sub.add_parser("diff", help="compare two reports")
    diff.add_argument("a")
    diff.add_argument("b")

    sub.add_parser("config", help="print the effective settings")
    return parser


def _levels(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"levels must be comma-separated integers, got {text!r}")


def job_from_args(args: argparse.Namespace) -> JobSpec:
    """
    Raises:
        pydantic.ValidationError: 規格無效
        argparse.ArgumentTypeError: 層級格式錯誤
    """
    checks: List[str] = []
    if getattr(args, 'checks', None):
        checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    if getattr(args, 'family', None):
        family = f"2segal:{args.family}"
        if family not in checks:
            checks.append(family)
    data: Dict[str, Any] = {
        'builtin': args.builtin,
        'input': args.input,
        'construction': args.construction,
        'checks': checks,
        'levels': _levels(args.levels),
    }
    if args.tie_break:
        data['tie_break'] = args.tie_break
    return JobSpec.model_validate(data)


# ==================== 輸出 ====================

def _emit(text: str, out: Optional[str]) -> None:
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n", encoding='utf-8')
    else:
        print(text)


def counts_table(report: Report) -> str:
    if not report.counts:
        return "(no cells)"
    return pd.DataFrame(report.counts).to_string(index=False)


def _print_error(error: Dict[str, Any]) -> None:
    print(f"{error['error_code']}: {error['message']}", file=sys.stderr)


# ==================== 子命令 ====================

def cmd_generate(args: argparse.Namespace) -> int:
    factory = get_service_factory()
    if args.seed is not None:
        if args.builtin != "negative-control":
            print("--seed applies to --builtin negative-control only", file=sys.stderr)
            return EXIT_CONFIGURATION
        hits = search_semi_stable_candidates(args.seed, args.budget)
        if not hits:
            print(f"no semi-stable candidate within {args.budget} trials", file=sys.stderr)
            return EXIT_CHECK_FAILED
        _emit(json.dumps(hits[0], indent=2, ensure_ascii=False), args.out)
        return EXIT_OK
    _emit(dump_category(factory.structure(args.builtin)), args.out)
    return EXIT_OK


def cmd_job(args: argparse.Namespace) -> int:
    try:
        spec = job_from_args(args)
    except (SchemaError, argparse.ArgumentTypeError) as e:
        print(f"CONFIGURATION_ERROR: {e}", file=sys.stderr)
        return EXIT_CONFIGURATION
    report = run(spec)
    if report.error is not None:
        _print_error(report.error)
    if args.command == "construct":
        print(counts_table(report))
    else:
        for entry in report.checks:
            print(f"{entry['check']:>14}  {'pass' if entry['passed'] else 'FAIL'}")
    if args.out:
        write_report(report, args.out)
    elif args.command == "check":
        print(report_json(report))
    return report.exit_code


def cmd_k0(args: argparse.Namespace) -> int:
    factory = get_service_factory()
    E = factory.structure(args.builtin) if args.builtin else factory.load(args.input)
    summary = k0_report(E)
    _emit(json.dumps(summary, indent=2, ensure_ascii=False), args.out)
    return EXIT_OK if summary['certificate_verified'] else EXIT_CHECK_FAILED


def cmd_config(args: argparse.Namespace) -> int:
    print(settings.get_configuration_status())
    return EXIT_OK


def cmd_diff(args: argparse.Namespace) -> int:
    differences = report_diff(args.a, args.b)
    print(json.dumps(differences, indent=2, ensure_ascii=False))
    return EXIT_OK if not differences else EXIT_CHECK_FAILED


COMMANDS = {
    "generate": cmd_generate,
    "construct": cmd_job,
    "check": cmd_job,
    "k0": cmd_k0,
    "diff": cmd_diff,
    "config": cmd_config,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        get_service_factory().configure_logging(args.log_level)
        return COMMANDS[args.command](args)
    except LabException as e:
        logger.error("Command failed", exception=e, command=args.command)
        _print_error(e.to_dict())
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
