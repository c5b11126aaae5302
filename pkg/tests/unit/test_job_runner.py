"""
測試工作規格、執行與報告比較
"""
import json

import pytest
from pydantic import ValidationError as SchemaError

from src.config.constants import EXIT_CHECK_FAILED, EXIT_CONFIGURATION, EXIT_CONSTRUCTION, EXIT_OK
from src.models.models import JobSpec, Report
from src.services.job_runner import exit_code_for, load_report, report_diff, run, write_report
from src.utils.exceptions import (
    ConfigurationError, FixtureMissingError, ReportParseError, TruncationError, ValidationError,
)
from src.utils.types import CheckName, Construction, TieBreak


class TestJobSpec:

    def test_defaults(self):
        spec = JobSpec(builtin="vect:2,1")

        assert spec.construction == Construction.S
        assert spec.levels == [3]
        assert spec.tie_break == TieBreak.LEAST
        assert spec.bound == 3

    @pytest.mark.parametrize('data', [
        {},
        {'builtin': "vect:2,1", 'input': "x.json"},
        {'builtin': "vect:two"},
        {'builtin': "vect:2,1", 'levels': [-1]},
        {'builtin': "vect:2,1", 'construction': "seq", 'levels': [9]},
        {'builtin': "vect:2,1", 'levels': [1, 1]},
        {'builtin': "vect:2,1", 'construction': "s2", 'levels': [1, 1, 1]},
        {'builtin': "vect:2,1", 'checks': ["3segal"]},
        {'builtin': "vect:2,1", 'colour': "red"},
    ])
    def test_invalid_specs(self, data):
        with pytest.raises(SchemaError):
            JobSpec.model_validate(data)

    def test_product_iso_allows_several_levels(self):
        spec = JobSpec(builtin="zeros:1", checks=[CheckName.PRODUCT_ISO], levels=[1, 1])

        assert spec.levels == [1, 1]


class TestExitCodes:

    @pytest.mark.parametrize('error,code', [
        (ConfigurationError("bad"), EXIT_CONFIGURATION),
        (ValidationError("f", 1, "r"), EXIT_CONFIGURATION),
        (ReportParseError("a.json", "r"), EXIT_CONFIGURATION),
        (TruncationError(4, 3), EXIT_CONSTRUCTION),
        (FixtureMissingError("f", "r"), EXIT_CONSTRUCTION),
    ])
    def test_mapping(self, error, code):
        assert exit_code_for(error) == code


@pytest.mark.usefixtures("fresh_factory")
class TestRun:

    def test_passing_job(self):
        report = run(JobSpec(builtin="vect:2,1", checks=[CheckName.IDENTITIES, CheckName.TWO_SEGAL_ALL]))

        assert report.exit_code == EXIT_OK
        assert report.passed
        assert [c['check'] for c in report.checks] == ["identities", "2segal:all"]
        assert [c['level'] for c in report.counts] == ["0", "1", "2", "3"]
        assert report.conventions['tie_break'] == "least"
        assert 'construct' in report.timings

    def test_failing_check(self):
        report = run(JobSpec(builtin="vect:2,1", checks=[CheckName.SEGAL]))

        assert report.exit_code == EXIT_CHECK_FAILED
        assert not report.passed
        assert report.checks[0]['report']['passed'] is False

    def test_truncation_becomes_error_block(self):
        report = run(JobSpec(builtin="vect:2,1", checks=[CheckName.TWO_SEGAL_ALL], levels=[2]))

        assert report.exit_code == EXIT_CONFIGURATION
        assert report.error['error_code'] == 'VALIDATION_ERROR'
        assert 'timestamp' not in report.error

    def test_structure_checks_skip_construction(self):
        report = run(JobSpec(builtin="vect:2,1", checks=[CheckName.POINTED, CheckName.K0]))

        assert report.exit_code == EXIT_OK
        assert report.counts == []
        assert 'construct' not in report.timings

    def test_missing_input(self, tmp_path):
        report = run(JobSpec(input=str(tmp_path / "absent.json"), checks=[CheckName.IDENTITIES]))

        assert report.exit_code == EXIT_CONFIGURATION
        assert report.error['error_code'] == 'CONFIGURATION_ERROR'

    def test_seq_run_records_witness(self):
        report = run(JobSpec(builtin="vect:2,2", construction=Construction.SEQ,
                             checks=[CheckName.IDENTITIES], levels=[3]))

        witness = report.extras['seq_witness']
        assert witness['identity'] == 'd0d1=d0d0'
        assert witness['tie_break'] == 'least'


@pytest.mark.usefixtures("fresh_factory")
class TestReports:

    @pytest.fixture
    def written(self, tmp_path):
        spec = JobSpec(builtin="vect:2,1", checks=[CheckName.IDENTITIES], levels=[2])
        first = write_report(run(spec), tmp_path / "a.json")
        second = write_report(run(spec), tmp_path / "b.json")
        return first, second

    def test_reruns_are_identical(self, written):
        assert report_diff(*written) == []

    def test_round_trip(self, written):
        report = load_report(written[0])

        assert isinstance(report, Report)
        assert report.job.levels == [2]

    def test_differences_are_listed(self, written, tmp_path):
        data = json.loads(written[1].read_text(encoding='utf-8'))
        data['subject'] = "other"
        changed = tmp_path / "c.json"
        changed.write_text(json.dumps(data), encoding='utf-8')

        differences = report_diff(written[0], changed)

        assert differences == [{'path': 'subject', 'a': 'vect(2,1)', 'b': 'other'}]

    def test_timings_are_ignored(self, written, tmp_path):
        data = json.loads(written[1].read_text(encoding='utf-8'))
        data['timings'] = {'construct': 99.0}
        changed = tmp_path / "d.json"
        changed.write_text(json.dumps(data), encoding='utf-8')

        assert report_diff(written[0], changed) == []

    def test_schema_version_skew(self, written, tmp_path):
        data = json.loads(written[0].read_text(encoding='utf-8'))
        data['schema_version'] = "0.9"
        skewed = tmp_path / "old.json"
        skewed.write_text(json.dumps(data), encoding='utf-8')

        with pytest.raises(ReportParseError):
            report_diff(written[0], skewed)

    def test_not_a_report(self, tmp_path):
        path = tmp_path / "junk.json"
        path.write_text("[1, 2", encoding='utf-8')

        with pytest.raises(ReportParseError):
            load_report(path)

    def test_missing_report(self, tmp_path):
        with pytest.raises(ReportParseError):
            load_report(tmp_path / "absent.json")


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
