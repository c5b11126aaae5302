"""
測試命令列介面的子命令與結束碼
"""
import json

import pytest

from app import main
from src.config import settings


pytestmark = pytest.mark.usefixtures("fresh_factory")


class TestGenerate:

    def test_builtin_to_stdout(self, capsys):
        assert main(["generate", "--builtin", "zeros:1"]) == 0

        doc = json.loads(capsys.readouterr().out)
        assert doc['name'] == "zeros(1)"

    def test_builtin_to_file(self, tmp_path):
        out = tmp_path / "vect.json"

        assert main(["generate", "--builtin", "vect:2,1", "--out", str(out)]) == 0
        assert json.loads(out.read_text(encoding='utf-8'))['name'] == "vect(2,1)"

    def test_unknown_builtin(self):
        assert main(["generate", "--builtin", "matrices:3"]) == 2

    def test_seed_needs_negative_control(self):
        assert main(["generate", "--builtin", "vect:2,1", "--seed", "1"]) == 2


class TestCheck:

    def test_passing_check_writes_report(self, tmp_path):
        out = tmp_path / "report.json"

        code = main(["check", "--builtin", "vect:2,1", "--levels", "3",
                     "--checks", "identities", "--family", "lower", "--out", str(out)])

        assert code == 0
        report = json.loads(out.read_text(encoding='utf-8'))
        assert [c['check'] for c in report['checks']] == ["identities", "2segal:lower"]
        assert report['exit_code'] == 0

    def test_failing_check(self, capsys):
        code = main(["check", "--builtin", "vect:2,1", "--levels", "2", "--checks", "segal"])

        assert code == 1
        assert "FAIL" in capsys.readouterr().out

    def test_generated_file_as_input(self, tmp_path):
        path = tmp_path / "cat.json"
        main(["generate", "--builtin", "vect:2,1", "--out", str(path)])

        assert main(["check", "--input", str(path), "--levels", "2", "--checks", "identities"]) == 0

    def test_missing_input_file(self, tmp_path):
        assert main(["check", "--input", str(tmp_path / "absent.json"), "--checks", "identities"]) == 2

    def test_invalid_levels(self):
        assert main(["check", "--builtin", "vect:2,1", "--levels", "a,b"]) == 2

    def test_unknown_check(self):
        assert main(["check", "--builtin", "vect:2,1", "--checks", "4segal"]) == 2

    def test_truncation_error(self):
        # 每軸截斷 1 不足以檢查 2-Segal
        code = main(["check", "--builtin", "vect:2,1", "--construction", "s2", "--levels", "1,1",
                     "--checks", "2segal:all"])

        assert code == 3


class TestConstruct:

    def test_counts_table(self, capsys):
        assert main(["construct", "--builtin", "vect:2,2,nodup", "--levels", "2"]) == 0

        out = capsys.readouterr().out
        assert "level" in out
        assert "18" in out


class TestK0:

    def test_prints_invariants(self, capsys):
        assert main(["k0", "--builtin", "vect:2,2"]) == 0

        summary = json.loads(capsys.readouterr().out)
        assert summary['rank'] == 1
        assert summary['torsion'] == []


class TestDiff:

    def test_identical_runs(self, tmp_path, capsys):
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for p in paths:
            main(["check", "--builtin", "zeros:1", "--levels", "2", "--checks", "identities", "--out", str(p)])

        assert main(["diff", str(paths[0]), str(paths[1])]) == 0

    def test_unreadable_report(self, tmp_path):
        assert main(["diff", str(tmp_path / "a.json"), str(tmp_path / "b.json")]) == 2


class TestConfig:

    def test_prints_status(self, capsys):
        assert main(["config"]) == 0

        lines = capsys.readouterr().out.splitlines()
        assert f"tie-break: {settings.DEFAULT_TIE_BREAK}" in lines
        assert "fixture_dir_exists: ok" in lines

    def test_invalid_setting(self, monkeypatch):
        monkeypatch.setattr(settings, 'DEFAULT_TIE_BREAK', 'middle')

        assert main(["config"]) == 2


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
