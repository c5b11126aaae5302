"""
測試 fixture 存取與半穩定負控制
"""
import json
import os

import pytest

from src.parsers.category_parser import parse_category
from src.repositories.fixture_repository import FixtureRepository
from src.services.negative_control import (
    FIXTURE_NAME, candidate_squares, load_fixture, search_semi_stable_candidates, semi_stable_negative_control,
    verify_fixture,
)
from src.services.sigma_service import s_construction_sigma
from src.utils.exceptions import FixtureMissingError, ValidationError


@pytest.fixture(scope="module")
def fixture_doc():
    return load_fixture()


@pytest.fixture(scope="module")
def verified(fixture_doc):
    return verify_fixture(fixture_doc)


class TestFixtureRepository:

    def test_lists_bundled_fixture(self):
        repo = FixtureRepository()

        assert FIXTURE_NAME in repo.list_ids()
        assert repo.exists(FIXTURE_NAME)

    def test_cached_load(self):
        repo = FixtureRepository()

        first = repo.get(FIXTURE_NAME)

        assert repo.find_by_id(FIXTURE_NAME) is first

    def test_replaced_file_is_reread(self, tmp_path):
        path = tmp_path / "doc.json"
        path.write_text('{"v": 1}', encoding='utf-8')
        repo = FixtureRepository(tmp_path)
        assert repo.get("doc") == {'v': 1}

        path.write_text('{"v": 2}', encoding='utf-8')
        stat = path.stat()
        os.utime(path, (stat.st_atime, stat.st_mtime + 10))

        assert repo.get("doc") == {'v': 2}

    def test_missing_directory(self, tmp_path):
        repo = FixtureRepository(tmp_path / "nowhere")

        assert repo.list_ids() == []
        with pytest.raises(FixtureMissingError):
            repo.get(FIXTURE_NAME)

    def test_unreadable_file(self, tmp_path):
        (tmp_path / "broken.json").write_text("{not json", encoding='utf-8')

        with pytest.raises(FixtureMissingError):
            FixtureRepository(tmp_path).get("broken")

    def test_empty_id(self):
        with pytest.raises(ValidationError):
            FixtureRepository().find_by_id("")


class TestNegativeControl:

    def test_claims_hold(self, verified):
        _, report = verified

        assert report.mismatches == []
        assert report.outcomes == {
            'pointed': True,
            'stable_semi': True,
            'stable_full': False,
            'two_segal_lower': True,
            'two_segal_upper': False,
        }

    def test_s_construction_counts(self, fixture_doc, verified):
        X, _ = verified

        S = s_construction_sigma(X, int(fixture_doc['levels']))

        assert S.count(2) == 6
        assert S.count(3) == 10

    def test_upper_failure_has_witness(self, verified):
        _, report = verified

        upper = report.reports['two_segal_upper']
        assert upper.witnesses
        assert report.to_dict()['outcomes']['two_segal_upper'] is False

    def test_loader_returns_nerve(self, verified):
        X = semi_stable_negative_control()

        assert X.bound == verified[0].bound
        assert X.count((0, 0)) == 3

    def test_missing_fixture(self, tmp_path):
        with pytest.raises(FixtureMissingError):
            semi_stable_negative_control(FixtureRepository(tmp_path))

    def test_incomplete_fixture(self, tmp_path):
        (tmp_path / f"{FIXTURE_NAME}.json").write_text(json.dumps({"name": FIXTURE_NAME}), encoding='utf-8')

        with pytest.raises(FixtureMissingError):
            load_fixture(FixtureRepository(tmp_path))

    def test_false_claims_are_reported(self, tmp_path, fixture_doc):
        doc = dict(fixture_doc, claims=dict(fixture_doc['claims'], stable_full=True))
        (tmp_path / f"{FIXTURE_NAME}.json").write_text(json.dumps(doc), encoding='utf-8')

        with pytest.raises(FixtureMissingError):
            semi_stable_negative_control(FixtureRepository(tmp_path))


class TestSearch:

    def test_fixture_squares_are_candidates(self, fixture_doc):
        E = parse_category(fixture_doc['category'])

        assert E.designated <= set(candidate_squares(E))

    def test_zero_budget(self):
        assert search_semi_stable_candidates(seed=7, budget=0) == []

    def test_deterministic(self):
        first = search_semi_stable_candidates(seed=3, budget=5)
        second = search_semi_stable_candidates(seed=3, budget=5)

        assert first == second


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
