"""
Integration Tests - 端對端驗收
在內建範疇上執行完整的建構與檢查（較慢，以 slow 標記）
"""
from itertools import product

import pytest

from src.models.models import JobSpec
from src.services.builtin_categories import builtin_pointed_sets, builtin_vect, builtin_zeros
from src.services.groupoids import check_groupoid_equivalence
from src.services.iterated import functor_exact_category, s_iterated, s_iterated_set
from src.services.job_runner import report_diff, run, write_report
from src.services.ktheory import k0, k0_report
from src.services.negative_control import load_fixture, verify_fixture
from src.services.s_construction import low_degree_identifications, row0_projection, s_disc, s_simplicial
from src.services.seq_service import seq_nonsimpliciality_witness, verify_seq_witness
from src.services.sigma_service import (
    exact_nerve, iterated_comparison, nerve_comparison, product_iso_check, s_construction_sigma,
)
from src.services.simplicial_checks import (
    edgewise_subdivision, multisimplicial_axis_check, pentagon_audit, segal_check, two_segal_check,
    validate_multisimplicial, validate_simplicial, verify_witness,
)
from src.utils.types import CheckName, Construction, TieBreak, TwoSegalFamily


pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def s_vect22():
    return s_simplicial(builtin_vect(2, 2, duplicate_zero=False), 4)


class TestSConstruction:

    def test_simplicial_identities(self, s_vect22):
        assert validate_simplicial(s_vect22).passed
        assert validate_simplicial(s_simplicial(builtin_pointed_sets(3), 3)).passed

    @pytest.mark.parametrize('E', [builtin_vect(2, 2), builtin_pointed_sets(3)], ids=['vect', 'pointed'])
    def test_row0_equivalence(self, E):
        for k in range(4):
            report = check_groupoid_equivalence(row0_projection(E, k))
            assert report.equivalent, f"row0 fails at level {k}"

    def test_low_degree_identifications(self):
        assert low_degree_identifications(builtin_vect(2, 2)).passed

    def test_two_segal_and_pentagon(self, s_vect22):
        assert two_segal_check(s_vect22, family=TwoSegalFamily.ALL).passed
        assert pentagon_audit(s_vect22).passed

    def test_edgewise_subdivision_is_segal(self):
        # esd of level bound 4 only reaches level 1
        esd = edgewise_subdivision(s_simplicial(builtin_vect(2, 2, duplicate_zero=False), 5))

        assert esd.bound == 2
        assert segal_check(esd).passed


class TestSeq:

    @pytest.mark.parametrize('tie_break', [TieBreak.LEAST, TieBreak.GREATEST])
    def test_witness_or_certificate(self, tie_break):
        E = builtin_vect(2, 3)

        witness = seq_nonsimpliciality_witness(E, tie_break)

        assert verify_seq_witness(E, witness)


class TestSigma:

    def test_sigma_s_is_two_segal(self):
        S = s_construction_sigma(exact_nerve(builtin_vect(2, 1), 4), 3)

        assert two_segal_check(S, family=TwoSegalFamily.ALL).passed

    def test_nerve_comparison(self):
        report = nerve_comparison(builtin_vect(2, 1), 3)

        assert report.passed
        assert len(report.verdicts) == 4

    def test_product_templates(self):
        tuples = [
            levels
            for arity in (1, 2, 3)
            for levels in product(range(4), repeat=arity)
            if sum(k + 1 for k in levels) <= 6
        ]
        for levels in tuples:
            assert product_iso_check(levels).passed, f"product iso fails for {levels}"


class TestNegativeControl:

    def test_lower_but_not_upper(self):
        doc = load_fixture()

        X, report = verify_fixture(doc)

        assert report.reports['stable_semi'].passed
        full = report.reports['stable_full']
        assert not full.passed and full.witnesses
        assert report.reports['two_segal_lower'].passed
        upper = report.reports['two_segal_upper']
        assert not upper.passed
        S = s_construction_sigma(X, int(doc['levels']))
        assert verify_witness(S, upper.witnesses[0])


class TestIterated:

    @pytest.fixture(scope="class")
    def vect21(self):
        return builtin_vect(2, 1)

    def test_bisimplicial_identities(self, vect21):
        assert validate_multisimplicial(s_iterated_set(vect21, (2, 2))).passed

    def test_cells_match_functor_category(self, vect21):
        for k, l in product(range(3), repeat=2):
            F = functor_exact_category(vect21, k)
            assert len(s_iterated(vect21, (k, l))) == len(s_disc(F, l)), f"mismatch at {(k, l)}"

    def test_cells_match_sigma_side(self, vect21):
        for levels in [(1, 1), (2, 1), (1, 2)]:
            assert iterated_comparison(vect21, levels).passed

    @pytest.mark.parametrize('levels,axis', [((3, 1), 0), ((1, 3), 1)])
    def test_axis_two_segal_experiment(self, vect21, levels, axis):
        X = s_iterated_set(vect21, levels)

        report = multisimplicial_axis_check(X, axis, "2segal")
        lower = multisimplicial_axis_check(X, axis, "2segal", TwoSegalFamily.LOWER)
        upper = multisimplicial_axis_check(X, axis, "2segal", TwoSegalFamily.UPPER)

        assert report.condition == "2segal:all"
        assert report.verdicts
        assert report.passed
        assert report.passed == (lower.passed and upper.passed)


class TestK0:

    def test_values(self):
        assert k0(builtin_vect(2, 3)).rank == 1
        assert k0(builtin_vect(2, 3)).torsion == ()
        assert k0(builtin_pointed_sets(3)).rank == 1
        assert k0(builtin_zeros(1)).is_trivial

    def test_certificates(self):
        for E in (builtin_vect(2, 3), builtin_pointed_sets(3), builtin_zeros(1)):
            assert k0_report(E)['certificate_verified']


class TestDeterminism:

    @pytest.mark.parametrize('spec', [
        JobSpec(builtin="vect:2,2", checks=[CheckName.IDENTITIES, CheckName.TWO_SEGAL_ALL], levels=[3]),
        JobSpec(builtin="vect:2,2", construction=Construction.SEQ, checks=[CheckName.IDENTITIES], levels=[3]),
        JobSpec(builtin="negative-control", construction=Construction.SIGMA_S,
                checks=[CheckName.TWO_SEGAL_LOWER, CheckName.STABLE_SEMI], levels=[3]),
        JobSpec(builtin="vect:2,3", checks=[CheckName.K0], levels=[2]),
    ], ids=['s', 'seq', 'negative-control', 'k0'])
    def test_reruns_are_identical(self, spec, tmp_path):
        first = write_report(run(spec), tmp_path / "a.json")
        second = write_report(run(spec), tmp_path / "b.json")

        assert report_diff(first, second) == []
