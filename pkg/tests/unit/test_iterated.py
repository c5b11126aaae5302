"""
測試多重 S 建構
"""
import pytest

from src.services.iterated import functor_exact_category, multi_face, s_iterated, s_iterated_set
from src.services.s_construction import s_disc
from src.services.simplicial_checks import multisimplicial_axis_check, multisimplicial_slice, validate_multisimplicial
from src.utils.exceptions import TruncationError, ValidationError
from src.utils.types import MultiExactness


class TestMultiGrids:

    def test_unary_matches_s(self, vect21):
        for k in range(3):
            assert len(s_iterated(vect21, (k,))) == len(s_disc(vect21, k))

    def test_degree_zero_is_zero_objects(self, vect21):
        assert len(s_iterated(vect21, (0, 0))) == len(vect21.zeros)

    def test_joint_agrees_with_separate_on_one_axis(self, vect21):
        separate = s_iterated(vect21, (2,), MultiExactness.SEPARATE)
        joint = s_iterated(vect21, (2,), MultiExactness.JOINT)

        assert len(joint) == len(separate)

    @pytest.mark.parametrize('levels', [(), (1, 1, 1), (4, 0), (-1,)])
    def test_out_of_scale_levels(self, vect21, levels):
        with pytest.raises(ValidationError):
            s_iterated(vect21, levels)


class TestMultisimplicialSet:

    @pytest.fixture(scope="class")
    def bisimplicial(self, vect21):
        return s_iterated_set(vect21, (1, 1))

    def test_identities_and_commutation(self, bisimplicial):
        report = validate_multisimplicial(bisimplicial)

        assert report.passed
        assert any(v.detail == "axes 0,1 commute" for v in report.verdicts)

    def test_faces_lower_one_axis(self, vect21, bisimplicial):
        cell = bisimplicial.cells[(1, 1)][0]

        face = multi_face(vect21, cell, 0, 0)

        assert face.levels == (0, 1)

    def test_slice_bound(self, bisimplicial):
        sliced = multisimplicial_slice(bisimplicial, 1, (1, 0))

        assert sliced.bound == 1
        assert sliced.count(0) == bisimplicial.count((1, 0))

    def test_two_segal_needs_axis_level_three(self, bisimplicial):
        with pytest.raises(TruncationError):
            multisimplicial_axis_check(bisimplicial, 0, "2segal")

    def test_segal_axis_check_runs(self, bisimplicial):
        report = multisimplicial_axis_check(bisimplicial, 1, "segal")

        assert report.condition == "segal"
        assert report.checked_range == (2, 1)

    def test_bad_axis_or_condition(self, bisimplicial):
        with pytest.raises(ValidationError):
            multisimplicial_axis_check(bisimplicial, 2, "segal")
        with pytest.raises(ValidationError):
            multisimplicial_axis_check(bisimplicial, 0, "3segal")


class TestFunctorCategory:

    def test_objects_are_grids(self, vect21):
        F = functor_exact_category(vect21, 1)

        assert len(F.base.objects) == len(s_disc(vect21, 1))
        # Ar[1] 的三個位置都取 0 或 0'
        assert len(F.zeros) == 2 ** 3


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
