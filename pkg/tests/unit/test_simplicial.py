"""
測試截斷單純集合與 Segal / 2-Segal 檢查
"""
import pytest

from src.services.negative_control import load_fixture, verify_fixture
from src.services.s_construction import s_simplicial
from src.services.sigma_service import s_construction_sigma
from src.services.simplicial_checks import (
    edgewise_subdivision, nerve, pentagon_audit, polygon_triangulations, segal_check, standard_simplex,
    two_segal_check, validate_simplicial, verify_witness,
)
from src.utils.exceptions import TruncationError, ValidationError
from src.utils.types import TwoSegalFamily


class TestStandardSimplex:

    @pytest.mark.parametrize('n', [0, 1, 2, 3])
    def test_interval_counts(self, n):
        # 單調映射 [n] -> [1] 共 n+2 個
        assert standard_simplex(1, 3).count(n) == n + 2

    def test_identities_hold(self):
        report = validate_simplicial(standard_simplex(2, 4))

        assert report.passed
        assert all(v.checked > 0 for v in report.verdicts)

    def test_simplex_is_segal(self):
        assert segal_check(standard_simplex(2, 4)).passed

    def test_negative_arguments(self):
        with pytest.raises(ValidationError):
            standard_simplex(-1, 2)


class TestNerve:

    def test_low_levels(self, vect21):
        N = nerve(vect21.base, 3)

        assert N.count(0) == 3
        assert N.count(1) == 10
        assert validate_simplicial(N).passed

    def test_nerve_is_segal_and_2segal(self, vect21):
        N = nerve(vect21.base, 4)

        assert segal_check(N).passed
        assert two_segal_check(N).passed
        assert pentagon_audit(N).passed

    @pytest.mark.parametrize('family', [TwoSegalFamily.LOWER, TwoSegalFamily.UPPER])
    def test_families(self, vect21, family):
        report = two_segal_check(nerve(vect21.base, 3), family=family)

        assert report.condition == f"2segal:{family.value}"
        assert report.passed


class TestSegalConditions:

    def test_s_construction_is_not_segal(self, vect21):
        S = s_simplicial(vect21, 3)

        report = segal_check(S)

        assert not report.passed
        assert report.witnesses

    def test_two_segal_needs_level_three(self, vect21):
        with pytest.raises(ValidationError):
            two_segal_check(nerve(vect21.base, 3), N=2)

    def test_two_segal_beyond_truncation(self, vect21):
        with pytest.raises(TruncationError):
            two_segal_check(nerve(vect21.base, 3), N=4)

    def test_identity_witness_reverifies(self):
        X = standard_simplex(1, 2)
        # 人為弄亂 d_0 的表，使 d_0 d_1 = d_0 d_0 失效
        broken = dict(X.faces)
        table = list(broken[(2, 0)])
        table[0], table[-1] = table[-1], table[0]
        broken[(2, 0)] = tuple(table)
        Y = type(X)(bound=X.bound, cells=X.cells, faces=broken, degeneracies=X.degeneracies, name="broken")

        report = validate_simplicial(Y)

        assert not report.passed
        identity_witnesses = [w for w in report.witnesses if w['kind'] == 'identity']
        assert identity_witnesses
        assert verify_witness(Y, identity_witnesses[0])


class TestTwoSegalFamilies:
    """截斷於 3 時全部對角線恰為下族與上族的聯集：all 通過當且僅當 lower 與 upper 都通過"""

    @staticmethod
    def family_outcomes(X):
        return {family: two_segal_check(X, family=family).passed for family in TwoSegalFamily}

    def test_s_construction_passes_every_family(self, vect22_nodup):
        outcomes = self.family_outcomes(s_simplicial(vect22_nodup, 3))

        assert outcomes[TwoSegalFamily.ALL] == (outcomes[TwoSegalFamily.LOWER] and outcomes[TwoSegalFamily.UPPER])
        assert all(outcomes.values())

    def test_negative_control_fails_all_through_upper(self):
        doc = load_fixture()
        X, _ = verify_fixture(doc)

        outcomes = self.family_outcomes(s_construction_sigma(X, int(doc['levels'])))

        assert outcomes[TwoSegalFamily.ALL] == (outcomes[TwoSegalFamily.LOWER] and outcomes[TwoSegalFamily.UPPER])
        assert outcomes == {TwoSegalFamily.ALL: False, TwoSegalFamily.LOWER: True, TwoSegalFamily.UPPER: False}


class TestTriangulations:

    @pytest.mark.parametrize('size,expected', [(3, 1), (4, 2), (5, 5), (6, 14)])
    def test_catalan_counts(self, size, expected):
        assert len(polygon_triangulations(range(size))) == expected

    def test_triangles_per_triangulation(self):
        for triangles in polygon_triangulations(range(5)):
            assert len(triangles) == 3


class TestEdgewiseSubdivision:

    def test_bound_and_levels(self):
        X = standard_simplex(1, 5)

        sd = edgewise_subdivision(X)

        assert sd.bound == 2
        assert sd.count(0) == X.count(1)
        assert sd.count(2) == X.count(5)

    def test_subdivided_nerve_is_segal(self, vect21):
        sd = edgewise_subdivision(nerve(vect21.base, 5))

        assert validate_simplicial(sd).passed
        assert segal_check(sd).passed

    def test_requires_level_one(self):
        with pytest.raises(TruncationError):
            edgewise_subdivision(standard_simplex(1, 0))


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
