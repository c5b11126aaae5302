"""
測試 S 建構：網格列舉、單純結構、第 0 列投影與低維度辨識
"""
import pytest

from src.services.groupoids import check_groupoid_equivalence
from src.services.s_construction import (
    complete_seq_to_grid, enumeration_cross_check, exact_sequences, low_degree_identifications, render_grid,
    row0_projection, s_degeneracy, s_disc, s_face, s_simplicial, validate_grid,
)
from src.services.seq_service import seq_disc
from src.services.simplicial_checks import two_segal_check, validate_simplicial
from src.utils.types import TieBreak


class TestGridEnumeration:

    def test_low_counts_without_duplicate_zero(self, vect22_nodup):
        assert len(s_disc(vect22_nodup, 0)) == 1
        assert len(s_disc(vect22_nodup, 1)) == 3
        # 短正合序列 0 -> A -> B -> C -> 0，dim B <= 2
        assert len(s_disc(vect22_nodup, 2)) == 18

    def test_s2_matches_exact_sequences(self, vect22_nodup):
        assert len(s_disc(vect22_nodup, 2)) == len(exact_sequences(vect22_nodup))

    def test_duplicate_zero_on_diagonal(self, vect21):
        # 對角線的每個位置都可以是 0 或 0'
        assert len(s_disc(vect21, 0)) == 2
        assert len(s_disc(vect21, 1)) == 2 * 2 * 3

    def test_cells_are_valid_grids(self, vect21):
        for g in s_disc(vect21, 2):
            assert validate_grid(vect21, g) == []

    def test_render_grid(self, vect21):
        g = s_disc(vect21, 1)[0]

        assert render_grid(vect21, g)


class TestSimplicialStructure:

    def test_identities(self, vect21):
        assert validate_simplicial(s_simplicial(vect21, 3)).passed

    def test_two_segal(self, vect21):
        assert two_segal_check(s_simplicial(vect21, 3)).passed

    def test_face_of_degeneracy(self, vect21):
        for g in s_disc(vect21, 2):
            for i in range(3):
                assert s_face(vect21, s_degeneracy(vect21, g, i), i) == g
                assert s_face(vect21, s_degeneracy(vect21, g, i), i + 1) == g


class TestRow0:

    @pytest.mark.parametrize('k', [0, 1, 2, 3])
    def test_projection_is_equivalence(self, vect21, k):
        assert check_groupoid_equivalence(row0_projection(vect21, k)).equivalent

    @pytest.mark.parametrize('tie_break', [TieBreak.LEAST, TieBreak.GREATEST])
    def test_completion_restores_chain(self, vect22_nodup, tie_break):
        for c in seq_disc(vect22_nodup, 2):
            g = complete_seq_to_grid(vect22_nodup, c, tie_break)

            assert g.row0() == c
            assert g in set(s_disc(vect22_nodup, 2))

    def test_enumeration_cross_check(self, vect22_nodup):
        result = enumeration_cross_check(vect22_nodup, 2)

        assert result['passed']
        assert result['direct_cells'] == 18


class TestLowDegree:

    @pytest.mark.parametrize('fixture', ['vect21', 'pointed3', 'zero1'])
    def test_identifications_hold(self, fixture, request):
        E = request.getfixturevalue(fixture)

        report = low_degree_identifications(E)

        assert report.passed
        assert set(report.equivalences) == {'S0=Z', 'S1=core', 'S2=ExSeq', 'S3=BiCartSq'}
        assert report.counts['S0'] == len(E.zeros)


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
