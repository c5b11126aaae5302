"""
測試有限範疇、內建結構與標準補全
"""
import pytest

from src.domain.category import Square
from src.services.builtin_categories import builtin_vect, builtin_zeros, vect_matrix, vect_morphism
from src.services.fincat_service import core, is_groupoid, iso_classes, validate_category, validate_structure
from src.services.universal import (
    comparison_isomorphisms, complete_cospan_to_pullback, complete_span_to_pushout, cospan_completions,
    derived_bicartesian, is_pullback, is_pushout, span_completions,
)
from src.utils.exceptions import ConfigurationError, RejectedSquareError
from src.utils.types import TieBreak


class TestBuiltins:
    """內建範疇的大小與公理"""

    def test_vect21_has_ten_morphisms(self, vect21):
        # 物件 0, 1, 0'；零物件之間 4 個，0/0' <-> 1 各 2 個，End(1) 2 個
        assert len(vect21.base.objects) == 3
        assert len(vect21.base.morphisms) == 10

    def test_vect_nodup_has_one_zero(self, vect22_nodup):
        assert vect22_nodup.name == "vect(2,2)[nodup]"
        assert len(vect22_nodup.zeros) == 1
        assert len(vect22_nodup.base.hom(1, 2)) == 4

    def test_duplicate_zero_is_labeled(self, vect22):
        assert vect22.base.label(3) == "0'"
        assert len(vect22.zeros) == 2

    @pytest.mark.parametrize('fixture', ['vect21', 'vect22', 'pointed3', 'zero1'])
    def test_builtins_satisfy_axioms(self, fixture, request):
        E = request.getfixturevalue(fixture)

        assert validate_category(E.base).valid
        assert validate_structure(E).valid

    def test_identity_comes_first_in_hom(self, vect22):
        C = vect22.base
        for a in C.objects:
            assert C.hom(a, a)[0] == C.identity[a]

    def test_unsupported_field_rejected(self):
        with pytest.raises(ConfigurationError):
            builtin_vect(6, 1)

    def test_dimension_out_of_range(self):
        with pytest.raises(ConfigurationError):
            builtin_vect(2, 9)

    def test_zero_count_out_of_range(self):
        with pytest.raises(ConfigurationError):
            builtin_zeros(0)

    def test_vect_morphism_lookup(self, vect22):
        m = vect_morphism(vect22, 1, 2, [[1], [0]])

        assert vect_matrix(vect22, m) == ((1,), (0,))


class TestIsoClasses:

    def test_zeros_form_one_class(self, vect22):
        classes = iso_classes(vect22.base)

        assert len(classes) == 3
        assert classes.class_of[0] == classes.class_of[3]

    def test_zero_category_is_a_groupoid(self):
        C = builtin_zeros(3).base

        assert is_groupoid(C)
        assert len(iso_classes(C)) == 1

    def test_core_keeps_isomorphisms_only(self, vect21):
        K = core(vect21.base)

        assert is_groupoid(K)
        # 零物件間的 4 個同構與 GL_1(F_2)
        assert len(K.morphisms) == 5


class TestCompletions:
    """span / cospan 的標準補全與 tie-break"""

    def test_unique_pushout(self, vect21):
        C = vect21.base
        top = C.hom(0, 1)[0]
        left = C.identity[0]

        completions = span_completions(vect21, top, left)

        assert len(completions) == 1
        assert complete_span_to_pushout(vect21, top, left, TieBreak.LEAST) == \
            complete_span_to_pushout(vect21, top, left, TieBreak.GREATEST)

    def test_tie_break_picks_extremes(self, vect22):
        C = vect22.base
        top = C.hom(0, 2)[0]
        left = C.identity[0]

        completions = span_completions(vect22, top, left)
        least = complete_span_to_pushout(vect22, top, left, TieBreak.LEAST)
        greatest = complete_span_to_pushout(vect22, top, left, TieBreak.GREATEST)

        # 右邊可以是 GL_2(F_2) 中任一元素
        assert len(completions) == 6
        assert least == completions[0]
        assert greatest == completions[-1]
        assert least != greatest
        assert comparison_isomorphisms(C, least, greatest)

    def test_completions_commute(self, vect22):
        C = vect22.base
        top = vect_morphism(vect22, 1, 2, [[1], [0]])
        left = C.identity[1]

        for square in span_completions(vect22, top, left):
            assert square.commutes(C)
            assert square.br == 2

    def test_pullback_of_cospan(self, vect22):
        C = vect22.base
        right = vect_morphism(vect22, 2, 1, [[0, 1]])
        bottom = C.identity[1]

        square = complete_cospan_to_pullback(vect22, right, bottom)

        assert square in cospan_completions(vect22, right, bottom)
        assert square.tl == 2

    def test_rejected_span(self, vect21):
        C = vect21.base
        not_mono = C.hom(1, 0)[0]

        with pytest.raises(RejectedSquareError):
            complete_span_to_pushout(vect21, not_mono, C.identity[1])

    def test_rejected_cospan(self, vect21):
        C = vect21.base
        not_epi = C.hom(0, 1)[0]

        with pytest.raises(RejectedSquareError):
            complete_cospan_to_pullback(vect21, not_epi, C.identity[1])


class TestRankRule:
    """秩規則與泛性質搜尋的一致性"""

    @staticmethod
    def admissible_squares(E):
        C = E.base
        for top in sorted(E.monos):
            for left in sorted(E.epis):
                if C.source[left] != C.source[top]:
                    continue
                for right in C.out_of(C.target[top]):
                    if right not in E.epis:
                        continue
                    for bottom in C.hom(C.target[left], C.target[right]):
                        if bottom not in E.monos:
                            continue
                        square = Square.from_morphisms(C, top, left, right, bottom)
                        if square.commutes(C):
                            yield square

    def test_rank_rule_matches_universal_property(self, vect22):
        C = vect22.base
        squares = list(self.admissible_squares(vect22))

        disagreements = [
            square.key() for square in squares
            if vect22.oracle.is_bicartesian(square) != (is_pushout(C, square) and is_pullback(C, square))
        ]

        assert squares
        assert disagreements == []

    def test_derived_mode_agrees(self, vect21):
        C = vect21.base

        for square in self.admissible_squares(vect21):
            assert derived_bicartesian(C, square) == vect21.oracle.is_bicartesian(square)


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
