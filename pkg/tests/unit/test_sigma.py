"""
測試 Σ-集合：路徑樣板、映射空間、正合神經與 Σ 端的 S 建構
"""
import pytest

from src.services import sigma_service
from src.services.s_construction import s_degeneracy, s_disc
from src.services.sigma_checks import (
    check_pointedness, check_stability, exponential_stability_experiment, sigma_slice, validate_sigma_set,
)
from src.services.sigma_service import (
    exact_nerve, mapping_space, nerve_comparison, p_delta, p_iterated_delta, path_space, product_iso_check,
    s_construction_sigma, sigma_representable,
)
from src.services.simplicial_checks import standard_simplex, validate_simplicial
from src.utils.exceptions import TruncationError, ValidationError
from src.utils.types import StabilityMode


class TestTemplates:

    def test_path_space_of_simplex(self):
        P = p_delta(3)

        assert P.bound == 4
        # (PΔ[3])_{0,1} = Δ[3]_2：單調映射 [2] -> [3]
        assert P.count((0, 1)) == 20
        assert len(P.aug_cells) == 4

    def test_path_space_shifts_levels(self):
        Y = standard_simplex(1, 3)

        P = path_space(Y)

        assert P.count((0, 0)) == Y.count(1)
        assert P.count((1, 1)) == Y.count(3)
        assert P.name == "P(Delta[1])"

    @pytest.mark.parametrize('k', [0, 1, 2])
    def test_templates_are_sigma_sets(self, k):
        assert validate_sigma_set(p_delta(k)).passed

    def test_templates_are_presented(self):
        P = p_delta(2)

        assert P.generators
        assert all(P.count(index) > c for index, c in P.generators)

    def test_invalid_templates(self):
        with pytest.raises(ValidationError):
            p_delta(-1)
        with pytest.raises(ValidationError):
            p_delta(2, bound=2)
        with pytest.raises(ValidationError):
            p_iterated_delta((1, 1, 1, 1))

    def test_representable_has_no_augmentation(self):
        R = sigma_representable(1, 1, 2)

        assert R.count((0, 0)) == 4
        assert R.aug_cells == ()

    @pytest.mark.parametrize('levels', [(1,), (1, 1), (0, 2)])
    def test_product_isomorphism(self, levels):
        report = product_iso_check(levels)

        assert report.passed
        assert report.condition == "product-iso"


class TestExactNerve:

    @pytest.fixture(scope="class")
    def nex(self, vect21):
        return exact_nerve(vect21, 3)

    def test_counts(self, vect21, nex):
        assert nex.count((0, 0)) == len(vect21.base.objects)
        assert len(nex.aug_cells) == len(vect21.zeros)

    def test_sigma_identities(self, nex):
        assert validate_sigma_set(nex).passed

    def test_slices_are_simplicial(self, nex):
        assert validate_simplicial(sigma_slice(nex, 0, 1)).passed

    def test_pointed_and_stable(self, nex):
        assert check_pointedness(nex).passed
        assert check_stability(nex, StabilityMode.SEMI).passed
        assert check_stability(nex, StabilityMode.FULL).passed

    def test_stability_needs_degree_three(self, vect21):
        with pytest.raises(TruncationError):
            check_stability(exact_nerve(vect21, 2))

    def test_degree_must_be_positive(self, vect21):
        with pytest.raises(ValidationError):
            exact_nerve(vect21, 0)


class TestSigmaSConstruction:

    def test_maps_out_of_template_are_grids(self, vect21):
        X = exact_nerve(vect21, 2)

        assert len(mapping_space(p_delta(1, 2), X)) == len(s_disc(vect21, 1))

    def test_levels_match_waldhausen_side(self, vect21):
        S = s_construction_sigma(exact_nerve(vect21, 3), 2)

        assert [S.count(k) for k in range(3)] == [len(s_disc(vect21, k)) for k in range(3)]
        assert validate_simplicial(S).passed

    def test_needs_one_more_degree(self, vect21):
        with pytest.raises(TruncationError):
            s_construction_sigma(exact_nerve(vect21, 2), 2)

    def test_nerve_comparison(self, vect21):
        report = nerve_comparison(vect21, 2)

        assert report.passed
        assert [v.level for v in report.verdicts] == [0, 1, 2]

    def test_nerve_comparison_checks_degeneracies(self, vect21, monkeypatch):
        def shifted_degeneracy(E, g, i):
            return s_degeneracy(E, g, (i + 1) % (g.level + 1))

        monkeypatch.setattr(sigma_service, 's_degeneracy', shifted_degeneracy)

        report = nerve_comparison(vect21, 2)

        assert not report.passed
        assert all(w['kind'] == 'not_natural' and 'degeneracy' in w for w in report.witnesses)
        assert report.verdicts[0].passed
        assert not report.verdicts[1].passed


class TestExponential:

    def test_experiment_records_outcome(self, zero1):
        outcome = exponential_stability_experiment(zero1, 0)

        assert outcome['subject'] == zero1.name
        assert outcome['ell'] == 0
        assert isinstance(outcome['pointed'], bool)
        assert isinstance(outcome['stable'], bool)
        assert len(outcome['reports']) == 2


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
