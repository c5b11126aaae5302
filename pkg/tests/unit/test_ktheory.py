"""
測試 K_0：Smith 標準形與由 S_2 讀出的呈現
"""
import unittest

import numpy as np
import pytest

from src.domain.k0 import AbelianGroupInvariants, K0Presentation
from src.services.builtin_categories import builtin_pointed_sets, builtin_vect, builtin_zeros
from src.services.ktheory import cokernel_invariants, k0, k0_presentation, k0_report, smith_normal_form
from src.utils.exceptions import ValidationError


class TestAbelianGroupInvariants(unittest.TestCase):
    """測試不變量的驗證與顯示"""

    def test_trivial_group(self):
        G = AbelianGroupInvariants(rank=0)

        self.assertTrue(G.is_trivial)
        self.assertEqual(str(G), "0")

    def test_display(self):
        G = AbelianGroupInvariants(rank=1, torsion=(2, 6))

        self.assertEqual(str(G), "Z^1 + Z/2 + Z/6")

    def test_divisibility_chain_required(self):
        with self.assertRaises(ValidationError):
            AbelianGroupInvariants(rank=0, torsion=(2, 3))

    def test_unit_torsion_rejected(self):
        with self.assertRaises(ValidationError):
            AbelianGroupInvariants(rank=0, torsion=(1,))

    def test_ragged_relations_rejected(self):
        with self.assertRaises(ValidationError):
            K0Presentation(generators=("a", "b"), representatives=(0, 1), relations=((1, 0), (1,)))


class TestSmithNormalForm:

    def test_diagonal_example(self):
        M = [[2, 0], [0, 3]]

        snf = smith_normal_form(M)

        assert snf.diagonal == (1, 6)
        assert snf.verify(np.array(M, dtype=object))

    def test_identity(self):
        snf = smith_normal_form([[1, 0, 0], [0, 1, 0], [0, 0, 1]])

        assert snf.diagonal == (1, 1, 1)

    def test_zero_matrix(self):
        assert smith_normal_form([[0, 0], [0, 0]]).diagonal == ()

    def test_no_rows(self):
        G = cokernel_invariants([], cols=3)

        assert G == AbelianGroupInvariants(rank=3)

    def test_certificate_for_dense_matrix(self):
        M = [[4, 6, 2], [2, 8, 10], [6, 4, -2]]

        snf = smith_normal_form(M)

        assert snf.verify(np.array(M, dtype=object))
        assert all(b % a == 0 for a, b in zip(snf.diagonal, snf.diagonal[1:]))
        assert snf.to_dict()['diagonal'] == list(snf.diagonal)

    @pytest.mark.parametrize('M,expected', [
        ([[2, 4]], AbelianGroupInvariants(rank=1, torsion=(2,))),
        ([[1, -1]], AbelianGroupInvariants(rank=1)),
        ([[6], [4]], AbelianGroupInvariants(rank=0, torsion=(2,))),
    ])
    def test_cokernels(self, M, expected):
        assert cokernel_invariants(M) == expected


class TestK0:

    def test_vector_spaces_have_rank_one(self):
        # [V] = dim V · [F_q]
        assert k0(builtin_vect(2, 3)) == AbelianGroupInvariants(rank=1)

    def test_pointed_sets_have_rank_one(self):
        assert k0(builtin_pointed_sets(3)) == AbelianGroupInvariants(rank=1)

    def test_zero_category_is_trivial(self):
        assert k0(builtin_zeros(2)).is_trivial

    def test_duplicate_zero_does_not_change_k0(self):
        assert k0(builtin_vect(2, 2)) == k0(builtin_vect(2, 2, duplicate_zero=False))

    def test_duplicate_relations_do_not_change_cokernel(self, vect21):
        kept = k0_presentation(vect21, keep_duplicates=True)
        deduped = k0_presentation(vect21)

        assert len(kept.relations) >= len(deduped.relations)
        assert cokernel_invariants(kept.matrix(), len(kept.generators)) == \
            cokernel_invariants(deduped.matrix(), len(deduped.generators))

    def test_generators_are_iso_classes(self, vect21):
        presentation = k0_presentation(vect21)

        assert len(presentation.generators) == 2
        assert presentation.representatives == (0, 1)

    def test_report(self, vect21):
        report = k0_report(vect21)

        assert report['rank'] == 1
        assert report['torsion'] == []
        assert report['certificate_verified']


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
