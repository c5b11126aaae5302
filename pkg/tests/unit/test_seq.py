"""
測試 Seq 建構與非單純性見證
"""
import pytest

from src.services.seq_service import (
    seq_degeneracy, seq_disc, seq_face, seq_nonsimpliciality_witness, seq_simplicial, verify_seq_witness,
)
from src.services.simplicial_checks import validate_simplicial
from src.utils.exceptions import ValidationError
from src.utils.types import TieBreak


class TestSeqCells:

    def test_level_counts(self, vect22):
        assert len(seq_disc(vect22, 0)) == 1
        assert len(seq_disc(vect22, 1)) == 4
        # 0 與 0' 各有 4 個單態射出去，1 有 1 + 3 個，2 有 |GL_2(F_2)| = 6 個
        assert len(seq_disc(vect22, 2)) == 18

    def test_negative_level(self, vect22):
        with pytest.raises(ValidationError):
            seq_disc(vect22, -1)

    def test_inner_face_composes_links(self, vect22):
        C = vect22.base
        chain = next(c for c in seq_disc(vect22, 3) if c.objects == (0, 1, 2))

        face = seq_face(vect22, chain, 2)

        assert face.objects == (0, 2)
        assert face.links == (C.compose(chain.links[1], chain.links[0]),)

    def test_zeroth_face_takes_quotients(self, vect22):
        chain = next(c for c in seq_disc(vect22, 2) if c.objects == (1, 2))

        face = seq_face(vect22, chain, 0, TieBreak.LEAST)

        assert face.level == 1
        assert face.objects == (1,)

    def test_degeneracy_then_face_is_identity(self, vect22):
        for chain in seq_disc(vect22, 2):
            for i in (1, 2):
                assert seq_face(vect22, seq_degeneracy(vect22, chain, i), i) == chain


class TestSeqSimpliciality:

    @pytest.mark.parametrize('tie_break', [TieBreak.LEAST, TieBreak.GREATEST])
    def test_duplicate_zero_breaks_identities(self, vect22, tie_break):
        # d_0 s_0 重新選擇零物件，0 與 0' 之中只能選到其一
        X = seq_simplicial(vect22, 3, tie_break)

        report = validate_simplicial(X)

        assert not report.passed
        assert any(w['identity'] == 'd0s0=id' for w in report.witnesses)

    @pytest.mark.parametrize('tie_break', [TieBreak.LEAST, TieBreak.GREATEST])
    def test_level_three_certificate(self, vect22, tie_break):
        # level 1 的格只有物件，兩條路徑得到同維度的同一個選定物件
        witness = seq_nonsimpliciality_witness(vect22, tie_break, max_level=3)

        assert not witness.found
        assert witness.certificate['levels'] == {'3': len(seq_disc(vect22, 3))}
        assert verify_seq_witness(vect22, witness)

    def test_witness_or_certificate_reverifies(self, vect22):
        witness = seq_nonsimpliciality_witness(vect22, TieBreak.GREATEST, max_level=4)

        assert verify_seq_witness(vect22, witness)
        data = witness.to_dict()
        assert data['identity'] == 'd0d1=d0d0'
        assert data['tie_break'] == 'greatest'
        if witness.found:
            assert witness.lhs != witness.rhs
            assert witness.iso is not None


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
