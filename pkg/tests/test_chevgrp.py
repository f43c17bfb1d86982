"""
tests/test_chevgrp.py — Tests for chevgrp.py
Structure constants, representations and commutator constants.
"""
import os
import sys
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from models.word import Word
from modules.chevgrp import (
    build_chevalley_basis, check_jacobi, derive_commutator_constants,
    proportional, representation, unipotent_factorize, weyl_word,
)
from modules.errors import RejectedInput
from modules.matrices import Mat
from modules.rings import LaurentRing


@pytest.fixture
def ring():
    return LaurentRing("Q", ["X"], laurent=["X"])


class TestStructureConstants:

    @pytest.mark.parametrize("label", ["A2", "B2", "G2", "C3"])
    def test_jacobi(self, label):
        assert check_jacobi(build_chevalley_basis(label)) == []

    def test_antisymmetry(self):
        cb = build_chevalley_basis("B2")
        for (a, b), n in cb.structure_constants().items():
            assert cb.N(b, a) == -n

    def test_g2_largest_constant(self):
        assert build_chevalley_basis("G2").to_dict()["max_abs_N"] == 3


class TestCommutatorConstants:

    def test_a2(self):
        table = derive_commutator_constants(build_chevalley_basis("A2"), (1, 0), (0, 1))
        assert set(table) == {(1, 1)}
        assert abs(table[(1, 1)]) == 1

    def test_g2_short_long(self):
        table = derive_commutator_constants(build_chevalley_basis("G2"), (1, 0), (0, 1))
        assert set(table) == {(1, 1), (2, 1), (3, 1), (3, 2)}

    def test_proportional_rejected(self):
        assert proportional((1, 1), (-2, -2))
        assert not proportional((1, 0), (0, 1))
        with pytest.raises(RejectedInput):
            derive_commutator_constants(build_chevalley_basis("A2"), (1, 0), (-1, 0))


class TestRepresentations:

    def test_natural_sl2(self, ring):
        rep = representation("A1", "natural")
        assert rep.unipotent((1,), ring.gen("X")) == Mat.from_rows(ring, [["1", "X"], ["0", "1"]])
        assert rep.unipotent((-1,), ring.gen("X")) == Mat.from_rows(ring, [["1", "0"], ["X", "1"]])

    def test_weyl_element(self, ring):
        rep = representation("A1", "natural")
        n = rep.evaluate(weyl_word(rep.rd, 0, ring))
        assert n == Mat.from_rows(ring, [["0", "1"], ["-1", "0"]])

    def test_adjoint_torus(self, ring):
        rep = representation("A1")
        X = ring.gen("X")
        assert rep.torus((1,), X) == Mat.diagonal(ring, [X, ring.one, X.inverse()])

    def test_torus_needs_unit(self, ring):
        with pytest.raises(RejectedInput):
            representation("A1").torus((1,), ring.parse("1 + X"))

    def test_word_times_inverse(self, ring):
        rep = representation("B2")
        w = Word.parse("x[1,0](X) * x[0,1](2*X^-1) * x[-1,-2](3) * chi[1,1](X)", ring)
        assert (rep.evaluate(w) * rep.evaluate(w.inverse())).is_identity()

    def test_natural_only_for_type_a(self):
        with pytest.raises(RejectedInput):
            representation("B2", "natural")

    def test_unknown_representation(self):
        with pytest.raises(RejectedInput):
            representation("A2", "spin")


class TestUnipotentFactorize:

    def test_peels_in_root_order(self, ring):
        rep = representation("A2", "natural")
        M = rep.evaluate(Word.parse("x[1,0](X) * x[0,1](2)", ring))
        w = unipotent_factorize(rep, M, [(1, 0), (0, 1), (1, 1)])
        assert [l.root for l in w.letters] == [(1, 0), (0, 1)]
        assert rep.evaluate(w) == M

    def test_lower_matrix_rejected(self, ring):
        rep = representation("A2", "natural")
        M = rep.evaluate(Word.parse("x[-1,0](X)", ring))
        with pytest.raises(RejectedInput):
            unipotent_factorize(rep, M, [(1, 0), (0, 1), (1, 1)])


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
