"""
tests/test_conjugation.py — Tests for conjugation.py
a·x_β(v)·a⁻¹ rewritten as root letters, checked by evaluation.
"""
import os
import sys
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from models.word import RootLetter, Word
from modules.conjugation import commutes, conjugate_letter, conjugate_word
from modules.errors import RejectedInput
from modules.relgrp import load_group
from modules.rings import LaurentRing


@pytest.fixture
def ring():
    return LaurentRing("Q", ["X"], laurent=["X"])


def _conjugated(group, a, w):
    return group.evaluate(a) * group.evaluate(w) * group.evaluate(a.inverse())


class TestCommutes:

    def test_orthogonal_and_opposite(self):
        rd = load_group("A3").rd
        assert commutes(rd, (1, 0, 0), (0, 0, 1))
        assert not commutes(rd, (1, 0, 0), (0, 1, 0))
        assert not commutes(rd, (1, 0, 0), (-1, 0, 0))


class TestConjugateLetter:

    def test_type_a_transvections(self, ring):
        group = load_group("A2", rep="natural")
        a = Word.parse("x[1,0](X) * x[0,1](2)", ring)
        letter = RootLetter((-1, 0), ring.parse("X + 1"))
        out = conjugate_letter(group, a, letter)
        assert group.evaluate(out) == _conjugated(group, a, Word(ring, (letter,)))

    def test_g2_commutator_expansion(self, ring):
        group = load_group("G2")
        a = Word.parse("x[1,0](X)", ring)
        letter = RootLetter((0, 1), ring.one)
        out = conjugate_letter(group, a, letter)
        assert len(out) > 1
        assert group.evaluate(out) == _conjugated(group, a, Word(ring, (letter,)))

    def test_b2_opposite_root(self, ring):
        group = load_group("B2")
        a = Word.parse("x[1,0](1)", ring)
        letter = RootLetter((-1, 0), ring.gen("X"))
        out = conjugate_letter(group, a, letter)
        assert group.evaluate(out) == _conjugated(group, a, Word(ring, (letter,)))

    def test_commuting_letter_is_unchanged(self, ring):
        group = load_group("A3")
        a = Word.parse("x[1,0,0](X)", ring)
        letter = RootLetter((0, 0, 1), ring.gen("X"))
        assert conjugate_letter(group, a, letter).letters == (letter,)

    def test_torus_letter_rejected(self, ring):
        group = load_group("B2")
        a = Word.parse("x[1,0](1)", ring)
        torus = Word.parse("chi[1,0](X)", ring).letters[0]
        with pytest.raises(RejectedInput):
            conjugate_letter(group, a, torus)


class TestConjugateWord:

    def test_word_by_word(self, ring):
        group = load_group("A3", rep="natural")
        a = Word.parse("x[1,1,0](X^-1) * x[0,0,1](3)", ring)
        w = Word.parse("x[0,1,0](X) * x[-1,0,0](2)", ring)
        assert group.evaluate(conjugate_word(group, a, w)) == _conjugated(group, a, w)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
