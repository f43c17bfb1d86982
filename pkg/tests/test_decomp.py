"""
tests/test_decomp.py — Tests for decomp.py
Dilation shrink, shift, Suslin factorization, excision and the congruence split.
"""
import os
import sys
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from models.word import Word
from modules.decomp import (
    dilation_shrink, excision_certificate, fresh_variable, patch_certificate,
    quillen_patch, shift_certificate, shift_congruence, shrink_certificate,
    split_congruence, suslin_certificate, suslin_factor,
)
from modules.errors import RejectedInput
from modules.relgrp import load_group
from modules.rings import LaurentRing
from modules.verify import verify_certificate


@pytest.fixture
def group():
    return load_group("A2", rep="natural")


@pytest.fixture
def ring():
    return LaurentRing("Q", ["Z"], base=["Y"])


class TestShrink:

    def test_one_denominator_needs_one_step(self, group, ring):
        g = Word.parse("x[1,0](Z/Y)", ring)
        cert = shrink_certificate(group, g, "Z", "Y")
        assert cert.data["k"] == 1
        assert cert.part("h").word.letters[0].param == ring.gen("Z")
        assert verify_certificate(cert).ok

    def test_polynomial_word_is_already_shrunk(self, group, ring):
        g = Word.parse("x[1,0](Z) * x[0,1](2*Z)", ring)
        res = dilation_shrink(group, g, "Z", "Y")
        assert res.k == 0
        assert res.h == g

    def test_rank_one_parabolic_rejected(self, ring):
        group = load_group("A3", (2,), rep="natural")
        g = Word.parse("X[1](Z/Y, 0, 0, 0)", ring)
        with pytest.raises(RejectedInput):
            dilation_shrink(group, g, "Z", "Y")

    def test_fresh_variable(self, ring):
        assert fresh_variable(ring, "S") == "S"
        assert fresh_variable(ring, "Z") == "Z1"


class TestShift:

    def test_shift_over_polynomials(self, group, ring):
        g = Word.parse("x[1,0](Z/Y)", ring)
        cert = shift_certificate(group, g, "Z", "Y", "1 + Y", "1")
        assert cert.data["k"] == 1
        assert verify_certificate(cert).ok

    def test_equal_scalars(self, group, ring):
        g = Word.parse("x[1,0](Z/Y)", ring)
        res = shift_congruence(group, g, "Z", "Y", "3", "3")
        assert res.word.is_empty

    def test_not_divisible(self, group, ring):
        g = Word.parse("x[1,0](Z/Y)", ring)
        with pytest.raises(RejectedInput):
            shift_congruence(group, g, "Z", "Y", "2", "1")


class TestSuslin:

    @pytest.fixture
    def base(self):
        return LaurentRing("Q", base=["Y"])

    def test_single_letter(self, group, base):
        x = Word.parse("x[1,0](1/(Y*(1-Y)))", base)
        cert = suslin_certificate(group, x, "Y", "1-Y")
        assert cert.statement == "suslin"
        assert verify_certificate(cert).ok

    def test_word_without_denominators(self, group, base):
        x = Word.parse("x[1,0](3) * x[0,1](Y)", base)
        res = suslin_factor(group, x, "Y", "1-Y")
        assert res.x1 == x
        assert res.x2.is_empty

    def test_not_comaximal(self, group, base):
        x = Word.parse("x[1,0](1/Y)", base)
        with pytest.raises(RejectedInput):
            suslin_factor(group, x, "Y", "Y^2")

    def test_foreign_denominator(self, group, base):
        x = Word.parse("x[1,0](1/(1+Y))", base)
        with pytest.raises(RejectedInput):
            suslin_factor(group, x, "Y", "1-Y")


class TestExcision:

    @pytest.fixture
    def tring(self):
        return LaurentRing("Q", base=["t"])

    def test_split(self, group, tring):
        x = Word.parse("x[0,1](1/(t*(t-1)))", tring)
        cert = excision_certificate(group, x, "t", ("t-1",))
        assert [p.name for p in cert.parts] == ["y", "z"]
        assert verify_certificate(cert).ok

    def test_no_a_bases(self, group, tring):
        x = Word.parse("x[0,1](1/t)", tring)
        cert = excision_certificate(group, x, "t")
        assert cert.part("y").word.is_empty


class TestCongruenceSplit:

    def test_split_by_sign(self, group):
        ring = LaurentRing("Q", ["X", "t"], laurent=["X"], nilpotent={"t": 2})
        M = group.evaluate(Word.parse("x[1,0](t*X) * x[0,1](t*X^-1) * x[-1,0](2*t)", ring))
        plus, minus = split_congruence(group.rep, M, "t", "X")
        assert group.rep.evaluate(plus) * group.rep.evaluate(minus) == M
        assert all(m[0] >= 0 for p in plus.params() for m in p.terms)


class TestQuillenPatch:

    def test_glues_polynomial_words(self, group, ring):
        w = Word.parse("x[1,0](Z) * x[0,1](3*Z)", ring)
        cert = patch_certificate(group, "Z", "Y", w, "1 - Y", w)
        assert cert.statement == "patch"
        assert verify_certificate(cert).ok

    def test_local_words_must_agree(self, group, ring):
        w_a = Word.parse("x[1,0](Z)", ring)
        w_b = Word.parse("x[1,0](2*Z)", ring)
        with pytest.raises(RejectedInput):
            quillen_patch(group, "Z", "Y", w_a, "1 - Y", w_b)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
