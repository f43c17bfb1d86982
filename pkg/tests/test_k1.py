"""
tests/test_k1.py — Tests for k1.py
K1 certificates over k[X], k[X1, X2] and k[X, X⁻¹], and the projective-line glue.
"""
import os
import random
import sys
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from models.certificate import load_certificate
from models.transcript import Transcript
from models.word import Word
from modules.errors import RejectedInput
from modules.k1 import (
    SL2_REMARK, laurent_factor, monic_descend, one_var_factor, p1_glue_check, poly_factor,
)
from modules.gauss import random_group_element
from modules.matrices import Mat
from modules.relgrp import load_group
from modules.rings import LaurentRing
from modules.suite import random_root_word
from modules.verify import verify_certificate


class TestOneVariable:

    def test_elementary_matrix(self):
        ring = LaurentRing("Q", ["X"])
        g = Mat.from_rows(ring, [["1", "X", "0"], ["0", "1", "0"], ["0", "0", "1"]])
        cert = one_var_factor(g)
        assert cert.constant.is_identity()
        assert verify_certificate(cert).ok

    def test_constant_part_is_value_at_zero(self):
        ring = LaurentRing("Q", ["X"])
        g = Mat.from_rows(ring, [["2", "2*X", "0"], ["0", "1/2", "0"], ["0", "0", "1"]])
        cert = one_var_factor(g)
        assert cert.constant == Mat.from_rows(ring, [["2", "0", "0"], ["0", "1/2", "0"], ["0", "0", "1"]])
        assert verify_certificate(cert).ok

    def test_sl2_is_out_of_scope(self):
        ring = LaurentRing("Q", ["X"])
        with pytest.raises(RejectedInput) as e:
            one_var_factor(Mat.identity(ring, 2))
        assert SL2_REMARK in str(e.value)

    def test_determinant_must_be_one(self):
        ring = LaurentRing("Q", ["X"])
        with pytest.raises(RejectedInput):
            one_var_factor(Mat.diagonal(ring, [2, 1, 1]))


class TestTwoVariables:

    def test_poly_factor_over_f7(self):
        ring = LaurentRing("Fp", ["X1", "X2"], prime=7)
        g = Mat.from_rows(ring, [["1", "X1*X2", "0"], ["0", "1", "0"], ["0", "0", "1"]])
        cert = poly_factor(g, seed=5)
        assert cert.n == 2
        assert cert.data["max_degree"] == 2
        assert verify_certificate(cert).ok

    def test_axis_terms(self):
        ring = LaurentRing("Q", ["X1", "X2"])
        g = Mat.from_rows(ring, [["1", "X1", "X2"], ["0", "1", "0"], ["0", "0", "1"]])
        assert verify_certificate(poly_factor(g, seed=5)).ok

    def test_constant_input_any_number_of_variables(self):
        ring = LaurentRing("Q", ["X1", "X2", "X3", "X4"])
        g = Mat.from_rows(ring, [["2", "1", "0"], ["1", "1", "0"], ["0", "0", "1"]])
        cert = poly_factor(g, seed=5)
        assert cert.constant == g
        assert len(cert.word) == 0
        assert verify_certificate(cert).ok

    def test_identity_in_three_variables(self):
        ring = LaurentRing("Q", ["X1", "X2", "X3"])
        cert = poly_factor(Mat.identity(ring, 3))
        assert cert.n == 3
        assert verify_certificate(cert).ok

    def test_unused_variable_is_dropped(self):
        ring = LaurentRing("Fp", ["X1", "X2", "X3"], prime=7)
        g = Mat.from_rows(ring, [["1", "X1*X2", "0"], ["0", "1", "0"], ["0", "0", "1"]])
        cert = poly_factor(g, seed=5)
        assert cert.data["variables"] == ["X1", "X2"]
        assert verify_certificate(cert).ok

    def test_three_variables_peel_the_last(self):
        ring = LaurentRing("Q", ["X1", "X2", "X3"])
        g = Mat.from_rows(ring, [["1", "X1 + X3", "X1*X2 + X2*X3"], ["0", "1", "X2"], ["0", "0", "1"]])
        cert = poly_factor(g, seed=5)
        assert cert.n == 3
        assert cert.data["depth"] == 3
        assert verify_certificate(cert).ok

    def test_certificate_round_trip_verifies(self):
        ring = LaurentRing("Fp", ["X1", "X2"], prime=7)
        g = Mat.from_rows(ring, [["1", "0", "0"], ["3*X1*X2", "1", "0"], ["0", "0", "1"]])
        doc = poly_factor(g, seed=5).to_dict()
        assert verify_certificate(load_certificate(doc)).ok


class TestAcceptanceShape:

    VALUES = ("X1", "X2", "2*X1*X2", "X1 + X2", "3*X2^2", "X1^2 - X2")

    @pytest.mark.parametrize("seed", [3, 17, 29])
    def test_constant_times_short_word_over_f7(self, seed):
        ring = LaurentRing("Fp", ["X1", "X2"], prime=7)
        group = load_group("A2", rep="natural")
        rng = random.Random(seed)
        g0 = random_group_element(group, ring, rng, length=4)
        w = random_root_word(group, ring, rng, rng.randint(1, 6), [ring.parse(s) for s in self.VALUES])
        g = g0 * group.rep.evaluate(w)
        cert = poly_factor(g, seed=seed)
        assert cert.constant == g0
        assert verify_certificate(cert).ok


class TestMonicDescend:

    @pytest.fixture
    def sl3(self):
        return load_group("A2", rep="natural")

    def test_denominator_free_witness_returned(self, sl3):
        ring = LaurentRing("Q", ["X"], base=["Y"])
        w = Word.parse("x[1,0](X*Y) * x[0,1](X)", ring)
        assert monic_descend(sl3.evaluate(w), "X", witness=w) == w

    def test_linear_monic_denominator(self, sl3):
        ring = LaurentRing("Q", ["X"])
        local = LaurentRing("Q", base=["X"])
        witness = Word.parse("x[1,0](2*X/(X - 2)) * x[1,0](X*(X - 4)/(X - 2))", local)
        x = sl3.evaluate(Word.parse("x[1,0](X)", ring))
        transcript = Transcript()
        word = monic_descend(x, "X", witness=witness, transcript=transcript)
        assert word.ring == ring
        assert sl3.evaluate(word) == x
        assert transcript.steps() == ["witness", "descend"]

    def test_quadratic_monic_denominator_over_q_y(self, sl3):
        ring = LaurentRing("Q", ["X"], base=["Y"])
        local = LaurentRing("Q", base=["Y", "X"])
        witness = Word.parse("x[1,0](Y*X/(X^2 + Y)) * x[1,0](X^3/(X^2 + Y))", local)
        x = sl3.evaluate(Word.parse("x[1,0](X)", ring))
        word = monic_descend(x, "X", witness=witness)
        assert sl3.evaluate(word) == x
        assert all(c.denom.is_ground for p in word.params() for c in p.terms.values())

    def test_non_monic_denominator_rejected(self, sl3):
        ring = LaurentRing("Q", ["X"], base=["Y"])
        local = LaurentRing("Q", base=["Y", "X"])
        witness = Word.parse("x[1,0](Y*X^2/(Y*X + 1)) * x[1,0](X/(Y*X + 1))", local)
        x = sl3.evaluate(Word.parse("x[1,0](X)", ring))
        with pytest.raises(RejectedInput, match="monic"):
            monic_descend(x, "X", witness=witness)

    def test_witness_must_match(self, sl3):
        ring = LaurentRing("Q", ["X"])
        local = LaurentRing("Q", base=["X"])
        witness = Word.parse("x[1,0](X/(X - 2))", local)
        x = sl3.evaluate(Word.parse("x[1,0](X)", ring))
        with pytest.raises(RejectedInput):
            monic_descend(x, "X", witness=witness)

    def test_not_congruent(self, sl3):
        ring = LaurentRing("Q", ["X"])
        with pytest.raises(RejectedInput):
            monic_descend(sl3.evaluate(Word.parse("x[1,0](1 + X)", ring)), "X")


class TestGlue:

    @pytest.fixture
    def ring(self):
        return LaurentRing("Q", ["X"], laurent=["X"])

    def test_glue(self, ring):
        x = Word.parse("x[1,0](X)", ring)
        y = Word.parse("x[0,1](X^-1)", ring)
        witness = Word.parse("x[1,0](X) * x[0,1](-X^-1)", ring)
        cert = p1_glue_check(x, y, witness, "X")
        assert cert.m == 3
        assert verify_certificate(cert).ok

    def test_wrong_witness(self, ring):
        x = Word.parse("x[1,0](X)", ring)
        y = Word.parse("x[0,1](X^-1)", ring)
        with pytest.raises(RejectedInput):
            p1_glue_check(x, y, Word.parse("x[1,0](X)", ring), "X")

    def test_x_must_be_polynomial(self, ring):
        x = Word.parse("x[1,0](X^-1)", ring)
        y = Word.parse("x[0,1](X^-1)", ring)
        witness = Word.parse("x[1,0](X^-1) * x[0,1](-X^-1)", ring)
        with pytest.raises(RejectedInput):
            p1_glue_check(x, y, witness, "X")

    def test_direct_route_over_field(self, ring):
        x = Word.parse("x[1,0](X) * x[0,1](X^2)", ring)
        y = Word.parse("x[0,1](X^-1)", ring)
        cert = p1_glue_check(x, y, x * y.inverse(), "X")
        assert cert.data["steps"] == ["glue"]
        assert cert.ring.variables == ("X",) and not cert.ring.laurent
        assert verify_certificate(cert).ok


class TestLaurentFactor:

    def test_laurent_factor(self):
        ring = LaurentRing("Q", ["X"], laurent=["X"])
        g = load_group("A2", rep="natural").evaluate(Word.parse("x[1,0](X + X^-1)", ring))
        cert = laurent_factor(g, "X", seed=1)
        assert cert.constant.is_identity()
        assert verify_certificate(cert).ok


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
