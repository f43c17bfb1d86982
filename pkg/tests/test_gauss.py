"""
tests/test_gauss.py — Tests for gauss.py
Big-cell search, block LDU and the congruence variant over dual numbers.
"""
import os
import random
import sys
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from models.word import RootLetter, Word
from modules.errors import RejectedInput
from modules.gauss import (
    congruence_gauss, congruence_gauss_certificate, gauss_certificate,
    gauss_decompose, random_group_element,
)
from modules.matrices import Mat
from modules.relgrp import load_group
from modules.rings import LaurentRing
from modules.verify import verify_certificate


@pytest.fixture
def sl2():
    return load_group("A1", rep="natural")


class TestGaussDecompose:

    def test_weyl_element(self, sl2):
        ring = LaurentRing("Q")
        g = Mat.from_rows(ring, [["0", "1"], ["-1", "0"]])
        f = gauss_decompose(sl2, g, seed=1)
        one = ring.one
        assert f.u1.letters == (RootLetter((1,), one),)
        assert f.u2.letters == (RootLetter((-1,), -one),)
        assert f.l.is_identity()
        assert f.u3.letters == (RootLetter((1,), one),)
        assert f.attempts == 2

    def test_identity_needs_one_candidate(self, sl2):
        ring = LaurentRing("Q")
        f = gauss_decompose(sl2, Mat.identity(ring, 2), seed=1)
        assert f.attempts == 1
        assert f.u1.is_empty

    def test_sl4_over_f7(self):
        group = load_group("A3", (2,), rep="natural")
        ring = LaurentRing("Fp", prime=7)
        g = random_group_element(group, ring, random.Random(11), length=12)
        cert = gauss_certificate(group, g, seed=3)
        assert [p.name for p in cert.parts] == ["u1", "u2", "l", "u3"]
        assert verify_certificate(cert).ok

    def test_determinant_checked(self, sl2):
        ring = LaurentRing("Q")
        with pytest.raises(RejectedInput):
            gauss_decompose(sl2, Mat.from_rows(ring, [["2", "0"], ["0", "1"]]))

    def test_non_group_element_rejected_when_dimension_exceeds_characteristic(self):
        group = load_group("A2", (1,))
        ring = LaurentRing("Fp", prime=7)
        assert group.rep.dim >= ring.characteristic
        g = Mat.diagonal(ring, [ring.constant(2)] + [ring.one] * (group.rep.dim - 1))
        with pytest.raises(RejectedInput, match="determinant"):
            gauss_certificate(group, g, seed=1)

    def test_polynomial_coefficients_rejected(self, sl2):
        ring = LaurentRing("Q", ["X"])
        with pytest.raises(RejectedInput):
            gauss_decompose(sl2, Mat.identity(ring, 2))

    def test_wrong_dimension(self, sl2):
        ring = LaurentRing("Q")
        with pytest.raises(RejectedInput):
            gauss_decompose(sl2, Mat.identity(ring, 3))


class TestCongruenceGauss:

    @pytest.fixture
    def dual(self):
        return LaurentRing("Q", ["t"], nilpotent={"t": 2})

    def test_factors_reproduce_input(self, dual):
        group = load_group("A2", rep="natural")
        w = Word.parse("x[1,0](t) * x[-1,-1](2*t) * x[0,1](-t) * x[0,-1](3*t)", dual)
        g = group.evaluate(w)
        f = congruence_gauss(group, g, "t")
        rep = group.rep
        assert rep.evaluate(f.upper) * f.l * rep.evaluate(f.lower) == g

    def test_certificate_verifies(self, dual):
        group = load_group("A2", rep="natural")
        g = group.evaluate(Word.parse("x[-1,0](t) * x[1,1](t)", dual))
        cert = congruence_gauss_certificate(group, g, "t")
        assert cert.statement == "gauss-congruence"
        assert verify_certificate(cert).ok

    def test_not_congruent(self, dual):
        group = load_group("A2", rep="natural")
        g = group.evaluate(Word.parse("x[1,0](1)", dual))
        with pytest.raises(RejectedInput):
            congruence_gauss(group, g, "t")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
