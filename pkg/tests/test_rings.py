"""
tests/test_rings.py — Tests for rings.py
Laurent and dual-number arithmetic, finite fields, base fields and localizations.
"""
import os
import sys
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from modules.errors import ParseError, RejectedInput
from modules.rings import (
    LaurentPoly, LaurentRing, Localization, absorb_into_base, release_from_base,
)


@pytest.fixture
def laurent():
    return LaurentRing("Q", ["X"], laurent=["X"])


class TestLaurentArithmetic:

    def test_parse_and_format(self, laurent):
        p = laurent.parse("X^-1 + 2*X")
        assert str(p) == "2*X + X^-1"

    def test_product_of_conjugates(self, laurent):
        X = laurent.gen("X")
        assert (X + 1) * (X - 1) == laurent.parse("X^2 - 1")

    def test_monomial_inverse(self, laurent):
        p = laurent.parse("2*X^3")
        assert p.inverse() == laurent.parse("1/2*X^-3")
        assert p * p.inverse() == 1

    def test_non_unit_rejected(self, laurent):
        with pytest.raises(RejectedInput):
            laurent.parse("1 + X").inverse()

    def test_polynomial_variable_has_no_inverse(self):
        ring = LaurentRing("Q", ["X"])
        with pytest.raises(RejectedInput):
            ring.parse("X^-1")

    def test_split_by_sign(self, laurent):
        plus, minus = laurent.parse("X + 1 + 3*X^-2").split_by_sign("X")
        assert plus == laurent.parse("X + 1")
        assert minus == laurent.parse("3*X^-2")

    def test_degrees(self, laurent):
        p = laurent.parse("X^3 - X^-2")
        assert p.degree("X") == 3
        assert p.min_degree("X") == -2
        assert p.total_degree() == 3


class TestDualNumbers:

    def test_t_squared_vanishes(self):
        ring = LaurentRing("Q", ["t"], nilpotent={"t": 2})
        t = ring.gen("t")
        assert (t * t).is_zero

    def test_one_plus_t_inverse(self):
        ring = LaurentRing("Q", ["t"], nilpotent={"t": 2})
        t = ring.gen("t")
        assert (1 + t).inverse() == 1 - t

    def test_reduce_mod_t(self):
        ring = LaurentRing("Q", ["X", "t"], laurent=["X"], nilpotent={"t": 2})
        p = ring.parse("1 + t*X + X")
        assert p.reduce("t") == ring.parse("1 + X")

    def test_laurent_and_nilpotent_conflict(self):
        with pytest.raises(ParseError):
            LaurentRing("Q", ["t"], laurent=["t"], nilpotent={"t": 2})


class TestFiniteField:

    def test_arithmetic_mod_p(self):
        ring = LaurentRing("Fp", ["X"], prime=7)
        assert ring.parse("3*X") * 5 == ring.parse("X")

    def test_small_prime_rejected(self):
        with pytest.raises(RejectedInput):
            LaurentRing("Fp", prime=3)


class TestMaps:

    def test_substitute_into_smaller_ring(self):
        ring = LaurentRing("Q", ["X", "Y"])
        small = LaurentRing("Q", ["Y"])
        p = ring.parse("X^2 + Y + X*Y")
        assert p.substitute({"X": 0}, small) == small.parse("Y")

    def test_part_zeroes_the_exponent(self):
        ring = LaurentRing("Q", ["X", "t"], nilpotent={"t": 2})
        p = ring.parse("3 + t*X^2 + 2*t")
        assert p.part("t", 1) == ring.parse("X^2 + 2")

    def test_ring_round_trip(self):
        ring = LaurentRing("Fp", ["X", "t"], laurent=["X"], nilpotent={"t": 2}, prime=11)
        assert LaurentRing.from_dict(ring.to_dict()) == ring

    def test_absorb_and_release(self):
        ring = LaurentRing("Q", ["X1", "X2"])
        based = ring.with_base(["X1"], ["X2"])
        p = ring.parse("X1*X2 + X1^2")
        q = absorb_into_base(p, based)
        assert q.ring == based
        assert q.degree("X2") == 1
        assert release_from_base(q, ring) == p

    def test_release_keeps_shared_base_generators(self):
        src = LaurentRing("Q", base=["Y", "X"])
        target = LaurentRing("Q", ["X"], base=["Y"])
        p = src.parse("Y*X^2 + X")
        assert release_from_base(p, target) == target.parse("Y*X^2 + X")


class TestRationalCoefficients:

    @pytest.fixture
    def ring(self):
        return LaurentRing("Fp", ["X"], prime=7, base=["Y"])

    def _unreduced_one(self, ring):
        h = ring.domain.field.ring.gens[0] + 1
        return LaurentPoly(ring, {(0,): ring.domain.field.one.raw_new(h, h)})

    def test_unreduced_coefficient_equals_one(self, ring):
        one = self._unreduced_one(ring)
        assert one == ring.one
        assert ring.one == one
        assert one == 1

    def test_hash_agrees_with_equality(self, ring):
        assert hash(self._unreduced_one(ring)) == hash(ring.one)
        assert len({self._unreduced_one(ring), ring.one}) == 1

    def test_different_support_is_unequal(self, ring):
        assert self._unreduced_one(ring) != ring.gen("X")


class TestLocalization:

    @pytest.fixture
    def ring(self):
        return LaurentRing("Q", base=["Y"])

    def test_membership(self, ring):
        loc = Localization.of(ring, "Y")
        assert loc.contains(ring.parse("1/Y").constant_term())
        assert not loc.contains(ring.parse("1/(1-Y)").constant_term())

    def test_bezout(self, ring):
        f = ring.base_gen("Y")
        g = ring.domain.one - f
        s, t = Localization.of(ring).bezout(f, g)
        assert f * s + g * t == ring.domain.one

    def test_not_comaximal(self, ring):
        f = ring.base_gen("Y")
        with pytest.raises(RejectedInput):
            Localization.of(ring).bezout(f, f * f)

    def test_partial_fractions(self, ring):
        f = ring.base_gen("Y")
        g = ring.domain.one - f
        c = ring.parse("1/(Y*(1-Y))").constant_term()
        cf, cg = Localization.of(ring).partial_fractions(c, f, g)
        assert cf + cg == c
        assert Localization.of(ring, f).contains(cf)
        assert Localization.of(ring, g).contains(cg)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
