"""
tests/test_euclid.py — Tests for euclid.py
Division, column Euclid over k[X] and the dual-number reduction.
"""
import os
import sys
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from modules.errors import RejectedInput
from modules.euclid import (
    dual_reduce, elementary_reduce, factor_constant, natural_rep, poly_divmod,
)
from modules.matrices import Mat
from modules.rings import LaurentRing


@pytest.fixture
def ring():
    return LaurentRing("Q", ["X"])


class TestDivision:

    def test_divmod(self, ring):
        q, r = poly_divmod(ring.parse("X^2 + 1"), ring.parse("X - 1"), "X")
        assert q == ring.parse("X + 1")
        assert r == 2

    def test_divide_by_zero(self, ring):
        with pytest.raises(RejectedInput):
            poly_divmod(ring.one, ring.zero, "X")


class TestColumnEuclid:

    def test_reduce_recovers_matrix(self, ring):
        M = Mat.from_rows(ring, [["X^2 + X + 1", "X"], ["X + 1", "1"]])
        D, word = elementary_reduce(M, "X")
        assert D.is_constant()
        assert D * natural_rep(2).evaluate(word) == M

    def test_three_by_three_over_fp(self):
        ring = LaurentRing("Fp", ["X"], prime=7)
        M = Mat.from_rows(ring, [["1", "X", "0"], ["0", "1", "X^2"], ["3", "3*X", "1"]])
        D, word = elementary_reduce(M, "X")
        assert D * natural_rep(3).evaluate(word) == M

    def test_non_unit_determinant(self, ring):
        with pytest.raises(RejectedInput):
            elementary_reduce(Mat.from_rows(ring, [["X", "0"], ["0", "1"]]), "X")

    def test_negative_power_rejected(self):
        ring = LaurentRing("Q", ["X"], laurent=["X"])
        with pytest.raises(RejectedInput):
            elementary_reduce(Mat.from_rows(ring, [["X", "0"], ["0", "X^-1"]]), "X")

    def test_factor_constant(self, ring):
        D = Mat.from_rows(ring, [["2", "3"], ["1", "2"]])
        assert natural_rep(2).evaluate(factor_constant(D)) == D


class TestDualNumbers:

    def test_first_order_matrix(self):
        ring = LaurentRing("Q", ["X", "t"], nilpotent={"t": 2})
        M = Mat.from_rows(ring, [["1 + t*X", "t"], ["0", "1 - t*X"]])
        word = dual_reduce(M, "X", "t")
        assert natural_rep(2).evaluate(word) == M

    def test_mixed_matrix(self):
        ring = LaurentRing("Q", ["X", "t"], nilpotent={"t": 2})
        M = Mat.from_rows(ring, [["1", "X + t"], ["t*X", "1 + t*X^2"]])
        word = dual_reduce(M, "X", "t")
        assert natural_rep(2).evaluate(word) == M


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
