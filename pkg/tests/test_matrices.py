"""
tests/test_matrices.py — Tests for matrices.py
Sparse products, the three inverse routes and determinants.
"""
import os
import sys
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from modules.errors import ParseError, RejectedInput
from modules.matrices import Mat
from modules.rings import LaurentRing


@pytest.fixture
def ring():
    return LaurentRing("Q", ["X"], laurent=["X"])


class TestConstruction:

    def test_from_rows_drops_zeros(self, ring):
        m = Mat.from_rows(ring, [["1", "0"], ["X", "1"]])
        assert m.rows[0] == {0: ring.one}
        assert m[1, 0] == ring.gen("X")

    def test_ragged_rows(self, ring):
        with pytest.raises(ParseError):
            Mat.from_rows(ring, [["1", "0"], ["1"]])

    def test_identity(self, ring):
        assert Mat.identity(ring, 3).is_identity()
        assert not Mat.zeros(ring, 3).is_identity()


class TestArithmetic:

    def test_product(self, ring):
        a = Mat.from_rows(ring, [["1", "X"], ["0", "1"]])
        b = Mat.from_rows(ring, [["1", "0"], ["X^-1", "1"]])
        assert a * b == Mat.from_rows(ring, [["2", "X"], ["X^-1", "1"]])

    def test_shape_mismatch(self, ring):
        with pytest.raises(RejectedInput):
            Mat.identity(ring, 2) * Mat.identity(ring, 3)

    def test_transpose_and_trace(self, ring):
        m = Mat.from_rows(ring, [["1", "X"], ["0", "X^-1"]])
        assert m.transpose()[1, 0] == ring.gen("X")
        assert m.trace() == ring.parse("1 + X^-1")

    def test_digest_is_stable(self, ring):
        m = Mat.from_rows(ring, [["1", "X"], ["0", "1"]])
        n = Mat.from_rows(ring, [["1", "X"], ["0", "1"]])
        assert m.digest() == n.digest()
        assert m.digest() != Mat.identity(ring, 2).digest()


class TestInverses:

    def test_unipotent(self, ring):
        m = Mat.from_rows(ring, [["1", "X", "X^2"], ["0", "1", "3"], ["0", "0", "1"]])
        assert m.is_unipotent()
        assert (m * m.unipotent_inverse()).is_identity()

    def test_gauss_jordan(self, ring):
        m = Mat.from_rows(ring, [["0", "X"], ["-X^-1", "2"]])
        assert (m * m.gauss_jordan_inverse()).is_identity()

    def test_adjugate(self, ring):
        m = Mat.from_rows(ring, [["2", "1"], ["1", "1"]])
        inv, det = m.adjugate_inverse()
        assert det == 1
        assert (inv * m).is_identity()

    def test_singular_rejected(self, ring):
        m = Mat.from_rows(ring, [["1", "1"], ["1", "1"]])
        with pytest.raises(RejectedInput):
            m.gauss_jordan_inverse()


class TestDeterminant:

    def test_laplace(self, ring):
        m = Mat.from_rows(ring, [["X", "1", "0"], ["0", "X^-1", "0"], ["5", "7", "1"]])
        assert m.det() == 1

    def test_non_square(self, ring):
        with pytest.raises(RejectedInput):
            Mat.zeros(ring, 2, 3).det()

    def test_large_over_small_prime(self):
        f7 = LaurentRing("Fp", prime=7)
        m = Mat.diagonal(f7, [f7.constant(2)] + [f7.one] * 7)
        assert m.det() == 2

    def test_large_laurent(self, ring):
        X = ring.gen("X")
        rows = [[ring.zero] * 8 for _ in range(8)]
        for i in range(8):
            rows[i][i] = ring.one
            if i + 1 < 8:
                rows[i][i + 1] = ring.parse("X^-3 + 2")
        rows[0][0] = X ** 2
        rows[7][7] = X.inverse()
        assert Mat.from_rows(ring, rows).det() == X

    def test_large_over_dual_numbers(self):
        dual = LaurentRing("Q", ["t"], nilpotent={"t": 2})
        m = Mat.diagonal(dual, [dual.parse("1 + t")] * 7)
        assert m.det() == dual.parse("1 + 7*t")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
