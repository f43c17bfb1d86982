"""
tests/test_verify.py — Tests for verify.py
Product re-evaluation, recorded hashes, membership patterns and sealing.
"""
import os
import sys
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from models.certificate import CertificatePart, load_certificate
from models.word import Word
from modules.errors import IsoK1Error
from modules.gauss import gauss_certificate
from modules.matrices import Mat
from modules.relgrp import load_group
from modules.rings import LaurentRing
from modules.verify import check_pattern, is_levi, seal, verify_certificate


@pytest.fixture
def sl2():
    return load_group("A1", rep="natural")


@pytest.fixture
def cert(sl2):
    ring = LaurentRing("Q")
    return gauss_certificate(sl2, Mat.from_rows(ring, [["0", "1"], ["-1", "0"]]), seed=1)


class TestVerifyCertificate:

    def test_sealed_certificate(self, cert):
        report = verify_certificate(cert)
        assert report.ok
        assert report.hash == cert.transcript["hash"]
        assert "product" in report.checks

    def test_round_trip_through_json(self, cert):
        again = load_certificate(cert.to_dict())
        assert verify_certificate(again).ok

    def test_tampered_input(self, cert):
        cert.input_matrix = Mat.identity(cert.ring, 2)
        report = verify_certificate(cert)
        assert not report.ok
        assert any("differs" in f for f in report.failures)

    def test_tampered_hash(self, cert):
        cert.transcript["hash"] = "0" * 64
        report = verify_certificate(cert)
        assert not report.ok
        assert any("hash" in f for f in report.failures)

    def test_tampered_part(self, cert):
        doc = cert.to_dict()
        doc["parts"][0]["word"] = "x[1](2)"
        assert not verify_certificate(load_certificate(doc)).ok

    def test_seal_refuses_bad_certificate(self, cert):
        cert.input_matrix = Mat.identity(cert.ring, 2)
        with pytest.raises(IsoK1Error):
            seal(cert)


class TestPatterns:

    @pytest.fixture
    def ring(self):
        return LaurentRing("Q", ["X"], laurent=["X"])

    def _part(self, ring, text, pattern):
        return CertificatePart("p", ring, pattern, word=Word.parse(text, ring))

    def test_poly_pattern(self, sl2, ring):
        assert check_pattern(sl2, self._part(ring, "x[1](X + 1)", "poly:X"), "poly:X") is None
        assert check_pattern(sl2, self._part(ring, "x[1](X^-1)", "poly:X"), "poly:X") is not None

    def test_inverse_pattern(self, sl2, ring):
        assert check_pattern(sl2, self._part(ring, "x[1](X^-2)", "inverse:X"), "inverse:X") is None
        assert check_pattern(sl2, self._part(ring, "x[1](X)", "inverse:X"), "inverse:X") is not None

    def test_upper_and_lower(self, sl2, ring):
        part = self._part(ring, "x[-1](X)", "lower")
        assert check_pattern(sl2, part, "lower") is None
        assert "violating upper" in check_pattern(sl2, part, "upper")

    def test_constant(self, sl2, ring):
        assert check_pattern(sl2, self._part(ring, "x[1](3)", "constant"), "constant") is None
        assert check_pattern(sl2, self._part(ring, "x[1](X)", "constant"), "constant") is not None

    def test_unknown_pattern(self, sl2, ring):
        reason = check_pattern(sl2, self._part(ring, "x[1](X)", "bogus"), "bogus")
        assert reason.startswith("unknown pattern")

    def test_unknown_variable(self, sl2, ring):
        assert "not a variable" in check_pattern(sl2, self._part(ring, "x[1](X)", "poly:Y"), "poly:Y")


class TestLevi:

    @pytest.fixture
    def ring(self):
        return LaurentRing("Q")

    def test_torus_is_levi(self, sl2, ring):
        assert is_levi(sl2, Mat.diagonal(ring, [ring.constant(2), ring.parse("1/2")]))

    def test_determinant_must_be_one(self, sl2, ring):
        assert not is_levi(sl2, Mat.diagonal(ring, [ring.constant(2), ring.one]))

    def test_grading_must_be_preserved(self, sl2, ring):
        assert not is_levi(sl2, Mat.from_rows(ring, [["1", "1"], ["0", "1"]]))

    def test_levi_pattern_on_matrix_part(self, sl2, ring):
        good = CertificatePart("l", ring, "levi", matrix=Mat.diagonal(ring, [ring.constant(3), ring.parse("1/3")]))
        bad = CertificatePart("l", ring, "levi", matrix=Mat.diagonal(ring, [ring.constant(3), ring.one]))
        assert check_pattern(sl2, good, "levi") is None
        assert "grading" in check_pattern(sl2, bad, "levi")

    def test_gauss_certificate_with_levi_part(self):
        group = load_group("A2", (1,))
        ring = LaurentRing("Fp", prime=7)
        g = group.evaluate(Word.parse("x[0,1](3) * x[-1,0](2) * x[1,1](5) * x[0,-1](1)", ring))
        cert = gauss_certificate(group, g, seed=5)
        report = verify_certificate(cert)
        assert report.ok
        assert "l:levi" in report.checks


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
