"""
tests/test_laurent.py — Tests for laurent.py
Three-factor splits over k[X, X⁻¹] and the two-factor congruence split.
"""
import os
import sys
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from models.word import Word
from modules.errors import BudgetExhausted, RejectedInput
from modules.euclid import natural_rep
from modules.laurent import (
    birkhoff_rows, congruence_laurent_certificate, field_split, laurent_certificate,
    laurent_split, min_exponent, ordered_split, sigma_runs, split_mixed,
)
from modules.relgrp import load_group
from modules.rings import LaurentRing
from modules.rootsys import pick_alpha1
from modules.verify import verify_certificate


@pytest.fixture
def ring():
    return LaurentRing("Q", ["X"], laurent=["X"])


@pytest.fixture
def sl3():
    return load_group("A2", rep="natural")


class TestOrderedSplit:

    def test_already_ordered(self, ring):
        w = Word.parse("x[1,0](X) * x[0,1](X^-1) * x[1,0](X^2)", ring)
        plus, minus, plus2 = ordered_split(w, "X")
        assert (len(plus), len(minus), len(plus2)) == (1, 1, 1)

    def test_mixed_letter(self, ring):
        assert ordered_split(Word.parse("x[1,0](X + X^-1)", ring), "X") is None

    def test_too_many_blocks(self, ring):
        w = Word.parse("x[1,0](X^-1) * x[0,1](X)", ring)
        assert ordered_split(w, "X", blocks=3) is not None
        assert ordered_split(w, "X", blocks=2) is None


class TestLaurentSplit:

    def test_direct_certificate(self, sl3, ring):
        w = Word.parse("x[1,0](X) * x[0,1](X^-1) * x[-1,0](X^2)", ring)
        cert = laurent_certificate(sl3, w, "X", seed=1)
        assert cert.data["attempts"] == 0
        assert verify_certificate(cert).ok

    def test_birkhoff_rows(self, sl3, ring):
        h = sl3.evaluate(Word.parse("x[1,0](X + X^-1)", ring))
        h_inv = sl3.evaluate(Word.parse("x[1,0](-X - X^-1)", ring))
        N_inv = birkhoff_rows(h, h_inv, "X")
        assert N_inv is not None
        assert min_exponent(N_inv * h, "X") >= 0
        assert N_inv.det().is_constant()

    def test_mixed_letter_split_in_place(self, sl3, ring):
        w = Word.parse("x[1,0](X + X^-1)", ring)
        cert = laurent_certificate(sl3, w, "X", seed=1)
        assert [p.name for p in cert.parts] == ["w_plus", "w_minus", "w_plus2"]
        assert cert.data["attempts"] == 0
        assert verify_certificate(cert).ok

    def test_field_search(self, sl3, ring):
        rep = natural_rep(3)
        g = sl3.evaluate(Word.parse("x[1,0](X + X^-1)", ring))
        res = field_split(rep, g, "X", seed=1)
        assert rep.evaluate(res.plus * res.minus * res.plus2) == g
        assert all(e <= 0 for p in res.minus.params() for m in p.terms for e in m)
        assert all(e >= 0 for p in (res.plus * res.plus2).params() for m in p.terms for e in m)

    def test_polynomial_variable_rejected(self, sl3):
        ring = LaurentRing("Q", ["X"])
        with pytest.raises(RejectedInput):
            laurent_split(sl3, Word.parse("x[1,0](X)", ring), "X")

    def test_extra_variables_rejected(self, sl3):
        ring = LaurentRing("Q", ["X", "Y"], laurent=["X"])
        with pytest.raises(RejectedInput):
            laurent_split(sl3, Word.parse("x[1,0](X*Y)", ring), "X")

    def test_g2_regime_reported(self, ring):
        group = load_group("G2")
        w = Word.parse("x[1,0](X) * x[0,1](X^-1) * x[1,0](X) * x[0,1](X^-1)", ring)
        with pytest.raises(RejectedInput, match="= 2"):
            laurent_split(group, w, "X")


def _node_word(group, ring, pattern: str) -> Word:
    """Fill {a}, {m} with ±(simple root at the σ node) and {l} with a Levi simple root."""
    node, _ = pick_alpha1(group.rrd)
    rank = group.rd.rank
    a = [int(i == node - 1) for i in range(rank)]
    m = [-x for x in a]
    l = [int(i == node % rank) for i in range(rank)]
    text = pattern.format(a=",".join(map(str, a)), m=",".join(map(str, m)), l=",".join(map(str, l)))
    return Word.parse(text, ring)


class TestSigmaSplit:

    @pytest.mark.parametrize("label", ["B3", "C3", "D4"])
    def test_mixed_letter(self, label, ring):
        group = load_group(label)
        w = Word.parse("x[1,0,0" + ",0" * (group.rd.rank - 3) + "](X + X^-1)", ring)
        cert = laurent_certificate(group, w, "X", seed=1)
        assert verify_certificate(cert).ok

    def test_split_mixed_follows_blocks(self, ring):
        w = split_mixed(Word.parse("x[1,0](X + X^-1) * x[0,1](X^2 + X^-2)", ring), "X")
        assert w.letters[0].param == ring.gen("X")
        assert w.letters[1].param == ring.parse("X^-1")
        assert w.letters[2].param == ring.parse("X^-2")
        assert ordered_split(w, "X") is not None

    def test_runs_share_a_shift(self, ring):
        group = load_group("B3")
        w = _node_word(group, ring, "x[{a}](X) * x[{m}](X^-1) * x[{a}](X^2) * x[{l}](1)")
        node, _ = pick_alpha1(group.rrd)
        runs = sigma_runs(group, list(w.letters), "X", node)
        assert [(s, len(letters)) for s, letters in runs] == [(1, 2), (2, 2)]

    @pytest.mark.parametrize("label", ["B3", "C3", "D4"])
    def test_single_run_through_gauss(self, label, ring):
        group = load_group(label)
        w = _node_word(group, ring, "x[{a}](X) * x[{m}](X^-1) * x[{a}](X) * x[{m}](X^-1)")
        assert ordered_split(w, "X") is None
        cert = laurent_certificate(group, w, "X", seed=2)
        assert cert.data["attempts"] >= 1
        assert verify_certificate(cert).ok

    def test_negative_shift(self, ring):
        group = load_group("B3")
        w = _node_word(group, ring, "x[{m}](X) * x[{a}](X^-1) * x[{m}](X) * x[{a}](X^-1)")
        cert = laurent_certificate(group, w, "X", seed=3)
        assert verify_certificate(cert).ok

    def test_polynomial_frame_around_a_run(self, ring):
        group = load_group("D4")
        w = _node_word(group, ring, "x[0,1,0,0](X^3) * x[{a}](2*X) * x[{m}](X^-1) * x[{a}](X) * x[{m}](3*X^-1)")
        cert = laurent_certificate(group, w, "X", seed=4)
        assert verify_certificate(cert).ok

    def test_dual_numbers(self):
        dual = LaurentRing("Q", ["X", "t"], laurent=["X"], nilpotent={"t": 2})
        group = load_group("B3")
        w = _node_word(group, dual, "x[{a}](X) * x[{m}]((1 + t)*X^-1) * x[{a}](X) * x[{m}](X^-1)")
        cert = laurent_certificate(group, w, "X", seed=5)
        assert verify_certificate(cert).ok

    def test_runs_that_do_not_line_up(self, ring):
        group = load_group("B3")
        w = _node_word(group, ring, "x[{a}](X) * x[{m}](X^-1) * x[{a}](X^2) * x[{m}](X^-2)")
        with pytest.raises(BudgetExhausted):
            laurent_split(group, w, "X")

    def test_non_split_group_rejected(self, ring):
        group = load_group("C3", (1, 2))
        w = Word.parse("X[1,0](X) * X[-1,0](X^-1) * X[1,0](X) * X[-1,0](X^-1)", ring)
        with pytest.raises(RejectedInput, match="split"):
            laurent_split(group, w, "X")


class TestCongruenceLaurent:

    @pytest.fixture
    def dual(self):
        return LaurentRing("Q", ["X", "t"], laurent=["X"], nilpotent={"t": 2})

    def test_direct(self, sl3, dual):
        w = Word.parse("x[1,0](t*X) * x[0,1](t*X^-1)", dual)
        cert = congruence_laurent_certificate(sl3, w, "X", "t")
        assert verify_certificate(cert).ok

    def test_mixed_parameters(self, sl3, dual):
        w = Word.parse("x[1,0](t*X + t*X^-1) * x[-1,-1](2*t*X^-3)", dual)
        cert = congruence_laurent_certificate(sl3, w, "X", "t")
        assert verify_certificate(cert).ok

    def test_not_congruent(self, sl3, dual):
        with pytest.raises(RejectedInput):
            congruence_laurent_certificate(sl3, Word.parse("x[1,0](X)", dual), "X", "t")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
