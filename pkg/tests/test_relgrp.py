"""
tests/test_relgrp.py — Tests for relgrp.py
Relative letters, sum and commutator maps, the dilation σ and congruence normal forms.
"""
import os
import sys
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from models.word import RelLetter, Word
from modules.errors import RejectedInput
from modules.matrices import Mat
from modules.relgrp import load_group
from modules.rings import LaurentRing


@pytest.fixture
def laurent():
    return LaurentRing("Q", ["X"], laurent=["X"])


@pytest.fixture
def bc2():
    return load_group("C3", (1, 2))


class TestRelativeLetters:

    def test_split_flag(self, bc2):
        assert load_group("A2").is_split
        assert not bc2.is_split
        assert bc2.describe()["relative_type"] == "BC2"

    def test_expansion_matches_exponential(self, laurent):
        group = load_group("A3", (2,), rep="natural")
        params = (laurent.gen("X"), laurent.constant(2), laurent.parse("X^-1"), laurent.constant(-1))
        w = Word(laurent, (RelLetter((1,), params),))
        assert group.evaluate(w) == group.rel_element((1,), params)

    def test_wrong_parameter_count(self, laurent):
        group = load_group("A3", (2,), rep="natural")
        with pytest.raises(RejectedInput):
            group.rel_element((1,), [laurent.one])


class TestRelationMaps:

    def test_sum_map_with_double_root(self, bc2):
        ring = LaurentRing("Q")
        qm = bc2.q_maps((0, 1))
        assert qm.roots[2] == (0, 2)
        v = [ring.constant(1), ring.constant(2)]
        w = [ring.constant(3), ring.constant(-1)]
        q2 = qm.evaluate(2, {"v0": v[0], "v1": v[1], "w0": w[0], "w1": w[1]}, ring)
        lhs = bc2.rel_element((0, 1), v) * bc2.rel_element((0, 1), w)
        rhs = bc2.rel_element((0, 1), [a + b for a, b in zip(v, w)]) * bc2.rel_element((0, 2), list(q2))
        assert lhs == rhs

    def test_split_sum_map_is_empty(self):
        assert load_group("A2").q_maps((1, 0)).maps == {}

    def test_a2_commutator(self):
        nm = load_group("A2").n_maps((1, 0), (0, 1))
        (p,) = nm.maps[(1, 1)]
        u0, v0 = nm.ring.gens()
        assert p in (u0 * v0, -(u0 * v0))
        assert load_group("A2").is_surjective((1, 0), (0, 1))

    def test_opposite_rays_rejected(self):
        with pytest.raises(RejectedInput):
            load_group("A2").n_maps((1, 0), (-1, 0))


class TestSigma:

    def test_conjugation_by_torus(self, laurent):
        group = load_group("A2", rep="natural")
        w = Word.parse("x[1,0](X^2) * x[0,1](1) * x[-1,-1](X)", laurent)
        S = group.sigma_matrix(laurent)
        S_inv = group.sigma_matrix(laurent, direction=-1)
        assert group.evaluate(group.sigma_apply(w)) == S * group.evaluate(w) * S_inv

    def test_sigma_scales_by_degree(self, laurent):
        group = load_group("A2", rep="natural")
        w = group.sigma_apply(Word.parse("x[1,0](1) * x[0,1](1)", laurent))
        assert w.letters[0].param == laurent.gen("X")
        assert w.letters[1].param == laurent.one

    def test_needs_laurent_variable(self):
        ring = LaurentRing("Q", ["X"])
        with pytest.raises(RejectedInput):
            load_group("A2").sigma_apply(Word.parse("x[1,0](X)", ring))

    def test_weyl_flip_sl2(self):
        ring = LaurentRing("Q")
        group = load_group("A1", rep="natural")
        assert group.evaluate(group.weyl_flip(ring)) == Mat.from_rows(ring, [["0", "1"], ["-1", "0"]])


class TestCongruence:

    @pytest.fixture
    def dual(self):
        return LaurentRing("Q", ["t"], nilpotent={"t": 2})

    def test_normal_form_preserves_value(self, dual):
        group = load_group("A2", rep="natural")
        w = Word.parse("x[1,0](1 + t) * x[0,1](2) * x[0,1](-2) * x[1,0](-1)", dual)
        form = group.congruence_normal_form(w, "t")
        assert form.generators
        assert group.evaluate(form.word()) == group.evaluate(w)

    def test_not_congruent(self, dual):
        group = load_group("A2", rep="natural")
        with pytest.raises(RejectedInput):
            group.congruence_normal_form(Word.parse("x[1,0](1)", dual), "t")


class TestZConjugate:

    @pytest.fixture
    def sl3(self):
        return load_group("A2", rep="natural")

    def test_conjugate_by_opposite_letter(self, sl3, laurent):
        a = Word.parse("x[-1,0](X)", laurent)
        z = sl3.z_conjugate(a, (1, 0), [[laurent.parse("X^2")]])
        assert len(z) == 3
        expected = sl3.evaluate(a * Word.parse("x[1,0](X^2)", laurent) * a.inverse())
        assert sl3.evaluate(z) == expected

    def test_conjugator_outside_rank_one_subgroup(self, sl3, laurent):
        with pytest.raises(RejectedInput):
            sl3.z_conjugate(Word.parse("x[0,1](1)", laurent), (1, 0), [[laurent.one]])

    def test_too_many_multiples(self, sl3, laurent):
        with pytest.raises(RejectedInput):
            sl3.z_conjugate(Word(laurent), (1, 0), [[laurent.one], [laurent.one]])


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
