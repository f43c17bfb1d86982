"""
relgrp.py — Relative root subschemes X_α(V_α) of a standard parabolic: their
multiplication and commutator maps, congruence generators, the dilation σ
and the Weyl flip n_P.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Sequence

from sympy import QQ, Matrix, Rational

from models.word import RelLetter, RootLetter, TorusLetter, Word
from modules.chevgrp import Representation, representation, unipotent_factorize, weyl_word
from modules.errors import RejectedInput
from modules.matrices import Mat
from modules.rings import LaurentPoly, LaurentRing
from modules.rootsys import (
    Root,
    RelativeRootDatum,
    build_root_system,
    parabolic_weyl_word,
    relative_datum,
    split_datum,
)

logger = logging.getLogger(__name__)


def _scaled(alpha: Root, k: int) -> Root:
    return tuple(k * a for a in alpha)


@dataclass(frozen=True)
class RelationMaps:
    """Polynomial maps over a private symbolic ring, keyed by (i, j) or multiple i."""

    ring: LaurentRing
    maps: dict
    roots: dict = field(default_factory=dict)

    def evaluate(self, key, assignments: dict, target: LaurentRing) -> tuple[LaurentPoly, ...]:
        return tuple(p.substitute(assignments, target) for p in self.maps[key])

    def to_dict(self) -> dict:
        return {
            str(list(k) if isinstance(k, tuple) else k): {
                "root": list(self.roots.get(k, ())),
                "maps": [str(p) for p in v],
            }
            for k, v in sorted(self.maps.items())
        }


@dataclass(frozen=True, eq=False)
class RelativeGroup:
    """A split group with a fixed standard parabolic and representation."""

    rrd: RelativeRootDatum
    rep: Representation
    _expansions: dict = field(default_factory=dict, repr=False)
    _qmaps: dict = field(default_factory=dict, repr=False)
    _nmaps: dict = field(default_factory=dict, repr=False)

    @property
    def rd(self):
        return self.rrd.source

    @property
    def cb(self):
        return self.rep.basis

    @property
    def is_split(self) -> bool:
        return len(self.rrd.J) == self.rd.rank and not self.rrd.gamma

    def describe(self) -> dict:
        return {
            "type": self.rd.label,
            "J": list(self.rrd.J),
            "gamma": [list(p) for p in self.rrd.gamma],
            "rep": self.rep.name,
            "relative_type": self.rrd.type_label,
        }

    # ── Relative letters ─────────────────────────────────────────────────────

    def check_params(self, alpha, params: Sequence) -> tuple[Root, ...]:
        fiber = self.rrd.fiber(alpha)
        if len(params) != len(fiber):
            raise RejectedInput(
                f"X{list(alpha)} takes {len(fiber)} parameters (one per fiber root), got {len(params)}"
            )
        return fiber

    def nilpotent(self, alpha, params: Sequence[LaurentPoly]) -> Mat:
        fiber = self.check_params(alpha, params)
        ring = params[0].ring
        rows: list[dict] = [{} for _ in range(self.rep.dim)]
        acc = Mat(ring, self.rep.dim, self.rep.dim, rows)
        for beta, v in zip(fiber, params):
            if v.is_zero:
                continue
            part = Mat.from_int_sparse(ring, self.rep.dim, self.rep.generator(beta))
            acc = acc + part.map(lambda e: e * v)
        return acc

    def rel_element(self, alpha, params: Sequence[LaurentPoly]) -> Mat:
        """X_α(v) = exp(Σ v_β ρ(e_β)) over the fiber of α."""
        N = self.nilpotent(alpha, params)
        ring = N.ring
        result = Mat.identity(ring, self.rep.dim)
        power = result
        k = 1
        while True:
            power = power * N
            if all(not r for r in power.rows):
                return result
            if ring.characteristic and k >= ring.characteristic:
                raise RejectedInput(f"exponential needs {k}! invertible in {ring.describe()}")
            result = result + power.scale(Fraction(1, factorial(k)))
            k += 1

    def expansion(self, alpha) -> tuple[LaurentRing, tuple]:
        """X_α(v) as an ordered product ∏ x_β(P_β(v)) over the fibers of kα."""
        alpha = tuple(alpha)
        if alpha not in self._expansions:
            fiber = self.rrd.fiber(alpha)
            ring = LaurentRing("Q", tuple(f"v{i}" for i in range(len(fiber))))
            M = self.rel_element(alpha, ring.gens())
            m, fibers = self.rrd.relative_multiples(alpha)
            order = [beta for fib in fibers for beta in fib]
            word = unipotent_factorize(self.rep, M, order)
            self._expansions[alpha] = (ring, tuple((l.root, l.param) for l in word.letters))
            logger.debug(f"expansion of X{list(alpha)}: {len(word)} absolute letters")
        return self._expansions[alpha]

    def expand_letter(self, letter: RelLetter, ring: LaurentRing) -> list[RootLetter]:
        self.check_params(letter.root, letter.params)
        if all(p.is_zero for p in letter.params):
            return []
        sym_ring, terms = self.expansion(letter.root)
        assignments = {name: ring.convert(p) for name, p in zip(sym_ring.variables, letter.params)}
        out = []
        for beta, poly in terms:
            value = poly.substitute(assignments, ring)
            if value:
                out.append(RootLetter(beta, value))
        return out

    def expand_word(self, word: Word) -> Word:
        letters = []
        for letter in word.letters:
            if isinstance(letter, RelLetter):
                letters.extend(self.expand_letter(letter, word.ring))
            else:
                letters.append(letter)
        return Word(word.ring, tuple(letters))

    def evaluate(self, word: Word, ring: LaurentRing | None = None) -> Mat:
        return self.rep.evaluate(self.expand_word(word), ring)

    def letter_matrix(self, letter, ring: LaurentRing) -> Mat:
        return self.evaluate(Word(ring, (letter,)))

    # ── Peeling into relative letters ────────────────────────────────────────

    def peel_relative(self, M: Mat, roots: Sequence[Root]) -> Word:
        """Peel M = X_{γ1}(w1)·X_{γ2}(w2)⋯ for relative roots listed by increasing degree."""
        ring = M.ring
        residual = M
        letters = []
        for gamma in roots:
            fiber = self.rrd.fiber(gamma)
            params = []
            for beta in fiber:
                r, c, v = self.rep.witness(beta)
                params.append(residual[r, c].scale(Fraction(1, v)))
            if all(p.is_zero for p in params):
                continue
            letters.append(RelLetter(tuple(gamma), tuple(params)))
            residual = self.rel_element(gamma, [-p for p in params]) * residual
        if not residual.is_identity():
            raise RejectedInput("matrix is not in the claimed relative unipotent subgroup")
        return Word(ring, tuple(letters))

    # ── Multiplication and commutator maps ───────────────────────────────────

    def q_maps(self, alpha) -> RelationMaps:
        """X_α(v)X_α(w) = X_α(v+w)·∏_{i>1} X_{iα}(q^i(v, w))."""
        alpha = tuple(alpha)
        if alpha not in self._qmaps:
            d = len(self.rrd.fiber(alpha))
            ring = LaurentRing("Q", tuple(f"v{i}" for i in range(d)) + tuple(f"w{i}" for i in range(d)))
            gens = ring.gens()
            v, w = gens[:d], gens[d:]
            M = self.rel_element(alpha, list(v)) * self.rel_element(alpha, list(w))
            M = self.rel_element(alpha, [-(a + b) for a, b in zip(v, w)]) * M
            m, _ = self.rrd.relative_multiples(alpha)
            higher = [_scaled(alpha, k) for k in range(2, m + 1)]
            word = self.peel_relative(M, higher)
            found = {l.root: l.params for l in word.letters}
            maps, roots = {}, {}
            for k, gamma in enumerate(higher, start=2):
                zero = tuple(ring.zero for _ in self.rrd.fiber(gamma))
                maps[k] = found.get(gamma, zero)
                roots[k] = gamma
            self._qmaps[alpha] = RelationMaps(ring, maps, roots)
        return self._qmaps[alpha]

    def n_maps(self, alpha, beta) -> RelationMaps:
        """[X_α(u), X_β(v)] = ∏ X_{iα+jβ}(N_ij(u, v)), ordered by (i+j, i)."""
        alpha, beta = tuple(alpha), tuple(beta)
        key = (alpha, beta)
        if key in self._nmaps:
            return self._nmaps[key]
        rrd = self.rrd
        if not rrd.is_root(alpha) or not rrd.is_root(beta):
            raise RejectedInput(f"{list(alpha)} or {list(beta)} is not a relative root")
        if _opposite_rays(alpha, beta):
            raise RejectedInput(
                f"X{list(alpha)} and X{list(beta)} lie on opposite rays; no commutator formula"
            )
        d, e = len(rrd.fiber(alpha)), len(rrd.fiber(beta))
        ring = LaurentRing("Q", tuple(f"u{i}" for i in range(d)) + tuple(f"v{i}" for i in range(e)))
        gens = ring.gens()
        u, v = list(gens[:d]), list(gens[d:])
        C = (self.rel_element(alpha, u) * self.rel_element(beta, v)
             * self.rel_element(alpha, [-x for x in u]) * self.rel_element(beta, [-x for x in v]))
        targets: list = []
        seen = set()
        for total in range(2, 9):
            for i in range(1, total):
                j = total - i
                gamma = tuple(i * a + j * b for a, b in zip(alpha, beta))
                if rrd.is_root(gamma) and gamma not in seen:
                    seen.add(gamma)
                    targets.append(((i, j), gamma))
        word = self.peel_relative(C, [g for _, g in targets])
        found = {l.root: l.params for l in word.letters}
        maps, roots = {}, {}
        for ij, gamma in targets:
            maps[ij] = found.get(gamma, tuple(ring.zero for _ in rrd.fiber(gamma)))
            roots[ij] = gamma
        result = RelationMaps(ring, maps, roots)
        self._nmaps[key] = result
        return result

    def image_rank(self, alpha, beta) -> int:
        """Rank of the span of N_11(V_α, V_β) inside V_{α+β}."""
        maps = self.n_maps(alpha, beta)
        if (1, 1) not in maps.maps:
            return 0
        d, e = len(self.rrd.fiber(alpha)), len(self.rrd.fiber(beta))
        rows = []
        for i in range(d):
            for j in range(e):
                mono = tuple(int(k == i) for k in range(d)) + tuple(int(k == j) for k in range(e))
                row = []
                for p in maps.maps[(1, 1)]:
                    c = p.terms.get(mono)
                    row.append(Rational(0) if c is None else Rational(int(QQ.numer(c)), int(QQ.denom(c))))
                rows.append(row)
        if not rows or not rows[0]:
            return 0
        return Matrix(rows).rank()

    def is_surjective(self, alpha, beta) -> bool:
        target = tuple(a + b for a, b in zip(alpha, beta))
        return self.image_rank(alpha, beta) == len(self.rrd.fiber(target))

    # ── Congruence generators ────────────────────────────────────────────────

    def relative_root_of(self, letter) -> Root:
        if isinstance(letter, RelLetter):
            return letter.root
        if isinstance(letter, RootLetter):
            return self.rrd.project(letter.root)
        raise RejectedInput("torus letters have no root")

    def z_conjugate(self, a: Word, alpha, us: Sequence[Sequence[LaurentPoly]]) -> Word:
        """Z_α(a, u_1, …) = a·∏ X_{kα}(u_k)·a⁻¹ with a a word in U_{(±α)}."""
        alpha = tuple(alpha)
        m, fibers = self.rrd.relative_multiples(alpha)
        if len(us) > m:
            raise RejectedInput(f"X{list(alpha)} has only {m} multiples")
        allowed = {_scaled(alpha, k) for k in range(1, m + 1)}
        allowed |= {_scaled(alpha, -k) for k in range(1, m + 1)}
        for letter in a.letters:
            if isinstance(letter, TorusLetter) or self.relative_root_of(letter) not in allowed:
                raise RejectedInput(f"conjugator letter {letter.text()} is outside E_{list(alpha)}")
        inner = []
        for k, u in enumerate(us, start=1):
            u = tuple(a.ring.convert(x) for x in u)
            if any(u):
                inner.append(RelLetter(_scaled(alpha, k), u) if not self.is_split
                             else RootLetter(self.rrd.fiber(_scaled(alpha, k))[0], u[0]))
        return a * Word(a.ring, tuple(inner)) * a.inverse()

    def congruence_normal_form(self, word: Word, ideal: str) -> "CongruenceForm":
        """Rewrite a word ≡ 1 mod the ideal as ∏ g_k C_k g_k⁻¹ with C_k in the ideal."""
        ring = word.ring
        if ideal not in ring.variables:
            raise RejectedInput(f"ideal ({ideal}) is not generated by a variable of {ring.describe()}")
        signs = set()
        for p in word.params():
            for e in (m[ring.variables.index(ideal)] for m in p.terms):
                if e:
                    signs.add(e > 0)
        if len(signs) > 1:
            raise RejectedInput(f"parameters mix positive and negative powers of {ideal}")

        def split(p: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
            section = p.part(ideal, 0)
            return section, p - section

        generators = []
        prefix: list = []
        for letter in word.letters:
            if isinstance(letter, TorusLetter):
                if letter.unit.involves(ideal):
                    raise RejectedInput(f"torus letter {letter.text()} is not a section element")
                prefix.append(letter)
                continue
            if isinstance(letter, RootLetter):
                t, v = split(letter.param)
                section = RootLetter(letter.root, t)
                inner = [RootLetter(letter.root, v)] if v else []
            else:
                parts = [split(p) for p in letter.params]
                ts = tuple(s for s, _ in parts)
                vs = tuple(r for _, r in parts)
                section = RelLetter(letter.root, ts)
                inner = self._section_correction(letter.root, ts, vs, ring)
            if not section.is_trivial():
                prefix.append(section)
            if inner:
                g = Word(ring, tuple(prefix))
                generators.append(ZGenerator(g, Word(ring, tuple(inner))))
        tail = Word(ring, tuple(prefix))
        M = self.evaluate(tail)
        if not M.is_identity():
            raise RejectedInput(
                f"word is not congruent to 1 modulo ({ideal})",
                residue=M.to_text_rows(),
            )
        return CongruenceForm(ring, ideal, tuple(generators), tail)

    def _section_correction(self, alpha, ts, vs, ring) -> list:
        """X_α(t)⁻¹X_α(t+v) = X_α(v)·X_{2α}(q²(−t, t+v)) as relative letters."""
        out = []
        if any(vs):
            out.append(RelLetter(alpha, tuple(vs)))
        qm = self.q_maps(alpha)
        if not qm.maps:
            return out
        d = len(ts)
        assignments = {}
        for i in range(d):
            assignments[f"v{i}"] = -ts[i]
            assignments[f"w{i}"] = ts[i] + vs[i]
        for k, gamma in qm.roots.items():
            values = qm.evaluate(k, assignments, ring)
            if any(values):
                out.append(RelLetter(gamma, values))
        return out

    # ── Dilation and Weyl flip ───────────────────────────────────────────────

    def sigma_cochar(self, node: int) -> tuple[int, ...]:
        """Cocharacter with ⟨β, χ⟩ = m_node(π(β)) for a 1-based relative node."""
        orbit = self.rrd.orbits[node - 1]
        return tuple(int(i + 1 in orbit) for i in range(self.rd.rank))

    def sigma_apply(self, word: Word, direction: int = 1, var: str = "X", node: int = 1) -> Word:
        ring = word.ring
        if var not in ring.laurent:
            raise RejectedInput(f"σ needs {var} and {var}^-1 in {ring.describe()}")
        letters = []
        for letter in word.letters:
            if isinstance(letter, TorusLetter):
                letters.append(letter)
                continue
            m = self.relative_root_of(letter)[node - 1]
            scale = ring.monomial({var: direction * m})
            letters.append(letter.map_params(lambda p: p * scale))
        return Word(ring, tuple(letters))

    def sigma_matrix(self, ring: LaurentRing, var: str = "X", node: int = 1, direction: int = 1) -> Mat:
        u = ring.gen(var) if direction > 0 else ring.gen(var).inverse()
        return self.rep.torus(self.sigma_cochar(node), u)

    def weyl_flip(self, ring: LaurentRing) -> Word:
        """n_P as a product of rank-one elements x_α(1)x_{−α}(−1)x_α(1)."""
        out = Word(ring)
        for i in parabolic_weyl_word(self.rrd):
            out = out * weyl_word(self.rd, i, ring)
        return out


@dataclass(frozen=True)
class ZGenerator:
    conjugator: Word
    inner: Word

    def word(self) -> Word:
        return self.conjugator * self.inner * self.conjugator.inverse()

    def to_dict(self) -> dict:
        return {"conjugator": self.conjugator.text(), "inner": self.inner.text()}


@dataclass(frozen=True)
class CongruenceForm:
    ring: LaurentRing
    ideal: str
    generators: tuple
    section: Word

    def word(self) -> Word:
        out = Word(self.ring)
        for g in self.generators:
            out = out * g.word()
        return out

    def to_dict(self) -> dict:
        return {
            "ideal": self.ideal,
            "generators": [g.to_dict() for g in self.generators],
            "section": self.section.text(),
        }


def _opposite_rays(a: Root, b: Root) -> bool:
    for k in range(1, 4):
        for m in range(1, 4):
            if all(m * x == -k * y for x, y in zip(a, b)):
                return True
    return False


def load_group(label: str, J: Sequence[int] | None = None, gamma=(), rep: str = "adjoint") -> RelativeGroup:
    """Cached RelativeGroup for a type label, surviving nodes J (None = all) and representation."""
    rd = build_root_system(label)
    J = tuple(range(1, rd.rank + 1)) if J is None else tuple(sorted(set(int(j) for j in J)))
    gamma = tuple(tuple(int(x) for x in p) for p in gamma)
    return _group_for(rd.label, J, gamma, rep)


@lru_cache(maxsize=None)
def _group_for(label: str, J: tuple, gamma: tuple, rep: str) -> RelativeGroup:
    rd = build_root_system(label)
    if J == tuple(range(1, rd.rank + 1)) and not gamma:
        rrd = split_datum(rd)
    else:
        rrd = relative_datum(label, J, gamma)
    return RelativeGroup(rrd, representation(label, rep))
