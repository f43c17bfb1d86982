"""
conjugation.py — Rewriting a·x_β(v)·a⁻¹ as a word of root letters.

Type A goes through the natural representation and Suslin's splitting of a
transvection into elementary ones; every other type expands letter by letter
with the Chevalley commutator formula.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from models.word import RelLetter, RootLetter, TorusLetter, Word
from modules.chevgrp import (
    Representation,
    derive_commutator_constants,
    natural_representation,
    proportional,
)
from modules.errors import RejectedInput
from modules.matrices import Mat
from modules.rings import LaurentPoly, LaurentRing, Localization
from modules.rootsys import Root

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Balance:
    """Uniformizer π of a localization; λ = π^e keeps denominators of new letters in check."""

    loc: Localization
    pi: object

    def power(self, ring: LaurentRing, values: Sequence[LaurentPoly], factor: int = 1) -> LaurentPoly:
        e = 0
        for v in values:
            if v:
                e = max(e, -self.loc.poly_valuation(v, self.pi))
        if not e:
            return ring.one
        return ring.constant(self.pi ** (e * factor))


def _neg(r: Root) -> Root:
    return tuple(-x for x in r)


def _add(a: Root, b: Root) -> Root:
    return tuple(x + y for x, y in zip(a, b))


def commutes(rd, a: Root, b: Root) -> bool:
    """x_a(s) and x_b(t) commute for all s, t."""
    if a == b:
        return True
    return a != _neg(b) and not rd.is_root(_add(a, b))


# ── Type A: Suslin's transvection splitting ──────────────────────────────────

def _elementary_table(rep: Representation) -> dict:
    """(i, j) -> (root, sign) with ρ(e_root) = sign·E_ij."""
    table = {}
    for root, gen in rep.generators.items():
        (ij, sign), = gen.items()
        table[ij] = (root, sign)
    return table


def elementary_letter(rep: Representation, i: int, j: int, b: LaurentPoly) -> RootLetter:
    """The root letter whose natural matrix is I + b·E_ij."""
    root, sign = _elementary_table(rep)[(i, j)]
    return RootLetter(root, b if sign == 1 else -b)


def transvection_letters(
    rep: Representation,
    a: Mat,
    a_inv: Mat,
    i: int,
    j: int,
    t: LaurentPoly,
    balance: Balance | None = None,
) -> list[RootLetter]:
    """a·(I + t·E_ij)·a⁻¹ = I + t·u·w as a product of elementary letters."""
    n = rep.dim
    if n < 3:
        raise RejectedInput("transvection splitting needs SL_n with n >= 3")
    ring = t.ring
    u = [a[k, i] for k in range(n)]
    w = [a_inv[j, k] for k in range(n)]
    r = [a_inv[i, k] for k in range(n)]
    letters: list[RootLetter] = []
    for p in range(n):
        for q in range(p + 1, n):
            c = w[p] * r[q] - w[q] * r[p]
            if not c:
                continue
            b = t * c
            # columns p and q: rows outside {p, q} first
            for k in range(n):
                if k in (p, q) or not u[k]:
                    continue
                if u[q]:
                    letters.append(elementary_letter(rep, k, p, b * u[k] * u[q]))
                if u[p]:
                    letters.append(elementary_letter(rep, k, q, -(b * u[k] * u[p])))
            if not (u[p] or u[q]):
                continue
            m = next(k for k in range(n) if k not in (p, q))
            lam = balance.power(ring, (u[p], u[q])) if balance else ring.one
            mu = b * lam.inverse()
            A = [elementary_letter(rep, p, m, lam * u[p]), elementary_letter(rep, q, m, lam * u[q])]
            B = [elementary_letter(rep, m, p, mu * u[q]), elementary_letter(rep, m, q, -(mu * u[p]))]
            letters.extend(A + B)
            letters.extend(l.inverse() for l in A)
            letters.extend(l.inverse() for l in B)
    return [l for l in letters if not l.is_trivial()]


# ── Other types: commutator expansion ────────────────────────────────────────

def conjugate_root(
    cb,
    gamma: Root,
    c: LaurentPoly,
    beta: Root,
    v: LaurentPoly,
    balance: Balance | None = None,
) -> list[RootLetter]:
    """x_γ(c)·x_β(v)·x_γ(−c) as root letters."""
    rd = cb.rd
    if not c or not v:
        return [RootLetter(beta, v)] if v else []
    if commutes(rd, gamma, beta):
        return [RootLetter(beta, v)]
    if beta != _neg(gamma):
        out = []
        for (i, j), C in sorted(derive_commutator_constants(cb, gamma, beta).items(),
                                key=lambda kv: (sum(kv[0]), kv[0][0])):
            root = tuple(i * x + j * y for x, y in zip(gamma, beta))
            out.append(RootLetter(root, (c ** i * v ** j).scale(C)))
        out.append(RootLetter(beta, v))
        return out
    delta, eps, table = _opposite_split(cb, beta)
    ring = v.ring
    lam = balance.power(ring, (c,), factor=3) if balance else ring.one
    a = (v * lam.inverse()).scale(Fraction(1, table[(1, 1)]))
    rewritten = [RootLetter(delta, a), RootLetter(eps, lam), RootLetter(delta, -a), RootLetter(eps, -lam)]
    rest = []
    for (i, j), C in sorted(table.items(), key=lambda kv: (sum(kv[0]), kv[0][0])):
        if (i, j) == (1, 1):
            continue
        root = tuple(i * x + j * y for x, y in zip(delta, eps))
        rest.append(RootLetter(root, (a ** i * lam ** j).scale(C)))
    rewritten.extend(l.inverse() for l in reversed(rest))
    out = []
    for letter in rewritten:
        out.extend(conjugate_root(cb, gamma, c, letter.root, letter.param, balance))
    return out


def _opposite_split(cb, beta: Root) -> tuple[Root, Root, dict]:
    """β = δ + ε with δ, ε roots off the line of β, preferring a one-term commutator."""
    rd = cb.rd
    best = None
    for delta in rd.roots:
        eps = tuple(b - d for b, d in zip(beta, delta))
        if not rd.is_root(eps) or proportional(delta, beta) or proportional(eps, beta):
            continue
        table = derive_commutator_constants(cb, delta, eps)
        if not table.get((1, 1)):
            continue
        score = (len(table), abs(table[(1, 1)]))
        if best is None or score < best[0]:
            best = (score, delta, eps, table)
    if best is None:
        raise RejectedInput(f"root {list(beta)} is not a sum of two non-proportional roots (rank 1?)")
    _, delta, eps, table = best
    return delta, eps, table


# ── Public API ───────────────────────────────────────────────────────────────

def _absolute(group, word: Word) -> Word:
    if any(isinstance(l, RelLetter) for l in word.letters):
        return group.expand_word(word)
    return word


def conjugate_letter(group, a: Word, letter, balance: Balance | None = None) -> Word:
    """a·letter·a⁻¹ as a word of absolute root letters over a's ring."""
    ring = a.ring
    cb = group.cb
    rd = cb.rd
    a = _absolute(group, a)
    inner = _absolute(group, Word(ring, (letter,)).to_ring(ring))
    if any(isinstance(l, TorusLetter) for l in inner.letters):
        raise RejectedInput("only root letters can be conjugated")
    if all(isinstance(l, RootLetter) and commutes(rd, l.root, x.root)
           for l in a.letters for x in inner.letters):
        return inner
    if rd.letter == "A" and rd.rank >= 2:
        nat = natural_representation(cb)
        a_mat = nat.evaluate(a)
        a_inv = nat.evaluate(a.inverse())
        letters: list = []
        for x in inner.letters:
            (i, j), sign = next(iter(nat.generator(x.root).items()))
            t = x.param if sign == 1 else -x.param
            letters.extend(transvection_letters(nat, a_mat, a_inv, i, j, t, balance))
        return Word(ring, tuple(letters)).simplify()
    current = list(inner.letters)
    for conj in reversed(a.letters):
        nxt: list = []
        for x in current:
            if isinstance(conj, TorusLetter):
                e = sum(b * c for b, c in zip(x.root, conj.cochar))
                u = conj.unit if e >= 0 else conj.unit.inverse()
                nxt.append(RootLetter(x.root, x.param * u ** abs(e)))
            else:
                nxt.extend(conjugate_root(cb, conj.root, conj.param, x.root, x.param, balance))
        current = list(Word(ring, tuple(nxt)).simplify().letters)
    return Word(ring, tuple(current))


def conjugate_word(group, a: Word, w: Word, balance: Balance | None = None) -> Word:
    """a·w·a⁻¹ letterwise."""
    out = Word(a.ring)
    for letter in _absolute(group, w.to_ring(a.ring)).letters:
        out = out * conjugate_letter(group, a, letter, balance)
    logger.debug(f"conjugated {len(w)} letters by a word of length {len(a)} into {len(out)} letters")
    return out.simplify()
