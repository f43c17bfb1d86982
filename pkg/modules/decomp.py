"""
decomp.py — Denominator-clearing decompositions over localizations of k[Y].

dilation_shrink   F_s(h(Z)) = g(s^k Z) with h over A[Z]
shift_congruence  g(aX)·g(bX)⁻¹ over A[X] when a ≡ b mod s^k
suslin_factor     x = F_g(x₁)·F_f(x₂) for comaximal f, g
excision_split    x = F_h(y)·z with y over A and z over B_h
quillen_patch     glue two local words for the same x ≡ 1 mod X

All of them go through the congruence normal form of relgrp and the
conjugation engine; every result is checked by exact evaluation.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import config
from models.certificate import Certificate, CertificatePart
from models.word import RelLetter, RootLetter, TorusLetter, Word
from modules.chevgrp import Representation
from modules.conjugation import Balance, conjugate_word
from modules.errors import BudgetExhausted, IsoK1Error, RejectedInput
from modules.euclid import first_order_word
from modules.matrices import Mat
from modules.relgrp import RelativeGroup
from modules.rings import LaurentPoly, LaurentRing, Localization
from modules.verify import seal

logger = logging.getLogger(__name__)


# ── Helpers ──────────────────────────────────────────────────────────────────

def fresh_variable(ring: LaurentRing, stem: str) -> str:
    taken = set(ring.variables) | set(ring.base)
    if stem not in taken:
        return stem
    i = 1
    while f"{stem}{i}" in taken:
        i += 1
    return f"{stem}{i}"


def base_scalar(ring: LaurentRing, value):
    """A coefficient-field element from text, a constant polynomial or a number."""
    if isinstance(value, str):
        value = ring.parse(value)
    if isinstance(value, LaurentPoly):
        if not value.is_constant():
            raise RejectedInput(f"{value} is not a constant of {ring.describe()}")
        return value.constant_term()
    return ring.scalar(value)


def _bases_text(ring: LaurentRing, bases: Sequence) -> list[str]:
    out = []
    for b in bases:
        out.append(b if isinstance(b, str) else ring.format_scalar(base_scalar(ring, b)))
    return out


def denominators_pattern(ring: LaurentRing, bases: Sequence) -> str:
    return "denominators:" + ",".join(_bases_text(ring, bases))


def _in_localization(loc: Localization, word: Word) -> bool:
    return all(loc.contains_poly(p) for p in word.params())


def _length_cap(group: RelativeGroup, n_input: int) -> int:
    return max(1, int(config.WORD_LENGTH_FACTOR * max(1, n_input) * group.rep.dim ** 2
                      * config.BUDGET_SCALE))


def _scale_letters(word: Word, factor: LaurentPoly, ring: LaurentRing) -> Word:
    if any(isinstance(l, TorusLetter) for l in word.letters):
        raise RejectedInput("torus letters cannot be rescaled; use a word of root letters")
    return word.to_ring(ring).map_params(lambda p: p * factor)


# ── Dilation shrink ──────────────────────────────────────────────────────────

@dataclass(frozen=True)
class ShrinkResult:
    h: Word
    k: int
    s: object
    var: str


def dilation_shrink(group: RelativeGroup, g: Word, var: str, s, allowed: Sequence = ()) -> ShrinkResult:
    """Find the least k ≤ SHRINK_LIMIT with g(s^k·var) = F_s(h) for h over A[var]."""
    if group.rrd.rank < 2:
        raise RejectedInput(
            f"isotropic rank {group.rrd.rank} < 2: shrinking needs a parabolic of rank >= 2"
        )
    ring = g.ring
    s = base_scalar(ring, s)
    loc = Localization.of(ring, *allowed)
    cnf = group.congruence_normal_form(g, var)
    if _in_localization(loc, g):
        return ShrinkResult(g, 0, s, var)

    S = fresh_variable(ring, "S")
    ext = ring.extend([S])
    scaled_var = ext.gen(S) * ext.gen(var)
    balance = Balance(loc, s)
    body = Word(ext)
    for gen in cnf.generators:
        inner = gen.inner.to_ring(ext).substitute({var: scaled_var}, ext)
        body = body * conjugate_word(group, gen.conjugator.to_ring(ext), inner, balance)
    logger.debug(f"shrink body for {len(cnf.generators)} generators: {len(body)} letters")

    def attempt(k: int) -> Word | None:
        h = body.substitute({S: s ** k}, ring).simplify()
        return h if _in_localization(loc, h) else None

    found, previous = None, -1
    for k in (0,) + tuple(config.SHRINK_SCHEDULE):
        if k <= previous:
            continue
        h = attempt(k)
        if h is not None:
            found = (k, h)
            break
        previous = k
    if found is None:
        raise BudgetExhausted(
            f"no dilation exponent up to {config.SHRINK_LIMIT} clears the denominators",
            transcript={"schedule": list(config.SHRINK_SCHEDULE)},
        )
    k, h = found
    for smaller in range(previous + 1, k):
        h_small = attempt(smaller)
        if h_small is not None:
            k, h = smaller, h_small
            break

    if len(h) > _length_cap(group, len(g)):
        raise BudgetExhausted(f"shrunk word has {len(h)} letters, over the length budget")
    target = g.substitute({var: ring.gen(var).scale(s ** k)}, ring)
    if group.evaluate(h) != group.evaluate(target):
        raise IsoK1Error("shrunk word does not reproduce the dilated input")
    logger.info(f"dilation shrink: k={k}, {len(h)} letters")
    return ShrinkResult(h, k, s, var)


# ── Shift ────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class ShiftPlan:
    ring: LaurentRing
    var: str
    s: object
    allowed: tuple
    k: int
    h: Word
    y: str
    z: str


def prepare_shift(group: RelativeGroup, g: Word, var: str, s, allowed: Sequence = ()) -> ShiftPlan:
    """Shrink f(Z) = g(X(y+Z))·g(Xy)⁻¹ once; apply_shift then serves any a ≡ b mod s^k."""
    ring = g.ring
    if var not in ring.variables or var in ring.laurent:
        raise RejectedInput(f"{var} must be a polynomial variable of {ring.describe()}")
    y = fresh_variable(ring, "y")
    z = fresh_variable(ring.extend([y]), "z")
    ext = ring.extend([y, z])
    X, Y, Z = ext.gen(var), ext.gen(y), ext.gen(z)
    gx = g.to_ring(ext)
    f = gx.substitute({var: X * (Y + Z)}, ext) * gx.substitute({var: X * Y}, ext).inverse()
    res = dilation_shrink(group, f, z, s, allowed)
    return ShiftPlan(ring, var, res.s, tuple(allowed), res.k, res.h, y, z)


def apply_shift(plan: ShiftPlan, a, b) -> Word:
    ring = plan.ring
    a, b = base_scalar(ring, a), base_scalar(ring, b)
    if a == b:
        return Word(ring)
    loc = Localization.of(ring, *plan.allowed)
    c = (a - b) / plan.s ** plan.k
    if not loc.contains(c):
        raise RejectedInput(
            f"a - b is not divisible by s^{plan.k} in {loc.describe()}",
            residue=ring.format_scalar(c),
        )
    if not loc.contains(b):
        raise RejectedInput(f"b = {ring.format_scalar(b)} is not in {loc.describe()}")
    return plan.h.substitute({plan.y: b, plan.z: c}, ring).simplify()


@dataclass(frozen=True)
class ShiftResult:
    word: Word
    k: int


def shift_congruence(group: RelativeGroup, g: Word, var: str, s, a, b,
                     allowed: Sequence = ()) -> ShiftResult:
    """g(aX)·g(bX)⁻¹ as a word over A[X]."""
    ring = g.ring
    if base_scalar(ring, a) == base_scalar(ring, b):
        return ShiftResult(Word(ring), 0)
    plan = prepare_shift(group, g, var, s, allowed)
    return ShiftResult(apply_shift(plan, a, b), plan.k)


def _dilate(word: Word, var: str, c, ring: LaurentRing) -> Word:
    return word.substitute({var: ring.gen(var).scale(c)}, ring)


# ── Patching two local words ─────────────────────────────────────────────────

@dataclass(frozen=True)
class PatchResult:
    first: Word
    second: Word
    K: int
    bezout: tuple = field(default=())


def patch_pair(group: RelativeGroup, var: str, w_first: Word, s1, allowed_first: Sequence,
               w_second: Word, s2, allowed_second: Sequence, allowed_common: Sequence = ()) -> PatchResult:
    """w(X) = [w₁(X)·w₁(bX)⁻¹]·[w₂(bX)·w₂(0)⁻¹] with b = s₂^K·t', s₁^K s' + s₂^K t' = 1."""
    ring = w_first.ring
    s1, s2 = base_scalar(ring, s1), base_scalar(ring, s2)
    common = Localization.of(ring, *allowed_common)
    common.bezout(s1, s2, 1)
    plan1 = prepare_shift(group, w_first, var, s1, allowed_first)
    plan2 = prepare_shift(group, w_second, var, s2, allowed_second)
    K = max(plan1.k, plan2.k)
    sp, tp = common.bezout(s1, s2, K)
    b = s2 ** K * tp
    first = apply_shift(plan1, 1, b)
    second = apply_shift(plan2, b, 0)
    logger.info(f"patched with K={K} (shift exponents {plan1.k}, {plan2.k})")
    return PatchResult(first, second, K, (sp, tp))


# ── Suslin factorization ─────────────────────────────────────────────────────

@dataclass(frozen=True)
class SuslinResult:
    x1: Word
    x2: Word
    K: int = 0


def _split_letter(loc: Localization, letter, f, g):
    def parts(p: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
        pf = p.map_coefficients(lambda c: loc.partial_fractions(c, f, g)[0])
        return pf, p - pf

    if isinstance(letter, RootLetter):
        a, b = parts(letter.param)
        return RootLetter(letter.root, a), RootLetter(letter.root, b)
    pieces = [parts(p) for p in letter.params]
    return (RelLetter(letter.root, tuple(a for a, _ in pieces)),
            RelLetter(letter.root, tuple(b for _, b in pieces)))


def suslin_factor(group: RelativeGroup, x: Word, f, g, allowed: Sequence = ()) -> SuslinResult:
    """x over A_fg as F_g(x₁)·F_f(x₂) with x₁ over A_f and x₂ over A_g."""
    ring = x.ring
    if not ring.base:
        raise RejectedInput("suslin_factor needs a rational-function base such as Q(Y)")
    F, G = base_scalar(ring, f), base_scalar(ring, g)
    loc = Localization.of(ring, *allowed)
    loc.bezout(F, G, 1)
    loc_fg = Localization.of(ring, *allowed, F, G)
    if not _in_localization(loc_fg, x):
        raise RejectedInput(f"word has denominators outside {loc_fg.describe()}")
    if _in_localization(loc, x):
        return SuslinResult(x, Word(ring))
    if len(x) == 1 and not allowed and not isinstance(x.letters[0], TorusLetter):
        letter = x.letters[0]
        single = isinstance(letter, RootLetter) or group.rrd.multiple(letter.root) == 1
        if single:
            a, b = _split_letter(loc, letter, F, G)
            return SuslinResult(Word(ring, (a,)).simplify(), Word(ring, (b,)).simplify())

    X = fresh_variable(ring, "X")
    ext = ring.extend([X])
    xX = _scale_letters(x, ext.gen(X), ext)
    patch = patch_pair(group, X, xX, G, tuple(allowed) + (F,), xX, F, tuple(allowed) + (G,), allowed)
    x1 = patch.first.substitute({X: 1}, ring).simplify()
    x2 = patch.second.substitute({X: 1}, ring).simplify()
    return SuslinResult(x1, x2, patch.K)


def excision_split(group: RelativeGroup, x: Word, h, a_bases: Sequence = ()) -> SuslinResult:
    """x over A_h as F_h(y)·z, y over A = B[1/a_bases] and z over B_h (B = k[Y])."""
    ring = x.ring
    if not a_bases:
        return SuslinResult(Word(ring), x)
    a = ring.one.constant_term()
    for b in a_bases:
        a = a * base_scalar(ring, b)
    return suslin_factor(group, x, a, h)


def quillen_patch(group: RelativeGroup, var: str, a, w_a: Word, b, w_b: Word) -> Word:
    """Two words for one x ≡ 1 mod var, over A_a[var] and A_b[var], glued over A[var]."""
    if group.evaluate(w_a) != group.evaluate(w_b.to_ring(w_a.ring)):
        raise RejectedInput("the two local words evaluate to different matrices")
    patch = patch_pair(group, var, w_a, a, (), w_b.to_ring(w_a.ring), b, ())
    return (patch.first * patch.second).simplify()


# ── Congruence split ─────────────────────────────────────────────────────────

def split_congruence(rep: Representation, M: Mat, nil: str, var: str) -> tuple[Word, Word]:
    """I + tN = (I + tP)·(I + tQ) with P the var-exponent ≥ 0 part of N and Q the rest."""
    ring = M.ring
    if not M.reduce(nil).is_identity():
        raise RejectedInput(f"matrix is not congruent to 1 modulo ({nil})")
    t = ring.gen(nil)
    N = (M - Mat.identity(ring, M.nrows)).map(lambda p: p.part(nil, 1))
    P = N.map(lambda p: p.split_by_sign(var)[0])
    Q = N.map(lambda p: p.split_by_sign(var)[1])
    return first_order_word(rep, P, t), first_order_word(rep, Q, t)


# ── Certificates ─────────────────────────────────────────────────────────────

def shrink_certificate(group: RelativeGroup, g: Word, var: str, s, allowed: Sequence = ()) -> Certificate:
    res = dilation_shrink(group, g, var, s, allowed)
    ring = g.ring
    cert = Certificate(
        statement="shrink",
        group=group.describe(),
        ring=ring,
        input_word=_dilate(g, var, res.s ** res.k, ring),
        parts=[CertificatePart("h", ring, f"{denominators_pattern(ring, allowed)};congruent:{var}",
                               word=res.h)],
        data={"k": res.k, "s": ring.format_scalar(res.s), "word": g.text()},
    )
    return seal(cert)


def shift_certificate(group: RelativeGroup, g: Word, var: str, s, a, b,
                      allowed: Sequence = ()) -> Certificate:
    res = shift_congruence(group, g, var, s, a, b, allowed)
    ring = g.ring
    a_, b_ = base_scalar(ring, a), base_scalar(ring, b)
    target = _dilate(g, var, a_, ring) * _dilate(g, var, b_, ring).inverse()
    cert = Certificate(
        statement="shift",
        group=group.describe(),
        ring=ring,
        input_word=target,
        parts=[CertificatePart("shift", ring, denominators_pattern(ring, allowed), word=res.word)],
        data={"k": res.k, "a": ring.format_scalar(a_), "b": ring.format_scalar(b_),
              "s": ring.format_scalar(base_scalar(ring, s)), "word": g.text()},
    )
    return seal(cert)


def suslin_certificate(group: RelativeGroup, x: Word, f, g, allowed: Sequence = ()) -> Certificate:
    res = suslin_factor(group, x, f, g, allowed)
    ring = x.ring
    cert = Certificate(
        statement="suslin",
        group=group.describe(),
        ring=ring,
        input_word=x,
        parts=[
            CertificatePart("x1", ring, denominators_pattern(ring, tuple(allowed) + (f,)), word=res.x1),
            CertificatePart("x2", ring, denominators_pattern(ring, tuple(allowed) + (g,)), word=res.x2),
        ],
        data={"K": res.K},
    )
    return seal(cert)


def excision_certificate(group: RelativeGroup, x: Word, h, a_bases: Sequence = ()) -> Certificate:
    res = excision_split(group, x, h, a_bases)
    ring = x.ring
    cert = Certificate(
        statement="excision",
        group=group.describe(),
        ring=ring,
        input_word=x,
        parts=[
            CertificatePart("y", ring, denominators_pattern(ring, a_bases), word=res.x1),
            CertificatePart("z", ring, denominators_pattern(ring, (h,)), word=res.x2),
        ],
        data={"K": res.K},
    )
    return seal(cert)


def patch_certificate(group: RelativeGroup, var: str, a, w_a: Word, b, w_b: Word) -> Certificate:
    word = quillen_patch(group, var, a, w_a, b, w_b)
    ring = w_a.ring
    cert = Certificate(
        statement="patch",
        group=group.describe(),
        ring=ring,
        input_word=w_a,
        parts=[CertificatePart("patched", ring, f"{denominators_pattern(ring, ())};congruent:{var}",
                               word=word)],
    )
    return seal(cert)
