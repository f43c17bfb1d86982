"""
laurent.py — E(A[X,X⁻¹]) = E(A[X])·E(A[X⁻¹])·E(A[X]), A a field or dual numbers.

SL_n, field case: find P ∈ E(k[X]) such that h = P·g factors as N⁻¹·Q with N ∈ SL_n(k[X⁻¹])
and Q ∈ SL_n(k[X]).  The rows of N span {r ∈ k[X⁻¹]ⁿ : r·h ∈ k[X]ⁿ}, a finite
dimensional k-space read off as a nullspace.  Then g = P⁻¹·N⁻¹·Q and each factor
is written as a word by column Euclid.

Dual numbers: split g mod t first, then push the first-order correction into the
two outer factors.

Other split types with m₁(α̃) = 1 go through σ. A maximal run of letters
x_β(c·X^j) sharing j·m₁(β) = s is σ^s of a constant word C; a Gauss
decomposition of C in the grading by m₁ turns the run into
(poly)(inverse)(constant)(poly), and the rewritten word is read as three blocks.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass

from sympy.polys.matrices import DomainMatrix

import config
from models.certificate import Certificate, CertificatePart
from models.word import RootLetter, Word
from modules.chevgrp import Representation
from modules.conjugation import elementary_letter
from modules.decomp import split_congruence
from modules.errors import BudgetExhausted, RejectedInput
from modules.euclid import diagonal_word, elementary_reduce, first_order_word, natural_rep
from modules.gauss import gauss_decompose
from modules.matrices import Mat
from modules.relgrp import RelativeGroup, load_group
from modules.rings import LaurentPoly, LaurentRing
from modules.rootsys import pick_alpha1
from modules.verify import seal

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LaurentSplit:
    plus: Word
    minus: Word
    plus2: Word
    attempts: int = 0


# ── Exponent patterns ────────────────────────────────────────────────────────

def _exponents(p: LaurentPoly, var: str) -> list[int]:
    i = p.ring.variables.index(var)
    return [m[i] for m in p.terms]


def _letter_sign(letter, var: str) -> int:
    """1 if every exponent of var is ≥ 0, −1 if every one is ≤ 0, 0 if mixed."""
    exps = [e for p in letter.params for e in _exponents(p, var)]
    if all(e >= 0 for e in exps):
        return 1
    if all(e <= 0 for e in exps):
        return -1
    return 0


def ordered_split(word: Word, var: str, blocks: int = 3) -> tuple[Word, ...] | None:
    """Read w as (poly)(inverse)(poly) or, with blocks=2, as (poly)(inverse); None otherwise."""
    ring = word.ring
    wanted = (1, -1, 1)[:blocks]
    parts: list[list] = [[] for _ in wanted]
    k = 0
    for letter in word.letters:
        sign = _letter_sign(letter, var)
        while k < len(wanted) and sign != 0 and not _fits(letter, var, wanted[k]):
            k += 1
        if k == len(wanted) or sign == 0:
            return None
        parts[k].append(letter)
    return tuple(Word(ring, tuple(p)) for p in parts)


def _fits(letter, var: str, sign: int) -> bool:
    exps = [e for p in letter.params for e in _exponents(p, var)]
    return all(e * sign >= 0 for e in exps)


def min_exponent(M: Mat, var: str) -> int:
    return min((min(_exponents(v, var)) for v in M.entries()), default=0)


def _check_type_a(group: RelativeGroup) -> Representation:
    rd = group.rd
    if rd.letter != "A" or rd.rank < 2:
        if group.rrd.rank >= 1:
            try:
                _, coeff = pick_alpha1(group.rrd)
            except RejectedInput:
                coeff = 1
            if coeff == 2:
                raise RejectedInput(
                    "m₁(α̃) = 2: the three-factor Laurent split is not constructive in this regime"
                )
        raise RejectedInput(f"laurent_split is constructive for SL_n, n >= 3 only, not {rd.label}")
    return natural_rep(rd.rank + 1)


# ── Birkhoff rows ────────────────────────────────────────────────────────────

def birkhoff_rows(h: Mat, h_inv: Mat, var: str) -> Mat | None:
    """N ∈ SL_n(k[X⁻¹]) with N·h ∈ SL_n(k[X]), or None if h is outside the big cell."""
    ring = h.ring
    n = h.nrows
    if min_exponent(h, var) >= 0:
        return Mat.identity(ring, n)
    m = max(0, -min_exponent(h_inv, var))
    lo = min_exponent(h, var) - m
    K = ring.domain
    idx = ring.variables.index(var)
    coeff = [[{} for _ in range(n)] for _ in range(n)]
    for i, row in enumerate(h.rows):
        for c, v in row.items():
            for mono, x in v.terms.items():
                coeff[i][c][mono[idx]] = x
    unknowns = n * (m + 1)
    constraints = []
    for c in range(n):
        for e in range(lo, 0):
            row = [K.zero] * unknowns
            nonzero = False
            for j in range(m + 1):
                for i in range(n):
                    x = coeff[i][c].get(e + j)
                    if x:
                        row[j * n + i] = x
                        nonzero = True
            if nonzero:
                constraints.append(row)
    if not constraints:
        return None
    basis = DomainMatrix.from_list(constraints, K).nullspace().to_list()
    if len(basis) != n:
        return None
    rows = []
    for vec in basis:
        entries = {}
        for i in range(n):
            terms = {}
            for j in range(m + 1):
                x = vec[j * n + i]
                if x:
                    mono = [0] * len(ring.variables)
                    mono[idx] = -j
                    terms[tuple(mono)] = x
            p = ring.from_terms(terms)
            if p:
                entries[i] = p
        rows.append(entries)
    N = Mat(ring, n, n, rows)
    det = N.det()
    if not det or not det.is_constant():
        return None
    scale = det.inverse()
    N.rows[0] = {j: v * scale for j, v in N.rows[0].items()}
    return N


# ── Words for one-sided matrices ─────────────────────────────────────────────

def polynomial_word(rep: Representation, M: Mat, var: str) -> Word:
    """M ∈ SL_n(k[X]) as elementary letters."""
    D, word = elementary_reduce(M, var, rep)
    return Word(M.ring, tuple(diagonal_word(rep, [D[i, i] for i in range(M.nrows)]))) * word


def inverse_polynomial_word(rep: Representation, M: Mat, var: str) -> Word:
    """M ∈ SL_n(k[X⁻¹]) via X ↦ X⁻¹, Euclid, and back."""
    ring = M.ring
    flip = {var: ring.gen(var).inverse()}
    word = polynomial_word(rep, M.substitute(flip), var)
    return word.substitute(flip, ring)


def _random_polynomial_word(rep: Representation, ring: LaurentRing, var: str, rng: random.Random,
                            rounds: int, degree: int) -> Word:
    n = rep.dim
    span = ring.characteristic or 5
    X = ring.gen(var)
    letters = []
    for _ in range(rounds):
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                p = ring.zero
                for e in range(degree + 1):
                    c = rng.randrange(-span // 2, span // 2 + 1)
                    if c:
                        p = p + (X ** e).scale(c)
                if p:
                    letters.append(elementary_letter(rep, i, j, p))
    return Word(ring, tuple(letters))


def _prefix(word: Word, var: str, sign: int) -> Word:
    letters = []
    for letter in word.letters:
        if not _fits(letter, var, sign):
            break
        letters.append(letter)
    return Word(word.ring, tuple(letters))


def field_split(rep: Representation, g: Mat, var: str, hint: Word | None = None,
                seed: int | None = None, tries: int | None = None) -> LaurentSplit:
    """g ∈ SL_n(k[X,X⁻¹]) as P⁻¹·N·Q with word factors."""
    ring = g.ring
    seed = config.SEED if seed is None else seed
    tries = config.LAURENT_SEARCH_TRIES if tries is None else tries
    g_inv = g.inverse()
    candidates = [Word(ring)]
    if hint is not None and not hint.is_empty:
        prefix = _prefix(hint, var, 1)
        if not prefix.is_empty:
            candidates.append(prefix.inverse())
    for attempt in range(tries + len(candidates)):
        if attempt < len(candidates):
            P = candidates[attempt]
        else:
            a = attempt - len(candidates)
            rng = random.Random(seed * 7919 + a)
            P = _random_polynomial_word(rep, ring, var, rng, 1 + a // 6, 1 + (a // 2) % 3)
        h = rep.evaluate(P) * g
        h_inv = g_inv * rep.evaluate(P.inverse())
        N_inv = birkhoff_rows(h, h_inv, var)
        if N_inv is None:
            continue
        Q = N_inv * h
        if min_exponent(Q, var) < 0:
            continue
        N = h * rep.evaluate(polynomial_word(rep, Q, var).inverse())
        if any(e > 0 for v in N.entries() for e in _exponents(v, var)):
            continue
        minus = inverse_polynomial_word(rep, N, var)
        plus2 = polynomial_word(rep, Q, var)
        logger.info(f"laurent split found after {attempt + 1} candidate(s)")
        return LaurentSplit(P.inverse(), minus, plus2, attempt + 1)
    raise BudgetExhausted(f"no E(k[X]) factor put g into the big cell within {tries} tries")


def dual_split(rep: Representation, g: Mat, var: str, nil: str, hint: Word | None = None,
               seed: int | None = None) -> LaurentSplit:
    """g over (k[t]/t²)[X,X⁻¹]: split g mod t, then absorb M·M₀⁻¹ = I + tK."""
    ring = g.ring
    flat = ring.drop([nil])
    g0 = g.substitute({nil: 0}, flat)
    flat_hint = hint.substitute({nil: 0}, flat) if hint is not None else None
    base = field_split(rep, g0, var, flat_hint, seed)
    t = ring.gen(nil)
    ident = Mat.identity(ring, g.nrows)
    W_plus = rep.evaluate(base.plus.to_ring(ring))
    M0 = rep.evaluate((base.plus * base.minus * base.plus2).to_ring(ring))
    M0_inv = rep.evaluate((base.plus * base.minus * base.plus2).inverse().to_ring(ring))
    Kmat = (g * M0_inv - ident).map(lambda p: p.part(nil, 1))
    K_plus = Kmat.map(lambda p: p.split_by_sign(var)[0])
    K_minus = Kmat.map(lambda p: p.split_by_sign(var)[1])
    A = rep.evaluate(base.plus.inverse().to_ring(ring)) * K_minus * W_plus
    A_plus = A.map(lambda p: p.split_by_sign(var)[0])
    A_minus = A.map(lambda p: p.split_by_sign(var)[1])
    plus = first_order_word(rep, K_plus, t) * base.plus.to_ring(ring) * first_order_word(rep, A_plus, t)
    minus = first_order_word(rep, A_minus, t) * base.minus.to_ring(ring)
    return LaurentSplit(plus, minus, base.plus2.to_ring(ring), base.attempts)


# ── σ-runs ───────────────────────────────────────────────────────────────────

def split_mixed(word: Word, var: str) -> Word:
    """Split root letters with mixed var-exponents in the order the running block needs.

    Before the first negative exponent x_β(u) becomes x_β(u₊)·x_β(u₋); after it,
    x_β(u₋)·x_β(u₊).
    """
    letters = []
    seen_minus = False
    for letter in word.letters:
        if isinstance(letter, RootLetter) and _letter_sign(letter, var) == 0:
            plus, minus = letter.param.split_by_sign(var)
            pair = [RootLetter(letter.root, plus), RootLetter(letter.root, minus)]
            letters.extend(reversed(pair) if seen_minus else pair)
            seen_minus = True
            continue
        if not _fits(letter, var, 1):
            seen_minus = True
        letters.append(letter)
    return Word(word.ring, tuple(letters))


def _monomial_letters(letter: RootLetter, var: str) -> list[RootLetter]:
    """x_β(u) as a product of x_β(c_j·X^j), one letter per exponent j."""
    by_exp: dict[int, LaurentPoly] = {}
    for m in letter.param.monomials():
        j = m.min_degree(var)
        by_exp[j] = by_exp[j] + m if j in by_exp else m
    return [RootLetter(letter.root, by_exp[j]) for j in sorted(by_exp)]


_BREAK = object()


def _shift(group: RelativeGroup, letter, var: str, node: int):
    """s with letter = σ^s(constant letter); None if σ fixes it, _BREAK if no s exists."""
    if not isinstance(letter, RootLetter):
        return _BREAK
    j = letter.param.min_degree(var) or 0
    d = group.relative_root_of(letter)[node - 1]
    if d == 0:
        return None if j == 0 else _BREAK
    return j * d


def sigma_runs(group: RelativeGroup, letters, var: str, node: int) -> list[tuple[int | None, list]]:
    """Maximal runs of monomial letters sharing one σ-shift."""
    runs: list[tuple[int | None, list]] = []
    shift, current = None, []
    for letter in letters:
        s = _shift(group, letter, var, node)
        if s is _BREAK:
            if current:
                runs.append((shift, current))
            runs.append((None, [letter]))
            shift, current = None, []
        elif s is None or s == shift or shift is None:
            if s is not None:
                shift = s
            current.append(letter)
        else:
            runs.append((shift, current))
            shift, current = s, [letter]
    if current:
        runs.append((shift, current))
    return runs


def _rewrite_run(group: RelativeGroup, grading: RelativeGroup, run: Word, shift: int | None,
                 var: str, node: int, seed: int | None) -> tuple[Word, int]:
    """σ^s(C) as σ^s(u₁)·σ^s(u₂)·l·σ^s(u₃) from a Gauss decomposition of C."""
    if not shift or all(_fits(l, var, 1) for l in run.letters) or all(_fits(l, var, -1) for l in run.letters):
        return run, 0
    ring = run.ring
    flat = ring.drop([var])
    C = group.sigma_apply(run, -shift, var, node).substitute({var: 1}, flat)
    f = gauss_decompose(grading, grading.evaluate(C), seed, sign=1 if shift > 0 else -1)
    levi = f.u2.inverse() * f.u1.inverse() * C * f.u3.inverse()

    def lift(u: Word) -> Word:
        return group.sigma_apply(u.to_ring(ring), shift, var, node)

    return lift(f.u1) * lift(f.u2) * levi.to_ring(ring) * lift(f.u3), f.attempts


def sigma_split(group: RelativeGroup, w: Word, var: str = "X", seed: int | None = None) -> LaurentSplit:
    """Three-factor split for split groups with m₁(α̃) = 1 through σ-runs."""
    if not group.is_split:
        raise RejectedInput(f"σ-run splitting needs a split group, not {group.rrd.type_label}")
    node, coeff = pick_alpha1(group.rrd)
    if coeff == 2:
        raise RejectedInput("m₁(α̃) = 2: the three-factor Laurent split is not constructive in this regime")
    grading = load_group(group.rd.label, (node,), rep=group.rep.name)
    ring = w.ring
    letters = []
    for letter in split_mixed(group.expand_word(w), var).letters:
        if isinstance(letter, RootLetter):
            letters.extend(_monomial_letters(letter, var))
        else:
            letters.append(letter)
    rewritten = Word(ring)
    attempts = 0
    for shift, run in sigma_runs(group, letters, var, node):
        part, n = _rewrite_run(group, grading, Word(ring, tuple(run)), shift, var, node, seed)
        rewritten = rewritten * part
        attempts += n
    blocks = ordered_split(rewritten, var, 3)
    if blocks is None:
        raise BudgetExhausted("σ-runs do not line up as E(A[X])·E(A[X⁻¹])·E(A[X])")
    logger.info(f"σ-run split of {group.rd.label} at node {node} after {attempts} Gauss candidate(s)")
    return LaurentSplit(*blocks, attempts=attempts)


# ── Public operations ────────────────────────────────────────────────────────

def _prepare(group: RelativeGroup, w: Word, var: str) -> None:
    ring = w.ring
    if var not in ring.laurent:
        raise RejectedInput(f"{var} must be a Laurent variable of {ring.describe()}")
    others = [v for v in ring.variables if v != var and v not in ring.nilpotent]
    if others:
        raise RejectedInput(f"coefficients must be a field or dual numbers; extra variables {others}")


def laurent_split(group: RelativeGroup, w: Word, var: str = "X", seed: int | None = None) -> LaurentSplit:
    """w = w₊·w₋·w₊′ with w₊, w₊′ over A[X] and w₋ over A[X⁻¹]."""
    _prepare(group, w, var)
    ring = w.ring
    direct = ordered_split(split_mixed(w, var), var, 3)
    if direct is not None:
        return LaurentSplit(*direct)
    if group.rd.letter != "A" or group.rd.rank < 2:
        return sigma_split(group, w, var, seed)
    rep = _check_type_a(group)
    flat = group.expand_word(w)
    g = rep.evaluate(flat)
    suffix = _prefix(flat.inverse(), var, 1).inverse()
    if not suffix.is_empty:
        g = g * rep.evaluate(suffix.inverse())
        flat = Word(ring, flat.letters[: len(flat) - len(suffix)])
    nil = next(iter(ring.nilpotent), None)
    if nil is None:
        res = field_split(rep, g, var, flat, seed)
    else:
        res = dual_split(rep, g, var, nil, flat, seed)
    return LaurentSplit(res.plus, res.minus, (res.plus2 * suffix).simplify(), res.attempts)


def congruence_laurent_split(group: RelativeGroup, w: Word, var: str = "X",
                             nil: str = "t") -> tuple[Word, Word]:
    """w ≡ 1 mod t as w₊·w₋, each factor ≡ 1 mod t."""
    _prepare(group, w, var)
    ring = w.ring
    if nil not in ring.nilpotent:
        raise RejectedInput(f"{nil} is not a nilpotent variable of {ring.describe()}")
    if not group.evaluate(w).reduce(nil).is_identity():
        raise RejectedInput(f"word is not congruent to 1 modulo ({nil})")
    direct = ordered_split(w, var, 2)
    if direct is not None and all(group.evaluate(p).reduce(nil).is_identity() for p in direct):
        return direct
    rep = _check_type_a(group)
    g = rep.evaluate(group.expand_word(w))
    return split_congruence(rep, g, nil, var)


# ── Certificates ─────────────────────────────────────────────────────────────

def laurent_certificate(group: RelativeGroup, w: Word, var: str = "X", seed: int | None = None) -> Certificate:
    res = laurent_split(group, w, var, seed)
    ring = w.ring
    cert = Certificate(
        statement="laurent",
        group=group.describe(),
        ring=ring,
        input_word=w,
        parts=[
            CertificatePart("w_plus", ring, f"poly:{var}", word=res.plus),
            CertificatePart("w_minus", ring, f"inverse:{var}", word=res.minus),
            CertificatePart("w_plus2", ring, f"poly:{var}", word=res.plus2),
        ],
        data={"attempts": res.attempts},
    )
    return seal(cert)


def congruence_laurent_certificate(group: RelativeGroup, w: Word, var: str = "X",
                                   nil: str = "t") -> Certificate:
    plus, minus = congruence_laurent_split(group, w, var, nil)
    ring = w.ring
    cert = Certificate(
        statement="congruence-laurent",
        group=group.describe(),
        ring=ring,
        input_word=w,
        parts=[
            CertificatePart("w_plus", ring, f"poly:{var};congruent:{nil}", word=plus),
            CertificatePart("w_minus", ring, f"inverse:{var};congruent:{nil}", word=minus),
        ],
    )
    return seal(cert)
