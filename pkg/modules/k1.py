"""
k1.py — SL_m(k[X_1..X_n]) = SL_m(k)·E_m(k[X_1..X_n]) for m >= 3, as certificates.

One variable is column Euclid over k[X].  Two variables go through
y = x·x(0,X₂)⁻¹·x(X₁,0)⁻¹, which is trivial on both axes; y is factored over
k(X₁)[X₂] and the X₁-denominators are cleared by patching local words.  From
three variables on, the last one is peeled: x = y·x(X_n=0) with y ≡ 1 mod X_n
descended over k(X_1..X_{n-1})[X_n].
"""
from __future__ import annotations

import logging
import random

import config
from models.certificate import K1Certificate
from models.transcript import Transcript
from models.word import Word
from modules.chevgrp import Representation
from modules.conjugation import elementary_letter
from modules.decomp import quillen_patch
from modules.errors import BudgetExhausted, IsoK1Error, RejectedInput
from modules.euclid import diagonal_word, elementary_reduce, natural_rep
from modules.laurent import field_split, polynomial_word
from modules.matrices import Mat
from modules.relgrp import RelativeGroup, load_group
from modules.rings import LaurentRing, absorb_into_base, release_from_base
from modules.verify import seal

logger = logging.getLogger(__name__)

SL2_REMARK = "SL_2(k[X_1,X_2]) != E_2(k[X_1,X_2])"


def _check_sl(g: Mat) -> int:
    if not g.is_square:
        raise RejectedInput(f"matrix is {g.nrows}x{g.ncols}, not square")
    m = g.nrows
    if m == 2:
        raise RejectedInput(f"rank 1 is out of scope: {SL2_REMARK}")
    if m < 2:
        raise RejectedInput(f"SL_{m} has no root letters")
    det = g.det()
    if det != 1:
        raise RejectedInput(f"determinant {det} != 1", residue=str(det))
    return m


def _group(m: int) -> RelativeGroup:
    return load_group(f"A{m - 1}", rep="natural")


def _at_origin(M: Mat, names) -> Mat:
    return M.substitute({v: 0 for v in names})


def word_stats(word: Word) -> dict:
    degree = max((p.total_degree() for p in word.params()), default=0)
    return {"letters": len(word), "max_degree": degree}


def _certificate(g: Mat, constant: Mat, word: Word, transcript: Transcript, **data) -> K1Certificate:
    ring = g.ring
    cert = K1Certificate(
        m=g.nrows,
        ring=ring,
        n=len(ring.variables),
        matrix=g,
        constant=constant,
        word=word.simplify(),
        data={**word_stats(word), **data, "steps": transcript.steps()},
    )
    return seal(cert)


# ── One variable ─────────────────────────────────────────────────────────────

def one_var_word(rep: Representation, x: Mat, var: str) -> Word:
    """x over K[var] with det 1 and x(0) = 1 as a word whose value at var = 0 is trivial."""
    if x.is_identity():
        return Word(x.ring)
    D, word = elementary_reduce(x, var, rep)
    diag = Word(x.ring, tuple(diagonal_word(rep, [D[i, i] for i in range(x.nrows)])))
    return (diag * word).simplify()


def one_var_factor(g: Mat, var: str | None = None) -> K1Certificate:
    """g = g(0)·evaluate(word) over k[X]."""
    m = _check_sl(g)
    ring = g.ring
    if len(ring.variables) > 1 or ring.laurent or ring.nilpotent:
        raise RejectedInput(f"one_var_factor needs k[X], got {ring.describe()}")
    transcript = Transcript()
    if not ring.variables or g.is_constant():
        transcript.note("constant", "input has constant entries")
        return _certificate(g, g, Word(ring), transcript)
    var = var or ring.variables[0]
    g0 = _at_origin(g, [var])
    x = g0.inverse() * g
    word = one_var_word(natural_rep(m), x, var)
    transcript.note("euclid", f"{len(word)} letters over {ring.describe()}")
    return _certificate(g, g0, word, transcript)


# ── Clearing denominators ────────────────────────────────────────────────────

def denominator(word: Word):
    """Monic lcm of the coefficient denominators, as a base-field element; None if there are none."""
    field = word.ring.domain.field
    den = field.ring.one
    for p in word.params():
        for c in p.terms.values():
            den = den.lcm(c.denom)
    if den.is_ground:
        return None
    return field.field_new(den.monic())


def comaximal(f, g) -> bool:
    """Comaximality in k[Y]; patching over a multivariate base is not attempted."""
    F, G = f.numer, g.numer
    if F.ring.ngens != 1:
        return False
    return F.gcd(G).is_ground


def _random_constant(rep: Representation, ring: LaurentRing, rng: random.Random) -> Word:
    letters = []
    for i in range(rep.dim):
        for j in range(rep.dim):
            if i != j:
                c = rng.randrange(-2, 3)
                if c:
                    letters.append(elementary_letter(rep, i, j, ring.constant(c)))
    return Word(ring, tuple(letters))


def local_witness(rep: Representation, x: Mat, var: str, conj: Word) -> Word:
    """Euclid on c·x·c⁻¹ over K[var], conjugated back; c = evaluate(conj) is constant."""
    c = rep.evaluate(conj)
    inner = one_var_word(rep, c * x * rep.evaluate(conj.inverse()), var)
    return (conj.inverse() * inner * conj).simplify()


def is_monic_in(f, var: str, base: tuple) -> bool:
    """Leading coefficient of the base polynomial f in ``var`` is a nonzero constant."""
    i = base.index(var)
    terms = f.numer.terms()
    if not f.denom.is_ground or not terms:
        return False
    top = max(m[i] for m, _ in terms)
    lead = [m for m, _ in terms if m[i] == top]
    return top > 0 and len(lead) == 1 and not any(e for k, e in enumerate(lead[0]) if k != i)


def _monic_witness(rep: Representation, x: Mat, var: str, witness: Word,
                   transcript: Transcript) -> Word | None:
    """Check a witness over A[var]_f, var held as base; the word itself if it has no denominators."""
    ring = x.ring
    W = witness.ring
    rest = tuple(v for v in ring.variables if v != var)
    if set(W.base) != set(ring.base) | {var} or W.variables != rest:
        raise RejectedInput(
            f"witness ring {W.describe()} is not {ring.describe()} localized in {var}"
        )
    x_w = x.map(lambda p: absorb_into_base(p, W), W)
    if rep.evaluate(witness) != x_w:
        raise RejectedInput("witness word does not evaluate to the input")
    f = denominator(witness)
    if f is None:
        transcript.note("descend", "witness is already denominator-free")
        return witness.map_params(lambda p: release_from_base(p, ring), ring)
    if not is_monic_in(f, var, W.base):
        raise RejectedInput(f"denominator {W.format_scalar(f)} is not monic in {var}")
    transcript.note("witness", f"denominators are powers of {W.format_scalar(f)}, monic in {var}")
    return None


def monic_descend(x: Mat, var: str, witness: Word | None = None, seed: int | None = None,
                  transcript: Transcript | None = None) -> Word:
    """x ∈ SL_m(A[var]), A = k or k[Y] held as base, x ≡ 1 mod var: a word without denominators.

    The witness may have denominators in A (same ring as x) or be a word over
    A[var]_f with f monic in var, var then being a base variable of its ring.
    A monic witness is checked against x and its denominators are cleared on
    the polynomial side: Euclid over k[var] when A is a field, comaximal local
    words patched over A[var] otherwise.
    """
    ring = x.ring
    transcript = transcript if transcript is not None else Transcript()
    if var not in ring.variables:
        raise RejectedInput(f"{var} is not a variable of {ring.describe()}")
    if not ring.base and len(ring.variables) != 1:
        raise RejectedInput(f"monic_descend needs k[{var}] or k(Y)[{var}], got {ring.describe()}")
    if not x.reduce(var).is_identity():
        raise RejectedInput(f"matrix is not congruent to 1 modulo ({var})")
    m = _check_sl(x)
    rep = natural_rep(m)
    group = _group(m)
    seed = config.SEED if seed is None else seed

    if witness is not None and var in witness.ring.base:
        cleared = _monic_witness(rep, x, var, witness, transcript)
        if cleared is not None:
            return cleared
        witness = None
    if not ring.base:
        if witness is not None:
            if rep.evaluate(witness.to_ring(ring)) != x:
                raise RejectedInput("witness word does not evaluate to the input")
            transcript.note("descend", "witness is already denominator-free")
            return witness.to_ring(ring)
        word = one_var_word(rep, x, var)
        transcript.note("descend", f"Euclid over {ring.describe()}: {len(word)} letters")
        return word

    found: list[tuple[object, Word]] = []
    if witness is not None:
        if rep.evaluate(witness.to_ring(ring)) != x:
            raise RejectedInput("witness word does not evaluate to the input")
        found.append((denominator(witness), witness.to_ring(ring)))
    for round_ in range(config.PATCH_ROUNDS + 1):
        if round_ > 0 or not found:
            conj = Word(ring) if round_ == 0 else _random_constant(rep, ring, random.Random(seed * 31 + round_))
            w = local_witness(rep, x, var, conj)
            found.append((denominator(w), w))
        f_new, w_new = found[-1]
        if f_new is None:
            transcript.note("descend", f"denominator-free witness in round {round_}")
            return w_new
        for f_old, w_old in found[:-1]:
            if f_old is not None and comaximal(f_old, f_new):
                transcript.note(
                    "patch",
                    f"glued over {ring.format_scalar(f_old)} and {ring.format_scalar(f_new)}",
                    {"round": round_},
                )
                return quillen_patch(group, var, f_old, w_old, f_new, w_new)
        logger.debug(f"descend round {round_}: denominator {ring.format_scalar(f_new)}")
    raise BudgetExhausted(
        f"no comaximal pair of local witnesses within {config.PATCH_ROUNDS} rounds",
        transcript=transcript.to_dict(),
    )


# ── Several variables ────────────────────────────────────────────────────────

def _drop_unused(g: Mat, seed: int | None) -> K1Certificate | None:
    """Factor over the variables g actually involves, then embed back."""
    ring = g.ring
    used = [v for v in ring.variables if any(p.involves(v) for p in g.entries())]
    if len(used) == len(ring.variables):
        return None
    transcript = Transcript()
    if not used:
        transcript.note("constant", "input has constant entries")
        return _certificate(g, g, Word(ring), transcript)
    small = ring.drop([v for v in ring.variables if v not in used])
    inner = poly_factor(g.substitute({v: 0 for v in ring.variables if v not in used}, small), seed)
    transcript.note("drop", f"factored over {small.describe()}")
    return _certificate(g, inner.constant.to_ring(ring), inner.word.to_ring(ring), transcript,
                        variables=used)


def _two_var_word(rep: Representation, x: Mat, seed: int | None, transcript: Transcript) -> Word:
    ring = x.ring
    X1, X2 = ring.variables
    a = x.substitute({X2: 0})
    b = x.substitute({X1: 0})
    y = x * b.inverse() * a.inverse()
    if not y.substitute({X2: 0}).is_identity() or not y.substitute({X1: 0}).is_identity():
        raise IsoK1Error("axis corrections do not trivialize y on both axes")
    transcript.note("axes", "y(X1,0) = y(0,X2) = 1")

    w_a = one_var_word(rep, a, X1)
    w_b = one_var_word(rep, b, X2)
    based = ring.with_base([X1], [X2])
    y_based = y.map(lambda p: absorb_into_base(p, based), based)
    w_y = monic_descend(y_based, X2, seed=seed, transcript=transcript)
    w_y = w_y.map_params(lambda p: release_from_base(p, ring), ring)
    transcript.note("assemble", f"{len(w_y)} + {len(w_a)} + {len(w_b)} letters")
    return w_y * w_a * w_b


def _peel_last(x: Mat, seed: int | None, transcript: Transcript) -> Word:
    """x(0) = 1 over k[X_1..X_n], n >= 3: x = y·x(X_n=0), y ≡ 1 mod X_n descended over k(X_1..X_{n-1})."""
    ring = x.ring
    *head, last = ring.variables
    a = x.substitute({last: 0})
    inner = poly_factor(a, seed)
    if not inner.constant.is_identity():
        raise IsoK1Error("x(X_n = 0) has a nontrivial constant part although x(0) = 1")
    y = x * a.inverse()
    based = ring.with_base(head, [last])
    y_based = y.map(lambda p: absorb_into_base(p, based), based)
    w_y = monic_descend(y_based, last, seed=seed, transcript=transcript)
    w_y = w_y.map_params(lambda p: release_from_base(p, ring), ring)
    transcript.note("peel", f"{last}: {len(w_y)} letters, {len(inner.word)} below")
    return w_y * inner.word.to_ring(ring)


def poly_factor(g: Mat, seed: int | None = None) -> K1Certificate:
    """g = g(0)·evaluate(word) over k[X_1..X_n]."""
    m = _check_sl(g)
    ring = g.ring
    if ring.laurent or ring.nilpotent or ring.base:
        raise RejectedInput(f"poly_factor needs a polynomial ring over Q or F_p, got {ring.describe()}")
    n = len(ring.variables)
    if n <= 1:
        return one_var_factor(g)
    dropped = _drop_unused(g, seed)
    if dropped is not None:
        return dropped
    transcript = Transcript()
    rep = natural_rep(m)
    g0 = _at_origin(g, ring.variables)
    x = g0.inverse() * g
    if n == 2:
        word = _two_var_word(rep, x, seed, transcript)
    else:
        word = _peel_last(x, seed, transcript)
    return _certificate(g, g0, word, transcript, depth=n)


# ── Glueing over the projective line ─────────────────────────────────────────

def p1_glue_check(x: Word, y: Word, witness: Word, var: str = "X") -> K1Certificate:
    """x over k[X] ≡ 1 mod X with x·y⁻¹ = witness: an E(k[X]) word for x.

    Over a field the route is direct.  y and the witness are only checked for
    shape and for the product identity; x itself is then factored by column
    Euclid over k[X], which needs no gluing.
    """
    ring = witness.ring
    m = _group_size(x, y, witness)
    rep = natural_rep(m)
    x, y = x.to_ring(ring), y.to_ring(ring)
    for word, sign, name in ((x, 1, "x"), (y, -1, "y")):
        for p in word.params():
            i = ring.variables.index(var)
            if any(mono[i] * sign < 0 for mono in p.terms):
                raise RejectedInput(f"{name} has a coefficient outside its half of k[X,X⁻¹]: {p}")
    X = rep.evaluate(x)
    if X * rep.evaluate(y.inverse()) != rep.evaluate(witness):
        raise RejectedInput("x·y⁻¹ differs from the witness")
    if not X.reduce(var).is_identity():
        raise RejectedInput(f"x is not congruent to 1 modulo ({var})")
    poly = LaurentRing(ring.field_name, [var], prime=ring.prime)
    Xp = X.to_ring(poly)
    transcript = Transcript()
    word = polynomial_word(rep, Xp, var)
    transcript.note("glue", f"x recovered over {poly.describe()} with {len(word)} letters")
    return _certificate(Xp, Mat.identity(poly, m), word, transcript)


def _group_size(*words: Word) -> int:
    for word in words:
        for letter in word.letters:
            return len(letter.root) + 1
    raise RejectedInput("all three words are empty; the group size is unknown")


def laurent_factor(g: Mat, var: str | None = None, seed: int | None = None) -> K1Certificate:
    """g ∈ SL_m(k[X,X⁻¹]) as an elementary word with trivial constant part."""
    m = _check_sl(g)
    ring = g.ring
    var = var or next(iter(sorted(ring.laurent)), None)
    if var is None or len(ring.variables) != 1 or ring.nilpotent:
        raise RejectedInput(f"laurent_factor needs k[X,X⁻¹], got {ring.describe()}")
    res = field_split(natural_rep(m), g, var, seed=seed)
    transcript = Transcript()
    transcript.note("laurent", f"three-factor split after {res.attempts} candidate(s)")
    return _certificate(g, Mat.identity(ring, m), res.plus * res.minus * res.plus2, transcript)
