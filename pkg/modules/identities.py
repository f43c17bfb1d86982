"""
identities.py — Exact checks of the rewriting identities used when m₁(α̃) = 2.

Every identity is a pair of words over Q[X, X⁻¹, parameters] evaluated in the
adjoint representation.  Conjugates by X_{−α}(bX⁻¹) are written out with the
commutator maps of the relative group; where the rewriting claims a result in
E(A[X]), the right-hand word must also be free of negative powers of X.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from models.word import RelLetter, Word
from modules.errors import RejectedInput
from modules.relgrp import RelativeGroup, load_group
from modules.rings import LaurentPoly, LaurentRing
from modules.rootsys import pick_alpha1

logger = logging.getLogger(__name__)

Root = tuple

STEMS = ("b", "u", "v", "w", "c", "d")
SYSTEMS = ("B2", "G2", "C3/J=1,2")


@dataclass(frozen=True)
class Identity:
    name: str
    system: str
    lhs: Word
    rhs: Word
    claim: str = "equal"          # "equal" or "polynomial-matrix"
    polynomial: bool = False      # rhs parameters free of negative X powers


@dataclass
class IdentityResult:
    name: str
    system: str
    ok: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "system": self.system, "ok": self.ok, "detail": self.detail}


# ── Building blocks ──────────────────────────────────────────────────────────

def symbolic_ring(width: int) -> LaurentRing:
    names = ["X"] + [f"{s}{i}" for s in STEMS for i in range(width)]
    return LaurentRing("Q", names, laurent=["X"])


def _width(group: RelativeGroup) -> int:
    return max(len(fib) for _, fib in group.rrd.fibers)


def lin(*terms: tuple[int, Root]) -> Root:
    """Σ kᵢ·rootᵢ."""
    size = len(terms[0][1])
    return tuple(sum(k * r[i] for k, r in terms) for i in range(size))


class Builder:
    """Relative letters and commutator expansions for one group over one symbolic ring."""

    def __init__(self, group: RelativeGroup, system: str):
        self.group = group
        self.system = system
        self.ring = symbolic_ring(_width(group))
        self.X = self.ring.gen("X")

    def vec(self, stem: str, root: Root, scale: LaurentPoly | int = 1) -> tuple[LaurentPoly, ...]:
        size = len(self.group.rrd.fiber(root))
        return tuple(self.ring.gen(f"{stem}{i}") * scale for i in range(size))

    def letter(self, root: Root, params: Sequence[LaurentPoly]) -> Word:
        return Word(self.ring, (RelLetter(tuple(root), tuple(params)),))

    def commutator_letters(self, gamma: Root, u: Sequence[LaurentPoly], delta: Root,
                           v: Sequence[LaurentPoly]) -> Word:
        """[X_γ(u), X_δ(v)] as ∏ X_{iγ+jδ}(N_ij(u, v))."""
        maps = self.group.n_maps(gamma, delta)
        assign = {f"u{i}": p for i, p in enumerate(u)}
        assign.update({f"v{i}": p for i, p in enumerate(v)})
        letters = []
        for key in sorted(maps.maps, key=lambda ij: (sum(ij), ij[0])):
            params = maps.evaluate(key, assign, self.ring)
            if any(params):
                letters.append(RelLetter(maps.roots[key], params))
        return Word(self.ring, tuple(letters))

    def n(self, gamma: Root, u, delta: Root, v, key: tuple[int, int]) -> tuple[LaurentPoly, ...]:
        maps = self.group.n_maps(gamma, delta)
        assign = {f"u{i}": p for i, p in enumerate(u)}
        assign.update({f"v{i}": p for i, p in enumerate(v)})
        return maps.evaluate(key, assign, self.ring)

    def conjugate(self, gamma: Root, c, delta: Root, v) -> Word:
        """X_γ(c)·X_δ(v)·X_γ(c)⁻¹ = [X_γ(c), X_δ(v)]·X_δ(v)."""
        return self.commutator_letters(gamma, c, delta, v) * self.letter(delta, v)

    def identity(self, name: str, lhs: Word, rhs: Word, polynomial: bool = False,
                 claim: str = "equal") -> Identity:
        return Identity(name, self.system, lhs, rhs, claim, polynomial)


def commutator(a: Word, b: Word) -> Word:
    return a * b * a.inverse() * b.inverse()


def conjugated(a: Word, w: Word) -> Word:
    return a * w * a.inverse()


def _simple_pair(group: RelativeGroup, first_long: bool) -> tuple[Root, Root]:
    """Simple relative roots (α, β) with α long (first_long) or short."""
    rrd = group.rrd
    if rrd.rank != 2:
        raise RejectedInput(f"identities need a rank-2 relative system, got {rrd.type_label}")
    s1, s2 = (1, 0), (0, 1)
    n1, n2 = rrd.inner(s1, s1), rrd.inner(s2, s2)
    long_, short = (s1, s2) if n1 > n2 else (s2, s1)
    return (long_, short) if first_long else (short, long_)


def _neg(r: Root) -> Root:
    return tuple(-x for x in r)


# ── B₂, α long ────────────────────────────────────────────────────────────

def b2_long_identities(group: RelativeGroup | None = None) -> list[Identity]:
    group = group or load_group("B2")
    B = Builder(group, "B2")
    a, b = _simple_pair(group, first_long=True)
    X = B.X
    ab, a2b = lin((1, a), (1, b)), lin((1, a), (2, b))
    u, v = B.vec("u", ab, X), B.vec("v", _neg(b), X)
    c, d = B.vec("c", a2b), B.vec("d", _neg(b), X)
    out = []

    lead = B.letter(a, B.n(ab, u, _neg(b), v, (1, 1))) * B.letter(a, B.n(a2b, c, _neg(b), d, (1, 2)))
    correction = B.letter(ab, [-p for p in B.n(a2b, c, _neg(b), d, (1, 1))])
    rhs = (commutator(B.letter(ab, u), B.letter(_neg(b), v))
           * commutator(B.letter(a2b, c), B.letter(_neg(b), d)) * correction)
    out.append(B.identity("b2-long:commutator-form", lead, rhs))

    bb = B.vec("b", _neg(a), X.inverse())
    conj = B.letter(_neg(a), bb)
    factors = {
        "x_a+b(Xu)": (ab, u),
        "x_-b(Xv)": (_neg(b), v),
        "x_-b(Xd)": (_neg(b), d),
        "x_a+b(-XN(c,d))": (ab, correction.letters[0].params),
    }
    for label, (root, params) in factors.items():
        out.append(B.identity(
            f"b2-long:conjugate {label}",
            conjugated(conj, B.letter(root, params)),
            B.conjugate(_neg(a), bb, root, params),
            polynomial=True,
        ))
    out.append(B.identity(
        "b2-long:x_a+2b(c) is fixed",
        conjugated(conj, B.letter(a2b, c)),
        B.letter(a2b, c),
    ))
    return out


# ── B₂, α short ──────────────────────────────────────────────────────────

def b2_short_identities(group: RelativeGroup | None = None) -> list[Identity]:
    group = group or load_group("B2")
    B = Builder(group, "B2")
    a, b = _simple_pair(group, first_long=False)
    X = B.X
    mb, ab, a2b = _neg(b), lin((1, a), (1, b)), lin((2, a), (1, b))
    ma, mab, m2ab = _neg(a), lin((-1, a), (-1, b)), lin((-2, a), (-1, b))
    u, v = B.vec("u", mb, X), B.vec("v", ab, X)
    bb = B.vec("b", ma, X.inverse())
    conj = B.letter(ma, bb)
    out = []

    comm = commutator(B.letter(mb, u), B.letter(ab, v))
    n12 = B.n(mb, u, ab, v, (1, 2))
    tail = B.letter(a2b, [-p for p in n12])
    lhs = B.letter(a, B.n(mb, u, ab, v, (1, 1)))
    out.append(B.identity("b2-short:commutator-form", lhs, comm * tail))

    conj_u = B.conjugate(ma, bb, mb, u)
    conj_v = B.conjugate(ma, bb, ab, v)
    out.append(B.identity("b2-short:conjugate x_-b(uX)", conjugated(conj, B.letter(mb, u)), conj_u))
    out.append(B.identity("b2-short:conjugate x_a+b(vX)", conjugated(conj, B.letter(ab, v)), conj_v,
                          polynomial=True))

    # conj_u = x_{-a-b}(c1)·x_{-2a-b}(c2 X⁻¹)·x_{-b}(uX); conj_v = x_b(c3)·x_{a+b}(vX)
    by_root = {l.root: l.params for l in conj_u.letters}
    c1, c2 = by_root.get(mab), by_root.get(m2ab)
    c3 = {l.root: l.params for l in conj_v.letters}.get(b)
    if c1 is None or c2 is None or c3 is None:
        raise RejectedInput("unexpected shape of the conjugated B2 factors")
    A, C, Bw = B.letter(mab, c1), B.letter(m2ab, c2), B.letter(mb, u)
    D, E = B.letter(b, c3), B.letter(ab, v)

    for label, other in (("x_-a-b(c1)", A), ("x_-b(uX)", Bw), ("x_b(c3)", D)):
        out.append(B.identity(f"b2-short:x_-2a-b(c2/X) commutes with {label}", C * other, other * C))
    ce = B.commutator_letters(m2ab, c2, ab, v)
    out.append(B.identity("b2-short:[x_-2a-b(c2/X), x_a+b(vX)]", commutator(C, E), ce, polynomial=True))

    cancelled = A * Bw * D * ce * E * Bw.inverse() * A.inverse() * E.inverse() * D.inverse()
    out.append(B.identity("b2-short:conjugated commutator without X^-1", conjugated(conj, comm),
                          cancelled, polynomial=True))
    tail_conj = B.conjugate(ma, bb, a2b, tail.letters[0].params)
    out.append(B.identity("b2-short:conjugate x_a(X^2 f)", conjugated(conj, lhs),
                          cancelled * tail_conj, polynomial=True))
    return out


# ── G₂, α short ──────────────────────────────────────────────────────────

def g2_identities(group: RelativeGroup | None = None) -> list[Identity]:
    group = group or load_group("G2")
    B = Builder(group, "G2")
    a, b = _simple_pair(group, first_long=False)
    X = B.X
    ab, mb, ma = lin((1, a), (1, b)), _neg(b), _neg(a)
    u, v = B.vec("u", ab), B.vec("v", mb, X ** 2)
    bb = B.vec("b", ma, X.inverse())
    conj = B.letter(ma, bb)
    out = []

    comm = commutator(B.letter(ab, u), B.letter(mb, v))
    expanded = B.commutator_letters(ab, u, mb, v)
    head, rest = Word(B.ring, expanded.letters[:1]), Word(B.ring, expanded.letters[1:])
    if head.letters[0].root != a:
        raise RejectedInput("unexpected leading root in the G2 commutator")
    out.append(B.identity("g2:commutator-form", head, comm * rest.inverse()))

    for letter in rest.letters:
        root = letter.root
        out.append(B.identity(
            f"g2:conjugate x_{list(root)}",
            conjugated(conj, Word(B.ring, (letter,))),
            B.conjugate(ma, bb, root, letter.params),
            polynomial=True,
        ))

    conj_u = B.conjugate(ma, bb, ab, u)
    conj_v = B.conjugate(ma, bb, mb, v)
    out.append(B.identity("g2:conjugate x_a+b(u)", conjugated(conj, B.letter(ab, u)), conj_u))
    out.append(B.identity("g2:conjugate x_-b(X^2 v)", conjugated(conj, B.letter(mb, v)), conj_v))

    roots_u = {l.root: l.params for l in conj_u.letters}
    roots_v = {l.root: l.params for l in conj_v.letters}
    c1 = roots_u.get(b)
    c3 = roots_v.get(lin((-2, a), (-1, b)))
    c4 = roots_v.get(lin((-3, a), (-1, b)))
    c2 = roots_v.get(lin((-1, a), (-1, b)))
    c5 = roots_v.get(lin((-3, a), (-2, b)))
    if None in (c1, c2, c3, c4, c5):
        raise RejectedInput("unexpected shape of the conjugated G2 factors")
    x_b = B.letter(b, c1)
    x_4 = B.letter(lin((-3, a), (-1, b)), c4)
    out.append(B.identity("g2:x_-3a-b(c4/X) commutes with x_a+b(-u)",
                          x_4 * B.letter(ab, [-p for p in u]), B.letter(ab, [-p for p in u]) * x_4))
    out.append(B.identity("g2:x_-3a-b(c4/X) commutes with x_b(-c1/X)",
                          x_4 * x_b.inverse(), x_b.inverse() * x_4))
    x_3 = B.letter(lin((-2, a), (-1, b)), c3)
    out.append(B.identity("g2:x_b(c1/X) commutes with x_-2a-b(c3)", x_b * x_3, x_3 * x_b))
    for label, root, params in (("x_-a-b(Xc2)", lin((-1, a), (-1, b)), c2),
                                ("x_-3a-2b(Xc5)", lin((-3, a), (-2, b)), c5)):
        y = B.letter(root, params)
        out.append(B.identity(f"g2:[x_b(c1/X), {label}]", commutator(x_b, y),
                              B.commutator_letters(b, c1, root, params), polynomial=True))
    w = conjugated(x_b, B.letter(mb, v))
    out.append(B.identity("g2:x_b(c1/X) conjugate of x_-b(X^2 v)", w, w, claim="polynomial-matrix"))
    return out


# ── G₂, σ on E_α̃ ─────────────────────────────────────────────────────────

def g2_sigma_identities(group: RelativeGroup | None = None) -> list[Identity]:
    """σ^{±1} of E_α̃(A[X], XA[X]) elements against E(A[X])·X_{∓α̃}(X⁻¹v)."""
    group = group or load_group("G2")
    B = Builder(group, "G2")
    node, _ = pick_alpha1(group.rrd)
    X = B.X
    top = max(group.rrd.relative_roots, key=sum)
    gamma = tuple(int(i == node - 1) for i in range(group.rrd.rank))
    out = []
    for direction in (1, -1):
        name = "σ" if direction == 1 else "σ^-1"
        inner = _neg(top) if direction == 1 else top
        outer = _neg(inner)
        c_root = gamma if direction == 1 else _neg(gamma)

        w = B.vec("w", outer, X)
        out.append(B.identity(
            f"g2:{name}(x_{list(outer)}(Xw))",
            group.sigma_apply(B.letter(outer, w), direction, "X", node),
            B.letter(outer, [p * X ** 2 for p in w]),
            polynomial=True,
        ))

        u, b = B.vec("u", inner, X), B.vec("b", c_root)
        image = group.sigma_apply(conjugated(B.letter(c_root, b), B.letter(inner, u)), direction, "X", node)
        tail = group.sigma_apply(B.letter(inner, u), direction, "X", node)
        if any(m[0] != -1 for p in tail.params() for m in p.terms):
            raise RejectedInput(f"{name} does not send x_{list(inner)}(Xu) to X^-1")
        out.append(B.identity(
            f"g2:{name}(x_{list(c_root)}(b)·x_{list(inner)}(Xu)·x_{list(c_root)}(-b))",
            image * tail.inverse(),
            B.commutator_letters(c_root, image.letters[0].params, inner, tail.letters[0].params),
            polynomial=True,
        ))
    return out


# ── BC₂ from C₃ with J = {1, 2} ──────────────────────────────────────────────

def _bc_pair(group: RelativeGroup) -> tuple[Root, Root]:
    rrd = group.rrd
    simple = [(1, 0), (0, 1)]
    extra = [s for s in simple if rrd.is_root(lin((2, s)))]
    if len(extra) != 1:
        raise RejectedInput(f"{rrd.type_label} has no extra-short simple root")
    a = extra[0]
    return a, next(s for s in simple if s != a)


def bc2_identities(group: RelativeGroup | None = None) -> list[Identity]:
    group = group or load_group("C3", J=(1, 2))
    B = Builder(group, "C3/J=1,2")
    a, b = _bc_pair(group)
    X = B.X
    mb = _neg(b)
    a2, ab, a2b, a2b2 = lin((2, a)), lin((1, a), (1, b)), lin((2, a), (1, b)), lin((2, a), (2, b))
    out = []

    v, w = B.vec("v", a2b, X), B.vec("w", mb, X)
    c, d = B.vec("c", a2b2), B.vec("d", mb, X)
    lhs = B.letter(a2, B.n(a2b, v, mb, w, (1, 1))) * B.letter(a2, B.n(a2b2, c, mb, d, (1, 2)))
    correction = B.letter(a2b, [-p for p in B.n(a2b2, c, mb, d, (1, 1))])
    rhs = (commutator(B.letter(a2b, v), B.letter(mb, w))
           * commutator(B.letter(a2b2, c), B.letter(mb, d)) * correction)
    out.append(B.identity("bc2:x_2a(X^2 u) generation", lhs, rhs))

    v1, w1 = B.vec("u", ab), B.vec("b", mb, X)
    expanded = B.commutator_letters(ab, v1, mb, w1)
    head, rest = Word(B.ring, expanded.letters[:1]), Word(B.ring, expanded.letters[1:])
    if head.letters[0].root != a:
        raise RejectedInput("unexpected leading root in the BC2 commutator")
    out.append(B.identity("bc2:x_a(X u) generation", head,
                          commutator(B.letter(ab, v1), B.letter(mb, w1)) * rest.inverse()))
    return out


# ── Runner ───────────────────────────────────────────────────────────────────

def _polynomial_in_x(word: Word) -> bool:
    i = word.ring.variables.index("X")
    return all(m[i] >= 0 for p in word.params() for m in p.terms)


def check_identity(group: RelativeGroup, ident: Identity) -> IdentityResult:
    lhs = group.evaluate(ident.lhs)
    if ident.claim == "polynomial-matrix":
        i = ident.lhs.ring.variables.index("X")
        ok = all(m[i] >= 0 for e in lhs.entries() for m in e.terms)
        return IdentityResult(ident.name, ident.system, ok, "" if ok else "matrix has negative powers of X")
    if lhs != group.evaluate(ident.rhs):
        return IdentityResult(ident.name, ident.system, False, "both sides differ")
    if ident.polynomial and not _polynomial_in_x(ident.rhs):
        return IdentityResult(ident.name, ident.system, False, "right-hand side involves X^-1")
    return IdentityResult(ident.name, ident.system, True)


def identity_sets() -> dict[str, tuple[RelativeGroup, list]]:
    return {
        "B2": (load_group("B2"), [b2_long_identities, b2_short_identities]),
        "G2": (load_group("G2"), [g2_identities, g2_sigma_identities]),
        "C3/J=1,2": (load_group("C3", J=(1, 2)), [bc2_identities]),
    }


def run_identity_suite(systems: Sequence[str] | None = None) -> list[IdentityResult]:
    """Evaluate both sides of every identity for the chosen systems."""
    sets = identity_sets()
    chosen = list(systems) if systems else list(sets)
    results = []
    for name in chosen:
        if name not in sets:
            raise RejectedInput(f"unknown identity system {name!r}; choose from {', '.join(sets)}")
        group, builders = sets[name]
        for build in builders:
            for ident in build(group):
                res = check_identity(group, ident)
                logger.info(f"identity {ident.name}: {'ok' if res.ok else res.detail}")
                results.append(res)
    return results
