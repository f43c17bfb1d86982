"""
chevgrp.py — Split Chevalley groups: structure constants, representations,
root unipotents, torus elements, word evaluation and unipotent peeling.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from models.word import RelLetter, RootLetter, TorusLetter, Word
from modules.errors import RejectedInput
from modules.matrices import Mat
from modules.rings import LaurentPoly, LaurentRing
from modules.rootsys import Root, RootDatum, build_root_system, root_order_key

logger = logging.getLogger(__name__)

SparseInt = dict  # (row, col) -> int


def _neg(r: Root) -> Root:
    return tuple(-x for x in r)


def _add(a: Root, b: Root) -> Root:
    return tuple(x + y for x, y in zip(a, b))


def _is_positive(r: Root) -> bool:
    return any(r) and all(x >= 0 for x in r)


# ── Structure constants ──────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class ChevalleyBasis:
    """Chevalley basis of the split Lie algebra, signs fixed by extraspecial pairs."""

    rd: RootDatum
    extraspecial: tuple = ()
    _positive_table: dict = field(default_factory=dict, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def label(self) -> str:
        return self.rd.label

    def N(self, a, b) -> int:
        """N_{a,b} with [e_a, e_b] = N_{a,b} e_{a+b}; zero when a+b is not a root."""
        a, b = tuple(a), tuple(b)
        key = (a, b)
        if key in self._cache:
            return self._cache[key]
        value = self._compute(a, b)
        self._cache[key] = value
        return value

    def _compute(self, a: Root, b: Root) -> int:
        rd = self.rd
        s = _add(a, b)
        if not rd.is_root(s):
            return 0
        if _is_positive(a) and _is_positive(b):
            if (a, b) in self._positive_table:
                return self._positive_table[(a, b)]
            return -self._positive_table[(b, a)]
        if not _is_positive(a) and not _is_positive(b):
            return -self.N(_neg(a), _neg(b))
        # a + b + z = 0 with exactly one of a, b negative
        z = _neg(s)
        if _is_positive(b) == _is_positive(z):
            value = Fraction(rd.norm(z), rd.norm(a)) * self.N(b, z)
        else:
            value = Fraction(rd.norm(z), rd.norm(b)) * self.N(z, a)
        if value.denominator != 1:
            raise ArithmeticError(f"non-integral structure constant N({a},{b}) = {value}")
        return int(value)

    def string_length(self, a, b) -> int:
        """Largest p with b - p·a a root."""
        p = 0
        while self.rd.is_root(tuple(y - (p + 1) * x for x, y in zip(a, b))):
            p += 1
        return p

    def structure_constants(self) -> dict:
        out = {}
        for a in self.rd.roots:
            for b in self.rd.roots:
                if self.rd.is_root(_add(a, b)):
                    out[(a, b)] = self.N(a, b)
        return out

    @property
    def adjoint(self) -> "Representation":
        return adjoint_representation(self)

    def to_dict(self) -> dict:
        table = self.structure_constants()
        return {
            "type": self.label,
            "extraspecial": [[list(a), list(b)] for a, b in self.extraspecial],
            "max_abs_N": max((abs(v) for v in table.values()), default=0),
            "constants": [
                {"alpha": list(a), "beta": list(b), "N": v}
                for (a, b), v in sorted(table.items())
                if _is_positive(a) and _is_positive(b)
            ],
        }


def build_chevalley_basis(rd: RootDatum | str) -> ChevalleyBasis:
    if isinstance(rd, str):
        rd = build_root_system(rd)
    return _basis_for(rd.label)


@lru_cache(maxsize=None)
def _basis_for(label: str) -> ChevalleyBasis:
    rd = build_root_system(label)
    positives = rd.positive_roots
    order = {r: i for i, r in enumerate(positives)}
    cb = ChevalleyBasis(rd=rd)
    table = cb._positive_table
    extraspecial = []
    for xi in positives:
        pairs = [
            (a, tuple(x - y for x, y in zip(xi, a)))
            for a in positives
            if rd.is_root(tuple(x - y for x, y in zip(xi, a)))
            and _is_positive(tuple(x - y for x, y in zip(xi, a)))
            and order[a] < order[tuple(x - y for x, y in zip(xi, a))]
        ]
        if not pairs:
            continue
        a1, b1 = pairs[0]
        extraspecial.append((a1, b1))
        table[(a1, b1)] = cb.string_length(a1, b1) + 1
        n1 = table[(a1, b1)]
        for a, b in pairs[1:]:
            # four-root identity with (a, b, -a1, -b1)
            total = Fraction(0)
            d = _add(b, _neg(a1))
            if rd.is_root(d):
                total += Fraction(cb.N(b, _neg(a1)) * cb.N(a, _neg(b1)), rd.norm(d))
            d = _add(a, _neg(a1))
            if rd.is_root(d):
                total += Fraction(cb.N(_neg(a1), a) * cb.N(b, _neg(b1)), rd.norm(d))
            value = Fraction(rd.norm(xi), n1) * total
            if value.denominator != 1 or value == 0:
                raise ArithmeticError(f"bad structure constant for {a}+{b} in {label}")
            table[(a, b)] = int(value)
    object.__setattr__(cb, "extraspecial", tuple(extraspecial))
    logger.debug(f"Chevalley basis {label}: {len(table)} positive pairs")
    return cb


# ── Sparse integer helpers ───────────────────────────────────────────────────

def _int_mul(A: SparseInt, B: SparseInt) -> SparseInt:
    by_row: dict = {}
    for (k, j), v in B.items():
        by_row.setdefault(k, []).append((j, v))
    out: dict = {}
    for (i, k), a in A.items():
        for j, b in by_row.get(k, ()):
            out[(i, j)] = out.get((i, j), 0) + a * b
    return {ij: v for ij, v in out.items() if v}


def _int_bracket(A: SparseInt, B: SparseInt) -> SparseInt:
    out = dict(_int_mul(A, B))
    for ij, v in _int_mul(B, A).items():
        out[ij] = out.get(ij, 0) - v
    return {ij: v for ij, v in out.items() if v}


def _int_scale(A: SparseInt, c: Fraction) -> SparseInt:
    out = {}
    for ij, v in A.items():
        w = Fraction(v) * c
        if w.denominator != 1:
            raise ArithmeticError("non-integral matrix entry")
        if w:
            out[ij] = int(w)
    return out


# ── Representations ──────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class Representation:
    """Integral representation with ρ(e_β) and its divided powers per root."""

    name: str
    basis: ChevalleyBasis
    dim: int
    weights: tuple
    generators: dict
    _powers: dict = field(default_factory=dict, repr=False)

    @property
    def rd(self) -> RootDatum:
        return self.basis.rd

    def generator(self, root) -> SparseInt:
        root = tuple(root)
        if root not in self.generators:
            raise RejectedInput(f"{list(root)} is not a root of {self.rd.label}")
        return self.generators[root]

    def divided_powers(self, root) -> list[SparseInt]:
        """[ρ(e_β), ρ(e_β)²/2!, …] up to the last nonzero power."""
        root = tuple(root)
        if root not in self._powers:
            first = self.generator(root)
            out = [first]
            k = 2
            while True:
                nxt = _int_scale(_int_mul(out[-1], first), Fraction(1, k))
                if not nxt:
                    break
                out.append(nxt)
                k += 1
            self._powers[root] = out
        return self._powers[root]

    def witness(self, root) -> tuple[int, int, int]:
        """A nonzero entry (row, col, value) of ρ(e_β)."""
        (i, j), v = min(self.generator(root).items())
        return i, j, v

    # ── Group elements ───────────────────────────────────────────────────────

    def unipotent(self, root, t: LaurentPoly) -> Mat:
        ring = t.ring
        rows = [{i: ring.one} for i in range(self.dim)]
        if t.is_zero:
            return Mat(ring, self.dim, self.dim, rows)
        power = ring.one
        for M in self.divided_powers(root):
            power = power * t
            if power.is_zero:
                break
            for (i, j), c in M.items():
                value = power.scale(c)
                current = rows[i].get(j)
                value = value if current is None else current + value
                if value:
                    rows[i][j] = value
                else:
                    rows[i].pop(j, None)
        return Mat(ring, self.dim, self.dim, rows)

    def pairing(self, weight, cochar) -> int:
        return sum(w * c for w, c in zip(weight, cochar))

    def torus(self, cochar, u: LaurentPoly) -> Mat:
        if len(cochar) != self.rd.rank:
            raise RejectedInput(f"cocharacter {list(cochar)} has the wrong length for {self.rd.label}")
        if not u.is_unit():
            raise RejectedInput(f"torus parameter {u} is not a unit")
        inv = u.inverse()
        entries = []
        for w in self.weights:
            e = self.pairing(w, cochar)
            entries.append(u ** e if e >= 0 else inv ** (-e))
        return Mat.diagonal(u.ring, entries)

    def letter_matrix(self, letter) -> Mat:
        if isinstance(letter, RootLetter):
            return self.unipotent(letter.root, letter.param)
        if isinstance(letter, TorusLetter):
            return self.torus(letter.cochar, letter.unit)
        if isinstance(letter, RelLetter):
            raise RejectedInput("relative letters need a parabolic; evaluate through a RelativeGroup")
        raise RejectedInput(f"unknown letter {letter!r}")

    def evaluate(self, word: Word, ring: LaurentRing | None = None) -> Mat:
        ring = ring or word.ring
        M = Mat.identity(ring, self.dim)
        for letter in word.letters:
            L = self.letter_matrix(letter)
            if L.ring != ring:
                L = L.to_ring(ring)
            M = M * L
        return M

    def to_dict(self) -> dict:
        return {"name": self.name, "type": self.rd.label, "dim": self.dim}


@lru_cache(maxsize=None)
def _adjoint_for(label: str) -> Representation:
    cb = _basis_for(label)
    rd = cb.rd
    n = rd.rank
    pos = list(rd.positive_roots)
    order = list(reversed(pos)) + [None] * n + [_neg(r) for r in pos]
    index: dict = {}
    weights = []
    for k, r in enumerate(order):
        if r is None:
            h = k - len(pos)
            index[("h", h)] = k
            weights.append((0,) * n)
        else:
            index[r] = k
            weights.append(r)
    generators = {}
    for a in rd.roots:
        entries: dict = {}
        col_a = index[a]
        for b in rd.roots:
            c = index[b]
            if b == _neg(a):
                for i, m in enumerate(rd.coroot_coeffs(a)):
                    if m:
                        entries[(index[("h", i)], c)] = m
                continue
            s = _add(a, b)
            if rd.is_root(s):
                entries[(index[s], c)] = cb.N(a, b)
        for i in range(n):
            v = -rd.pairing(a, i)
            if v:
                entries[(col_a, index[("h", i)])] = v
        generators[a] = entries
    rep = Representation("adjoint", cb, len(order), tuple(weights), generators)
    logger.debug(f"adjoint representation of {label}: dim {rep.dim}")
    return rep


def adjoint_representation(cb: ChevalleyBasis) -> Representation:
    return _adjoint_for(cb.label)


@lru_cache(maxsize=None)
def _natural_for(label: str) -> Representation:
    cb = _basis_for(label)
    rd = cb.rd
    if rd.letter != "A":
        raise RejectedInput(f"the natural representation is only provided for type A, not {label}")
    n = rd.rank
    dim = n + 1
    generators: dict = {}
    for i in range(n):
        simple = rd.simple_roots[i]
        generators[simple] = {(i, i + 1): 1}
        generators[_neg(simple)] = {(i + 1, i): 1}
    for xi in rd.positive_roots:
        if sum(xi) == 1:
            continue
        for i in range(n):
            gamma = tuple(x - int(k == i) for k, x in enumerate(xi))
            if rd.is_root(gamma) and _is_positive(gamma):
                simple = rd.simple_roots[i]
                up = cb.N(simple, gamma)
                generators[xi] = _int_scale(
                    _int_bracket(generators[simple], generators[gamma]), Fraction(1, up))
                down = cb.N(_neg(simple), _neg(gamma))
                generators[_neg(xi)] = _int_scale(
                    _int_bracket(generators[_neg(simple)], generators[_neg(gamma)]), Fraction(1, down))
                break
    weights = tuple(tuple(int(a <= k) for k in range(n)) for a in range(dim))
    return Representation("natural", cb, dim, weights, generators)


def natural_representation(cb: ChevalleyBasis) -> Representation:
    return _natural_for(cb.label)


def representation(cb: ChevalleyBasis | str, name: str = "adjoint") -> Representation:
    if isinstance(cb, str):
        cb = build_chevalley_basis(cb)
    if name == "adjoint":
        return adjoint_representation(cb)
    if name == "natural":
        return natural_representation(cb)
    raise RejectedInput(f"unknown representation '{name}' (expected adjoint or natural)")


def check_jacobi(cb: ChevalleyBasis) -> list[str]:
    """Compare [ad e_a, ad e_b] against the structure constants; returns mismatching pairs."""
    rep = adjoint_representation(cb)
    rd = cb.rd
    failures = []
    for a in rd.roots:
        for b in rd.roots:
            lhs = _int_bracket(rep.generator(a), rep.generator(b))
            if b == _neg(a):
                coroot = rd.coroot_coeffs(a)
                expected = {}
                for k, w in enumerate(rep.weights):
                    val = sum(w[i] * sum(coroot[j] * rd.cartan[i][j] for j in range(rd.rank))
                              for i in range(rd.rank))
                    if val:
                        expected[(k, k)] = val
            elif rd.is_root(_add(a, b)):
                expected = _int_scale(rep.generator(_add(a, b)), Fraction(cb.N(a, b)))
            else:
                expected = {}
            if lhs != expected:
                failures.append(f"[e{list(a)}, e{list(b)}]")
    return failures


# ── Word-level operations ────────────────────────────────────────────────────

def root_unipotent(rep: Representation, root, t: LaurentPoly) -> Mat:
    return rep.unipotent(root, t)


def cocharacter_matrix(rep: Representation, cochar, u: LaurentPoly) -> Mat:
    return rep.torus(cochar, u)


def evaluate_word(rep: Representation, word: Word) -> Mat:
    return rep.evaluate(word)


def unipotent_factorize(
    rep: Representation,
    M: Mat,
    roots: Sequence[Root],
    ring: LaurentRing | None = None,
) -> Word:
    """Peel M = x_{β1}(t1)·x_{β2}(t2)⋯ from the left, reading each t at a witness entry."""
    ring = ring or M.ring
    residual = M
    letters = []
    for beta in roots:
        r, c, v = rep.witness(beta)
        t = residual[r, c]
        if t.is_zero:
            continue
        t = t.scale(Fraction(1, v))
        letters.append(RootLetter(tuple(beta), t))
        residual = rep.unipotent(beta, -t) * residual
    if not residual.is_identity():
        stray = next(
            (f"({i},{j})={v}" for i, row in enumerate(residual.rows) for j, v in row.items()
             if v != (ring.one if i == j else ring.zero)),
            "",
        )
        raise RejectedInput("matrix is not in the claimed unipotent subgroup", residue=stray)
    return Word(ring, tuple(letters))


_SYMBOLIC = LaurentRing("Q", ("t", "u"))


def commutator_roots(rd: RootDatum, a: Root, b: Root) -> list[tuple[int, int, Root]]:
    """(i, j, iα+jβ) for roots of that shape, ordered by (i+j, i)."""
    out = []
    for total in range(2, 7):
        for i in range(1, total):
            j = total - i
            g = tuple(i * x + j * y for x, y in zip(a, b))
            if rd.is_root(g):
                out.append((i, j, g))
    return out


def proportional(a: Root, b: Root) -> bool:
    return all(a[i] * b[j] == a[j] * b[i] for i in range(len(a)) for j in range(len(a)))


def derive_commutator_constants(cb: ChevalleyBasis, a, b) -> dict:
    """C_ij with [x_a(t), x_b(u)] = ∏ x_{ia+jb}(C_ij t^i u^j)."""
    return dict(_commutator_table(cb.label, tuple(a), tuple(b)))


@lru_cache(maxsize=None)
def _commutator_table(label: str, a: Root, b: Root) -> tuple:
    cb = _basis_for(label)
    rd = cb.rd
    if not rd.is_root(a) or not rd.is_root(b):
        raise RejectedInput(f"{list(a)} or {list(b)} is not a root of {label}")
    if proportional(a, b):
        raise RejectedInput(f"roots {list(a)} and {list(b)} are proportional")
    rep = adjoint_representation(cb)
    t, u = _SYMBOLIC.gens()
    comm = (rep.unipotent(a, t) * rep.unipotent(b, u)
            * rep.unipotent(a, -t) * rep.unipotent(b, -u))
    targets = commutator_roots(rd, a, b)
    word = unipotent_factorize(rep, comm, [g for _, _, g in targets])
    by_root = {l.root: l.param for l in word.letters}
    table = []
    for i, j, g in targets:
        p = by_root.get(g)
        if p is None:
            continue
        mono = (i, j)
        if set(p.terms) != {mono}:
            raise ArithmeticError(f"commutator coefficient {p} is not a multiple of t^{i} u^{j}")
        c = p.terms[mono]
        table.append(((i, j), int(c)))
    return tuple(table)


def weyl_word(rd: RootDatum, i: int, ring: LaurentRing) -> Word:
    """n_i = x_{α_i}(1) x_{-α_i}(-1) x_{α_i}(1) for a 0-based node i."""
    a = rd.simple_roots[i]
    one = ring.one
    return Word(ring, (RootLetter(a, one), RootLetter(_neg(a), -one), RootLetter(a, one)))


def root_weyl_word(root: Root, ring: LaurentRing) -> Word:
    one = ring.one
    return Word(ring, (RootLetter(root, one), RootLetter(_neg(root), -one), RootLetter(root, one)))


def positive_roots_by_height(rd: RootDatum, roots: Iterable[Root]) -> list[Root]:
    return sorted(roots, key=root_order_key)
