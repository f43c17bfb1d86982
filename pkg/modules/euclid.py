"""
euclid.py — Elementary factorization in SL_m over a Euclidean polynomial ring.

k[X] (k = Q, F_p or a rational function field k(Y)) is Euclidean, so column
operations with min-degree pivots bring any determinant-one matrix down to a
constant diagonal.  Dual numbers are handled through M = M₀·(I + tN).
"""
from __future__ import annotations

import logging
from typing import Sequence

from models.word import RootLetter, Word
from modules.chevgrp import Representation, representation
from modules.conjugation import elementary_letter
from modules.errors import RejectedInput
from modules.matrices import Mat
from modules.rings import LaurentPoly

logger = logging.getLogger(__name__)


def natural_rep(m: int) -> Representation:
    """The vector representation of SL_m as type A_{m-1}."""
    if m < 2:
        raise RejectedInput("SL_m needs m >= 2")
    return representation(f"A{m - 1}", "natural")


# ── Polynomial division ──────────────────────────────────────────────────────

def _check_univariate(p: LaurentPoly, var: str) -> None:
    i = p.ring.variables.index(var)
    for mono in p.terms:
        if any(e for k, e in enumerate(mono) if k != i):
            raise RejectedInput(f"entry {p} involves variables other than {var}")
        if mono[i] < 0:
            raise RejectedInput(f"entry {p} has a negative power of {var}")


def poly_divmod(a: LaurentPoly, b: LaurentPoly, var: str) -> tuple[LaurentPoly, LaurentPoly]:
    """Division with remainder in K[var]."""
    if b.is_zero:
        raise RejectedInput("division by zero polynomial")
    ring = a.ring
    db = b.degree(var)
    lead_b = b.part(var, db).constant_term()
    q, r = ring.zero, a
    while r and r.degree(var) >= db:
        dr = r.degree(var)
        c = r.part(var, dr).constant_term() / lead_b
        term = ring.monomial({var: dr - db}, 1).scale(c)
        q = q + term
        r = r - term * b
    return q, r


# ── Column reduction ─────────────────────────────────────────────────────────

class _Columns:
    """Mutable column-operation workspace recording right multiplications."""

    def __init__(self, M: Mat, rep: Representation):
        self.ring = M.ring
        self.n = M.nrows
        self.rows = [dict(r) for r in M.rows]
        self.rep = rep
        self.ops: list[RootLetter] = []

    def get(self, i: int, j: int) -> LaurentPoly:
        return self.rows[i].get(j, self.ring.zero)

    def add_column(self, src: int, dst: int, q: LaurentPoly) -> None:
        """col_dst += q·col_src, i.e. right multiplication by I + q·E_{src,dst}."""
        if not q:
            return
        for row in self.rows:
            if src in row:
                s = row.get(dst, self.ring.zero) + row[src] * q
                if s:
                    row[dst] = s
                else:
                    row.pop(dst, None)
        self.ops.append(elementary_letter(self.rep, src, dst, q))


def elementary_reduce(M: Mat, var: str, rep: Representation | None = None) -> tuple[Mat, Word]:
    """M = D·evaluate(word) with D a constant diagonal matrix."""
    if not M.is_square:
        raise RejectedInput("elementary_reduce needs a square matrix")
    n = M.nrows
    rep = rep or natural_rep(n)
    for v in M.entries():
        _check_univariate(v, var)
    work = _Columns(M, rep)
    for r in range(n):
        active = range(r, n)
        while True:
            nonzero = [c for c in active if work.get(r, c)]
            if not nonzero:
                raise RejectedInput("matrix is singular", residue={"row": r})
            if len(nonzero) == 1:
                break
            pivot = min(nonzero, key=lambda c: (work.get(r, c).degree(var), c))
            for c in nonzero:
                if c == pivot:
                    continue
                q, _ = poly_divmod(work.get(r, c), work.get(r, pivot), var)
                work.add_column(pivot, c, -q)
        p = nonzero[0]
        unit = work.get(r, p)
        if not unit.is_constant():
            raise RejectedInput(f"row {r} reduces to the non-unit {unit}; det is not a unit")
        if p != r:
            work.add_column(p, r, work.ring.one)
            work.add_column(r, p, -work.ring.one)
    # lower triangular with constant diagonal: clear below the diagonal
    for j in range(n):
        for i in range(j + 1, n):
            v = work.get(i, j)
            if v:
                work.add_column(i, j, -(v / work.get(i, i)))
    D = Mat(M.ring, n, n, work.rows)
    word = Word(M.ring, tuple(l.inverse() for l in reversed(work.ops)))
    logger.debug(f"column Euclid on {n}x{n}: {len(word)} letters")
    return D, word


# ── Constants and diagonals ──────────────────────────────────────────────────

def rank_one_torus(rep: Representation, i: int, u: LaurentPoly) -> list[RootLetter]:
    """diag(…, u, u⁻¹, …) at positions i, i+1 as w(u)·w(1)⁻¹."""
    one = u.ring.one
    inv = u.inverse()
    return [
        elementary_letter(rep, i, i + 1, u),
        elementary_letter(rep, i + 1, i, -inv),
        elementary_letter(rep, i, i + 1, u),
        elementary_letter(rep, i, i + 1, -one),
        elementary_letter(rep, i + 1, i, one),
        elementary_letter(rep, i, i + 1, -one),
    ]


def diagonal_word(rep: Representation, entries: Sequence[LaurentPoly]) -> list[RootLetter]:
    """diag(d_0, …, d_{n-1}) with ∏ d = 1 as a product of rank-one tori."""
    ring = entries[0].ring
    partial = ring.one
    letters: list[RootLetter] = []
    for i, d in enumerate(entries[:-1]):
        partial = partial * d
        if partial != 1:
            letters.extend(rank_one_torus(rep, i, partial))
    if partial * entries[-1] != 1:
        raise RejectedInput("diagonal entries do not multiply to 1")
    return letters


def factor_constant(D: Mat, rep: Representation | None = None) -> Word:
    """A constant matrix of determinant 1 as a word of elementary letters."""
    if not D.is_constant():
        raise RejectedInput("factor_constant needs a constant matrix")
    rep = rep or natural_rep(D.nrows)
    var = D.ring.variables[0] if D.ring.variables else None
    if var is None:
        raise RejectedInput("factor_constant needs a ring with at least one variable")
    diag, word = elementary_reduce(D, var, rep)
    letters = diagonal_word(rep, [diag[i, i] for i in range(D.nrows)])
    return Word(D.ring, tuple(letters)) * word


def first_order_word(rep: Representation, N: Mat, t: LaurentPoly) -> Word:
    """I + t·N (t² = 0, tr N = 0) as elementary letters and rank-one tori."""
    ring = N.ring
    letters: list[RootLetter] = []
    for i, row in enumerate(N.rows):
        for j, v in sorted(row.items()):
            if i != j:
                letters.append(elementary_letter(rep, i, j, t * v))
    diag = [ring.one + t * N[i, i] for i in range(N.nrows)]
    letters.extend(diagonal_word(rep, diag))
    return Word(ring, tuple(l for l in letters if not l.is_trivial()))


def dual_reduce(M: Mat, var: str, nil: str, rep: Representation | None = None) -> Word:
    """M over (k[t]/t²)[X] with det 1 as a word: M = M₀·(I + tN)."""
    ring = M.ring
    rep = rep or natural_rep(M.nrows)
    t = ring.gen(nil)
    flat = ring.drop([nil])
    D, w0 = elementary_reduce(M.substitute({nil: 0}, flat), var, rep)
    constant = diagonal_word(rep, [D[i, i] for i in range(M.nrows)])
    head = (Word(flat, tuple(constant)) * w0).to_ring(ring)
    head_inv = rep.evaluate(head.inverse())
    rest = head_inv * M
    N = (rest - Mat.identity(ring, M.nrows)).map(lambda p: p.part(nil, 1))
    return head * first_order_word(rep, N, t)
