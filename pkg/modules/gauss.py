"""
gauss.py — Gauss decomposition G = U⁺·U⁻·L·U⁺ over fields and dual numbers.

The representation space is graded by J-degree; U⁺ raises it, U⁻ lowers it
and L preserves it.  After a left factor u₁ ∈ U⁺ puts g into the big cell,
block LDU elimination in that grading reads off the remaining three factors.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Sequence

import config
from models.certificate import Certificate, CertificatePart
from models.word import RootLetter, Word
from modules.chevgrp import unipotent_factorize
from modules.errors import BudgetExhausted, RejectedInput
from modules.matrices import Mat
from modules.relgrp import RelativeGroup
from modules.rings import LaurentPoly, LaurentRing
from modules.verify import seal

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GaussFactors:
    u1: Word
    u2: Word
    l: Mat
    u3: Word
    attempts: int = 1


@dataclass(frozen=True)
class CongruenceFactors:
    upper: Word
    l: Mat
    lower: Word


# ── Gradings ─────────────────────────────────────────────────────────────────

def degree_blocks(group: RelativeGroup, descending: bool = True) -> list[list[int]]:
    """Basis indices grouped by J-degree of their weight."""
    rrd = group.rrd
    by_degree: dict[int, list[int]] = {}
    for i, w in enumerate(group.rep.weights):
        by_degree.setdefault(rrd.degree(w), []).append(i)
    keys = sorted(by_degree, reverse=descending)
    return [by_degree[k] for k in keys]


def unipotent_roots(group: RelativeGroup, sign: int) -> list[tuple[int, ...]]:
    """Absolute roots of U⁺ (sign 1) or U⁻ (sign −1), ordered for left peeling."""
    rrd = group.rrd
    roots = [b for b in group.rd.roots if rrd.degree(b) * sign > 0]
    return sorted(roots, key=lambda b: (sign * sum(b), b))


# ── Block elimination ────────────────────────────────────────────────────────

def _assemble(ring: LaurentRing, n: int, blocks: Sequence[Sequence[int]], pieces: dict,
              unit_diagonal: bool) -> Mat:
    rows: list[dict] = [{i: ring.one} if unit_diagonal else {} for i in range(n)]
    for (bi, bj), M in pieces.items():
        for a, i in enumerate(blocks[bi]):
            for b, v in M.rows[a].items():
                rows[i][blocks[bj][b]] = v
    return Mat(ring, n, n, rows)


def block_ldu(M: Mat, blocks: Sequence[Sequence[int]]) -> tuple[Mat, Mat, Mat] | None:
    """M = L·D·U with L, U block unitriangular; None when a pivot block is singular."""
    r = len(blocks)
    S = {(i, j): M.block(blocks[i], blocks[j]) for i in range(r) for j in range(r)}
    lower, upper, diag = {}, {}, {}
    for k in range(r):
        P = S[k, k]
        try:
            P_inv = P.gauss_jordan_inverse()
        except RejectedInput:
            return None
        diag[k, k] = P
        for i in range(k + 1, r):
            lower[i, k] = S[i, k] * P_inv
        for j in range(k + 1, r):
            upper[k, j] = P_inv * S[k, j]
        for i in range(k + 1, r):
            for j in range(k + 1, r):
                S[i, j] = S[i, j] - lower[i, k] * S[k, j]
    ring, n = M.ring, M.nrows
    return (
        _assemble(ring, n, blocks, lower, True),
        _assemble(ring, n, blocks, diag, False),
        _assemble(ring, n, blocks, upper, True),
    )


# ── Search ───────────────────────────────────────────────────────────────────

def _scalar_range(ring: LaurentRing) -> int:
    return ring.characteristic or 7


def _candidates(group: RelativeGroup, ring: LaurentRing, seed: int, tries: int, sign: int = 1):
    """u₁ ∈ U^±: the identity, ∏ x_β(1), then seeded random products."""
    roots = unipotent_roots(group, sign)
    yield Word(ring)
    yield Word(ring, tuple(RootLetter(b, ring.one) for b in roots))
    span = _scalar_range(ring)
    for attempt in range(tries):
        rng = random.Random(seed * 1000003 + attempt)
        letters = []
        for b in roots:
            c = rng.randrange(span)
            if c:
                letters.append(RootLetter(b, ring.constant(c)))
        yield Word(ring, tuple(letters))


def _check_group_element(group: RelativeGroup, g: Mat) -> None:
    if g.nrows != group.rep.dim or not g.is_square:
        raise RejectedInput(
            f"matrix is {g.nrows}x{g.ncols}, representation {group.rep.name} of "
            f"{group.rd.label} has dimension {group.rep.dim}"
        )
    det = g.det()
    if det != 1:
        raise RejectedInput(f"determinant {det} != 1; not a group element")


def gauss_decompose(group: RelativeGroup, g: Mat, seed: int | None = None,
                    tries: int | None = None, sign: int = 1) -> GaussFactors:
    """g = u₁·u₂·l·u₃ with u₁, u₃ ∈ U⁺, u₂ ∈ U⁻ and l ∈ L.

    sign=-1 swaps the unipotent radicals: u₁, u₃ ∈ U⁻ and u₂ ∈ U⁺.
    """
    ring = g.ring
    if any(v not in ring.nilpotent for v in ring.variables):
        raise RejectedInput("Gauss decomposition needs a field or dual numbers as coefficients")
    _check_group_element(group, g)
    seed = config.SEED if seed is None else seed
    tries = config.GAUSS_SEARCH_TRIES if tries is None else tries
    rep = group.rep
    blocks = degree_blocks(group, descending=sign > 0)
    lower_roots = unipotent_roots(group, -sign)
    upper_roots = unipotent_roots(group, sign)

    for attempt, u1 in enumerate(_candidates(group, ring, seed, tries, sign), start=1):
        h = rep.evaluate(u1.inverse()) * g
        ldu = block_ldu(h, blocks)
        if ldu is None:
            continue
        L, D, U = ldu
        try:
            u2 = unipotent_factorize(rep, L, lower_roots, ring)
            u3 = unipotent_factorize(rep, U, upper_roots, ring)
        except RejectedInput as e:
            logger.debug(f"gauss candidate {attempt}: factors leave the group ({e})")
            continue
        logger.info(f"gauss decomposition found after {attempt} candidate(s)")
        return GaussFactors(u1, u2, D, u3, attempt)
    raise BudgetExhausted(f"no u₁ put g into the big cell within {tries + 2} candidates")


def congruence_gauss(group: RelativeGroup, g: Mat, nil: str = "t") -> CongruenceFactors:
    """g ≡ 1 mod t as U⁺(tA)·L(tA)·U⁻(tA), every factor ≡ 1 mod t."""
    ring = g.ring
    if nil not in ring.nilpotent:
        raise RejectedInput(f"{nil} is not a nilpotent variable of {ring.describe()}")
    _check_group_element(group, g)
    if not g.reduce(nil).is_identity():
        raise RejectedInput(f"matrix is not congruent to 1 modulo ({nil})", residue=g.reduce(nil).to_text_rows())
    ldu = block_ldu(g, degree_blocks(group, descending=False))
    if ldu is None:
        raise RejectedInput("a pivot block is not invertible; input is not congruent to 1")
    Up, D, Um = ldu
    upper = unipotent_factorize(group.rep, Up, unipotent_roots(group, 1), ring)
    lower = unipotent_factorize(group.rep, Um, unipotent_roots(group, -1), ring)
    return CongruenceFactors(upper, D, lower)


def random_group_element(group: RelativeGroup, ring: LaurentRing, rng: random.Random,
                         length: int = 12, params: Sequence[LaurentPoly] | None = None) -> Mat:
    """Product of random root letters, for tests and the acceptance suite."""
    roots = group.rd.roots
    span = _scalar_range(ring)
    letters = []
    for _ in range(length):
        b = roots[rng.randrange(len(roots))]
        p = params[rng.randrange(len(params))] if params else ring.constant(rng.randrange(1, span))
        letters.append(RootLetter(b, p))
    return group.rep.evaluate(Word(ring, tuple(letters)))


# ── Certificates ─────────────────────────────────────────────────────────────

def gauss_certificate(group: RelativeGroup, g: Mat, seed: int | None = None) -> Certificate:
    f = gauss_decompose(group, g, seed)
    ring = g.ring
    cert = Certificate(
        statement="gauss",
        group=group.describe(),
        ring=ring,
        input_matrix=g,
        parts=[
            CertificatePart("u1", ring, "upper", word=f.u1),
            CertificatePart("u2", ring, "lower", word=f.u2),
            CertificatePart("l", ring, "levi", matrix=f.l),
            CertificatePart("u3", ring, "upper", word=f.u3),
        ],
        data={"attempts": f.attempts},
    )
    return seal(cert)


def congruence_gauss_certificate(group: RelativeGroup, g: Mat, nil: str = "t") -> Certificate:
    f = congruence_gauss(group, g, nil)
    ring = g.ring
    cong = f"congruent:{nil}"
    cert = Certificate(
        statement="gauss-congruence",
        group=group.describe(),
        ring=ring,
        input_matrix=g,
        parts=[
            CertificatePart("upper", ring, f"upper;{cong}", word=f.upper),
            CertificatePart("l", ring, f"levi;{cong}", matrix=f.l),
            CertificatePart("lower", ring, f"lower;{cong}", word=f.lower),
        ],
    )
    return seal(cert)
