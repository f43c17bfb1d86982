"""
matrices.py — Sparse exact matrices over a LaurentRing.
"""
from __future__ import annotations

import hashlib
import logging
from typing import Callable, Iterable, Mapping, Sequence

from sympy import Symbol
from sympy.polys.matrices import DomainMatrix

from modules.errors import ParseError, RejectedInput
from modules.rings import LaurentPoly, LaurentRing

logger = logging.getLogger(__name__)


class Mat:
    """Square or rectangular matrix stored as one {column: entry} dict per row."""

    __slots__ = ("ring", "nrows", "ncols", "rows")

    def __init__(self, ring: LaurentRing, nrows: int, ncols: int, rows: list[dict]):
        self.ring = ring
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows

    # ── Constructors ─────────────────────────────────────────────────────────

    @classmethod
    def identity(cls, ring: LaurentRing, n: int) -> "Mat":
        return cls(ring, n, n, [{i: ring.one} for i in range(n)])

    @classmethod
    def zeros(cls, ring: LaurentRing, nrows: int, ncols: int | None = None) -> "Mat":
        ncols = nrows if ncols is None else ncols
        return cls(ring, nrows, ncols, [{} for _ in range(nrows)])

    @classmethod
    def from_rows(cls, ring: LaurentRing, rows: Sequence[Sequence]) -> "Mat":
        if not rows:
            raise ParseError("empty matrix")
        ncols = len(rows[0])
        out = []
        for r in rows:
            if len(r) != ncols:
                raise ParseError("ragged matrix rows")
            d = {}
            for j, x in enumerate(r):
                v = ring.convert(x)
                if v:
                    d[j] = v
            out.append(d)
        return cls(ring, len(rows), ncols, out)

    @classmethod
    def from_int_sparse(cls, ring: LaurentRing, n: int, entries: Mapping[tuple, int]) -> "Mat":
        rows: list[dict] = [{} for _ in range(n)]
        for (i, j), c in entries.items():
            if c:
                rows[i][j] = ring.constant(c)
        return cls(ring, n, n, rows)

    @classmethod
    def diagonal(cls, ring: LaurentRing, entries: Sequence) -> "Mat":
        return cls(ring, len(entries), len(entries),
                   [{i: ring.convert(e)} if ring.convert(e) else {} for i, e in enumerate(entries)])

    # ── Access ───────────────────────────────────────────────────────────────

    def __getitem__(self, ij) -> LaurentPoly:
        i, j = ij
        return self.rows[i].get(j, self.ring.zero)

    def to_rows(self) -> list[list[LaurentPoly]]:
        return [[self[i, j] for j in range(self.ncols)] for i in range(self.nrows)]

    def to_text_rows(self) -> list[list[str]]:
        return [[str(self[i, j]) for j in range(self.ncols)] for i in range(self.nrows)]

    def digest(self) -> str:
        text = "\n".join(",".join(r) for r in self.to_text_rows())
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def __repr__(self) -> str:
        return f"Mat({self.to_text_rows()})"

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    # ── Arithmetic ───────────────────────────────────────────────────────────

    def __mul__(self, other: "Mat") -> "Mat":
        if not isinstance(other, Mat):
            return NotImplemented
        if self.ncols != other.nrows:
            raise RejectedInput("matrix shapes do not match")
        if other.ring != self.ring:
            other = other.to_ring(self.ring)
        out = []
        orows = other.rows
        for row in self.rows:
            acc: dict = {}
            for k, a in row.items():
                for j, b in orows[k].items():
                    v = acc.get(j)
                    acc[j] = a * b if v is None else v + a * b
            out.append({j: v for j, v in acc.items() if v})
        return Mat(self.ring, self.nrows, other.ncols, out)

    def __add__(self, other: "Mat") -> "Mat":
        out = []
        for r1, r2 in zip(self.rows, other.rows):
            d = dict(r1)
            for j, v in r2.items():
                s = d[j] + v if j in d else v
                if s:
                    d[j] = s
                else:
                    d.pop(j, None)
            out.append(d)
        return Mat(self.ring, self.nrows, self.ncols, out)

    def __neg__(self) -> "Mat":
        return Mat(self.ring, self.nrows, self.ncols,
                   [{j: -v for j, v in r.items()} for r in self.rows])

    def __sub__(self, other: "Mat") -> "Mat":
        return self + (-other)

    def scale(self, c) -> "Mat":
        c = self.ring.convert(c)
        out = []
        for r in self.rows:
            d = {}
            for j, v in r.items():
                w = v * c
                if w:
                    d[j] = w
            out.append(d)
        return Mat(self.ring, self.nrows, self.ncols, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            return False
        return all(r1 == r2 for r1, r2 in zip(self.rows, other.rows))

    __hash__ = None

    def transpose(self) -> "Mat":
        out: list[dict] = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                out[j][i] = v
        return Mat(self.ring, self.ncols, self.nrows, out)

    def is_identity(self) -> bool:
        if not self.is_square:
            return False
        one = self.ring.one
        for i, r in enumerate(self.rows):
            if len(r) != 1 or r.get(i) != one:
                return False
        return True

    def trace(self) -> LaurentPoly:
        acc = self.ring.zero
        for i, r in enumerate(self.rows):
            if i in r:
                acc = acc + r[i]
        return acc

    def map(self, fn: Callable[[LaurentPoly], LaurentPoly], ring: LaurentRing | None = None) -> "Mat":
        ring = ring or self.ring
        out = []
        for r in self.rows:
            d = {}
            for j, v in r.items():
                w = fn(v)
                if w:
                    d[j] = w
            out.append(d)
        return Mat(ring, self.nrows, self.ncols, out)

    def substitute(self, assignments: Mapping[str, object], target: LaurentRing | None = None) -> "Mat":
        target = target or self.ring
        return self.map(lambda v: v.substitute(assignments, target), target)

    def reduce(self, ideal) -> "Mat":
        return self.map(lambda v: v.reduce(ideal))

    def to_ring(self, ring: LaurentRing) -> "Mat":
        return self.map(ring.convert, ring)

    def entries(self) -> Iterable[LaurentPoly]:
        for r in self.rows:
            yield from r.values()

    def is_constant(self) -> bool:
        return all(v.is_constant() for v in self.entries())

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> "Mat":
        cpos = {c: k for k, c in enumerate(cols)}
        out = []
        for i in rows:
            out.append({cpos[j]: v for j, v in self.rows[i].items() if j in cpos})
        return Mat(self.ring, len(rows), len(cols), out)

    # ── Inverses ─────────────────────────────────────────────────────────────

    def is_unipotent(self) -> bool:
        n = self.nrows
        nil = self - Mat.identity(self.ring, n)
        power = nil
        for _ in range(n):
            if all(not r for r in power.rows):
                return True
            power = power * nil
        return all(not r for r in power.rows)

    def unipotent_inverse(self) -> "Mat":
        """(I + N)^{-1} = sum (-N)^k for nilpotent N."""
        n = self.nrows
        ident = Mat.identity(self.ring, n)
        neg = ident - self
        result, power = ident, ident
        for _ in range(n):
            power = power * neg
            if all(not r for r in power.rows):
                return result
            result = result + power
        raise RejectedInput("matrix is not unipotent")

    def gauss_jordan_inverse(self) -> "Mat":
        """Inverse by elimination with unit pivots; works over fields and local carriers."""
        n = self.nrows
        ring = self.ring
        a = [dict(r) for r in self.rows]
        inv = [{i: ring.one} for i in range(n)]
        for col in range(n):
            pivot = None
            for r in range(col, n):
                v = a[r].get(col)
                if v is not None and ring.is_unit(v):
                    pivot = r
                    break
            if pivot is None:
                raise RejectedInput("no unit pivot: matrix not invertible by elimination")
            a[col], a[pivot] = a[pivot], a[col]
            inv[col], inv[pivot] = inv[pivot], inv[col]
            p_inv = a[col][col].inverse()
            a[col] = {j: v * p_inv for j, v in a[col].items()}
            inv[col] = {j: v * p_inv for j, v in inv[col].items()}
            for r in range(n):
                if r == col or col not in a[r]:
                    continue
                f = a[r][col]
                _axpy(a[r], a[col], -f)
                _axpy(inv[r], inv[col], -f)
        return Mat(ring, n, n, inv)

    def adjugate_inverse(self) -> tuple["Mat", LaurentPoly]:
        """Faddeev-LeVerrier: needs 1..n invertible and det a unit."""
        n = self.nrows
        ring = self.ring
        if ring.characteristic and n >= ring.characteristic:
            raise RejectedInput("Faddeev-LeVerrier needs n < characteristic")
        ident = Mat.identity(ring, n)
        m = Mat.zeros(ring, n)
        c = ring.one
        for k in range(1, n + 1):
            m = self * m + ident.scale(c)
            c = (self * m).trace().scale(ring.scalar(-1) / ring.scalar(k))
        # after the loop c = c_0 and A M_n = -c_0 I
        det = c if n % 2 == 0 else -c
        return m.scale((-c).inverse()), det

    def inverse(self) -> "Mat":
        if self.is_unipotent():
            return self.unipotent_inverse()
        try:
            return self.gauss_jordan_inverse()
        except RejectedInput:
            inv, _ = self.adjugate_inverse()
            return inv

    def det(self) -> LaurentPoly:
        if not self.is_square:
            raise RejectedInput("determinant of a non-square matrix")
        if self.nrows <= 6:
            return _laplace(self.to_rows(), self.ring)
        return _bareiss_det(self)


def _axpy(target: dict, source: dict, factor: LaurentPoly) -> None:
    for j, v in source.items():
        w = target.get(j)
        s = v * factor if w is None else w + v * factor
        if s:
            target[j] = s
        else:
            target.pop(j, None)


def _laplace(rows: list[list[LaurentPoly]], ring: LaurentRing) -> LaurentPoly:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    acc = ring.zero
    for j, v in enumerate(rows[0]):
        if not v:
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = v * _laplace(minor, ring)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def _bareiss_det(m: Mat) -> LaurentPoly:
    """Fraction-free determinant in k[variables] after clearing negative powers row by row."""
    ring = m.ring
    n = m.nrows
    if not ring.variables:
        K = ring.domain
        rows = [[r[j].constant_term() if j in r else K.zero for j in range(n)] for r in m.rows]
        return ring.constant(DomainMatrix(rows, (n, n), K).det())
    P = ring.domain[tuple(Symbol(v) for v in ring.variables)]
    shift = [0] * len(ring.variables)
    rows = []
    for r in m.rows:
        low = [0] * len(ring.variables)
        for v in r.values():
            for mono in v.terms:
                low = [min(a, e) for a, e in zip(low, mono)]
        shift = [s - l for s, l in zip(shift, low)]
        row = [P.zero] * n
        for j, v in r.items():
            row[j] = P.ring.from_dict(
                {tuple(e - l for e, l in zip(mono, low)): c for mono, c in v.terms.items()}
            )
        rows.append(row)
    det = DomainMatrix(rows, (n, n), P).det()
    return ring.from_terms(
        {tuple(e - s for e, s in zip(mono, shift)): c for mono, c in det.terms()}
    )
