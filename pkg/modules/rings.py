"""
rings.py — Exact coefficient arithmetic.

Multivariate Laurent polynomials over Q, F_p (p >= 5) or a rational function
field k(Y), with optional nilpotent variables (t^2 = 0 gives the dual numbers),
plus localizations k[Y]_S with restricted denominators.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from tokenize import TokenError
from typing import Iterable, Mapping

from sympy import QQ, GF, Symbol, isprime
from sympy.polys.polyerrors import CoercionFailed
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)

from modules.errors import ParseError, RejectedInput

logger = logging.getLogger(__name__)

_TRANSFORMS = standard_transformations + (convert_xor,)


def make_field(name: str = "Q", prime: int | None = None, base: Iterable[str] = ()):
    """Return the sympy domain for Q, F_p or their rational function fields."""
    if name in ("Q", "QQ"):
        k = QQ
    elif name in ("Fp", "GF", "F"):
        if prime is None or prime < 5 or not isprime(prime):
            raise RejectedInput(f"finite field needs a prime p >= 5, got {prime}")
        k = GF(prime)
    else:
        raise ParseError(f"unknown field '{name}' (expected Q or Fp)")
    base = tuple(base)
    if base:
        k = k.frac_field(*[Symbol(b) for b in base])
    return k


class LaurentRing:
    """k[X_1^{±1}, ..., t]/(t^m) with per-variable Laurent and nilpotent flags."""

    def __init__(
        self,
        field: str = "Q",
        variables: Iterable[str] = (),
        laurent: Iterable[str] = (),
        nilpotent: Mapping[str, int] | None = None,
        prime: int | None = None,
        base: Iterable[str] = (),
    ):
        self.field_name = "Q" if field in ("Q", "QQ") else "Fp"
        self.prime = prime if self.field_name == "Fp" else None
        self.base = tuple(base)
        self.variables = tuple(variables)
        self.laurent = frozenset(laurent)
        self.nilpotent = dict(sorted((nilpotent or {}).items()))

        if len(set(self.variables)) != len(self.variables):
            raise ParseError(f"duplicate ring variables {self.variables}")
        if set(self.variables) & set(self.base):
            raise ParseError("a name cannot be both a ring variable and a base variable")
        unknown = (set(self.laurent) | set(self.nilpotent)) - set(self.variables)
        if unknown:
            raise ParseError(f"flags on undeclared variables: {sorted(unknown)}")
        if self.laurent & set(self.nilpotent):
            raise ParseError("a variable cannot be both Laurent and nilpotent")
        if any(order < 1 for order in self.nilpotent.values()):
            raise ParseError("nilpotency orders must be positive")

        self.domain = make_field(self.field_name, self.prime, self.base)
        self._index = {v: i for i, v in enumerate(self.variables)}
        self._nil = tuple((self._index[v], o) for v, o in self.nilpotent.items())
        self._polynomial_only = tuple(
            i for i, v in enumerate(self.variables) if v not in self.laurent
        )
        self._zero_mono = (0,) * len(self.variables)
        self.zero = LaurentPoly(self, {})
        self.one = LaurentPoly(self, {self._zero_mono: self.domain.one})

    # ── Identity ─────────────────────────────────────────────────────────────

    @property
    def key(self) -> tuple:
        return (
            self.field_name,
            self.prime,
            self.base,
            self.variables,
            tuple(sorted(self.laurent)),
            tuple(self.nilpotent.items()),
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentRing) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"LaurentRing({self.describe()})"

    def describe(self) -> str:
        k = "Q" if self.field_name == "Q" else f"F{self.prime}"
        if self.base:
            k += f"({','.join(self.base)})"
        parts = []
        for v in self.variables:
            if v in self.laurent:
                parts.append(f"{v}^±1")
            elif v in self.nilpotent:
                parts.append(f"{v}|{v}^{self.nilpotent[v]}=0")
            else:
                parts.append(v)
        return f"{k}[{', '.join(parts)}]" if parts else k

    @property
    def characteristic(self) -> int:
        return self.prime or 0

    @property
    def is_dual(self) -> bool:
        return bool(self.nilpotent)

    def to_dict(self) -> dict:
        d = {
            "field": self.field_name,
            "variables": list(self.variables),
            "laurent": sorted(self.laurent),
            "nilpotent": dict(self.nilpotent),
            "base": list(self.base),
        }
        if self.prime:
            d["prime"] = self.prime
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "LaurentRing":
        try:
            return cls(
                field=d.get("field", "Q"),
                variables=d.get("variables", ()),
                laurent=d.get("laurent", ()),
                nilpotent={k: int(v) for k, v in (d.get("nilpotent") or {}).items()},
                prime=d.get("prime"),
                base=d.get("base", ()),
            )
        except (TypeError, AttributeError) as e:
            raise ParseError(f"bad ring spec {d!r}: {e}") from e

    # ── Derived rings ────────────────────────────────────────────────────────

    def extend(
        self,
        variables: Iterable[str] = (),
        laurent: Iterable[str] = (),
        nilpotent: Mapping[str, int] | None = None,
    ) -> "LaurentRing":
        """Adjoin new variables after the existing ones."""
        new = [v for v in variables if v not in self._index]
        nil = dict(self.nilpotent)
        nil.update(nilpotent or {})
        return LaurentRing(
            self.field_name,
            self.variables + tuple(new),
            self.laurent | set(laurent),
            nil,
            self.prime,
            self.base,
        )

    def drop(self, names: Iterable[str]) -> "LaurentRing":
        names = set(names)
        return LaurentRing(
            self.field_name,
            tuple(v for v in self.variables if v not in names),
            self.laurent - names,
            {k: o for k, o in self.nilpotent.items() if k not in names},
            self.prime,
            self.base,
        )

    def with_laurent(self, names: Iterable[str]) -> "LaurentRing":
        return LaurentRing(
            self.field_name, self.variables, self.laurent | set(names),
            self.nilpotent, self.prime, self.base,
        )

    def with_base(self, base: Iterable[str], variables: Iterable[str] | None = None) -> "LaurentRing":
        """Same characteristic, new rational-function base and variables."""
        variables = self.variables if variables is None else tuple(variables)
        return LaurentRing(
            self.field_name,
            variables,
            self.laurent & set(variables),
            {k: o for k, o in self.nilpotent.items() if k in variables},
            self.prime,
            base,
        )

    # ── Scalars ──────────────────────────────────────────────────────────────

    def scalar(self, x):
        """Coerce int, Fraction, QQ element or a base-field element into the domain."""
        K = self.domain
        if isinstance(x, bool):
            x = int(x)
        if isinstance(x, int):
            return K.convert(x)
        if isinstance(x, Fraction):
            return self._ratio(x.numerator, x.denominator)
        if QQ.of_type(x):
            return self._ratio(int(QQ.numer(x)), int(QQ.denom(x)))
        try:
            return K.convert(x)
        except CoercionFailed as e:
            raise RejectedInput(f"cannot coerce {x!r} into {self.describe()}") from e

    def _ratio(self, n: int, d: int):
        K = self.domain
        den = K.convert(d)
        if not den:
            raise RejectedInput(f"denominator {d} vanishes in {self.describe()}")
        return K.convert(n) / den

    def coerce_scalar(self, c, source):
        """Map a scalar of ``source`` (another sympy domain) into this domain."""
        if source == self.domain:
            return c
        if source == QQ:
            return self.scalar(c)
        if getattr(source, "is_FiniteField", False):
            return self.scalar(int(c) % source.mod)
        try:
            return self.domain.convert(c, source)
        except CoercionFailed as e:
            raise RejectedInput(f"cannot map {c!r} from {source} into {self.describe()}") from e

    def format_scalar(self, c) -> str:
        if self.field_name == "Fp" and not self.base:
            return str(int(c) % self.prime)
        return str(self.domain.to_sympy(c))

    def base_gen(self, name: str):
        """The base-field generator ``name`` as a domain element."""
        if name not in self.base:
            raise RejectedInput(f"{name} is not a base variable of {self.describe()}")
        return self.domain.from_sympy(Symbol(name))

    # ── Elements ─────────────────────────────────────────────────────────────

    def gen(self, name: str) -> "LaurentPoly":
        if name not in self._index:
            raise RejectedInput(f"{name} is not a variable of {self.describe()}")
        mono = [0] * len(self.variables)
        mono[self._index[name]] = 1
        if self.nilpotent.get(name) == 1:
            return self.zero
        return LaurentPoly(self, {tuple(mono): self.domain.one})

    def gens(self) -> tuple["LaurentPoly", ...]:
        return tuple(self.gen(v) for v in self.variables)

    def constant(self, c) -> "LaurentPoly":
        c = self.scalar(c)
        return LaurentPoly(self, {self._zero_mono: c}) if c else self.zero

    def monomial(self, exponents: Mapping[str, int], coeff=1) -> "LaurentPoly":
        mono = [0] * len(self.variables)
        for name, e in exponents.items():
            if name not in self._index:
                raise RejectedInput(f"{name} is not a variable of {self.describe()}")
            mono[self._index[name]] = e
        return self.from_terms({tuple(mono): self.scalar(coeff)})

    def from_terms(self, terms: Mapping[tuple, object], check: bool = True) -> "LaurentPoly":
        clean = {}
        for mono, c in terms.items():
            if not c:
                continue
            if self._nil and any(mono[i] >= o for i, o in self._nil):
                continue
            clean[mono] = c
        if check:
            for mono in clean:
                for i in self._polynomial_only:
                    if mono[i] < 0:
                        raise RejectedInput(
                            f"negative power of polynomial variable {self.variables[i]}"
                        )
        return LaurentPoly(self, clean)

    def __call__(self, x) -> "LaurentPoly":
        return self.convert(x)

    def convert(self, x) -> "LaurentPoly":
        if isinstance(x, LaurentPoly):
            if x.ring is self or x.ring == self:
                return x
            return self.embed(x)
        if isinstance(x, str):
            return self.parse(x)
        return self.constant(x)

    def embed(self, p: "LaurentPoly") -> "LaurentPoly":
        """Reindex ``p`` from a ring whose variables are a subset of ours."""
        src = p.ring
        missing = [v for v in src.variables if v not in self._index]
        if missing:
            raise RejectedInput(f"cannot embed {src.describe()} into {self.describe()}: {missing}")
        positions = [self._index[v] for v in src.variables]
        terms = {}
        for mono, c in p.terms.items():
            new = [0] * len(self.variables)
            for pos, e in zip(positions, mono):
                new[pos] = e
            terms[tuple(new)] = self.coerce_scalar(c, src.domain)
        return self.from_terms(terms)

    # ── Units ────────────────────────────────────────────────────────────────

    def inverse(self, p: "LaurentPoly") -> "LaurentPoly":
        """Inverse of (monomial unit) + (nilpotent part); anything else is rejected."""
        if not p.terms:
            raise RejectedInput("division by zero")
        head, tail = {}, {}
        for mono, c in p.terms.items():
            if any(mono[i] for i, _ in self._nil):
                tail[mono] = c
            else:
                head[mono] = c
        if len(head) != 1:
            raise RejectedInput(f"{p} is not a unit in {self.describe()}")
        (mono, c), = head.items()
        if any(mono[i] for i in self._polynomial_only):
            raise RejectedInput(f"{p} is not a unit in {self.describe()}")
        u_inv = LaurentPoly(self, {tuple(-e for e in mono): self.domain.one / c})
        if not tail:
            return u_inv
        n = u_inv * LaurentPoly(self, tail)
        depth = sum(o - 1 for _, o in self._nil)
        result, power = self.one, self.one
        for _ in range(depth):
            power = power * (-n)
            if not power:
                break
            result = result + power
        return u_inv * result

    def is_unit(self, p: "LaurentPoly") -> bool:
        try:
            self.inverse(p)
        except RejectedInput:
            return False
        return True

    # ── Text ─────────────────────────────────────────────────────────────────

    def parse(self, text: str) -> "LaurentPoly":
        text = (text or "").strip()
        if not text:
            raise ParseError("empty polynomial")
        names = self.variables + self.base
        local = {n: Symbol(n) for n in names}
        try:
            expr = parse_expr(text, local_dict=local, transformations=_TRANSFORMS)
        except (SyntaxError, TokenError, TypeError, ValueError, AttributeError) as e:
            raise ParseError(f"cannot parse polynomial '{text}': {e}") from e
        stray = {str(s) for s in expr.free_symbols} - set(names)
        if stray:
            raise ParseError(f"unknown symbols {sorted(stray)} in '{text}'")
        return self._from_expr(expr)

    def _from_expr(self, expr) -> "LaurentPoly":
        ring_syms = {Symbol(v) for v in self.variables}
        if not (expr.free_symbols & ring_syms):
            if expr.is_Rational:
                return self.constant(Fraction(int(expr.p), int(expr.q)))
            if expr.is_Number:
                raise ParseError(f"inexact number {expr} not allowed")
            if not self.base:
                raise ParseError(f"cannot read coefficient {expr}")
            try:
                return self.constant(self.domain.from_sympy(expr))
            except (CoercionFailed, ZeroDivisionError) as e:
                raise ParseError(f"bad coefficient {expr}: {e}") from e
        if expr.is_Symbol:
            return self.gen(str(expr))
        if expr.is_Add:
            acc = self.zero
            for arg in expr.args:
                acc = acc + self._from_expr(arg)
            return acc
        if expr.is_Mul:
            acc = self.one
            for arg in expr.args:
                acc = acc * self._from_expr(arg)
            return acc
        if expr.is_Pow and expr.exp.is_Integer:
            return self._from_expr(expr.base) ** int(expr.exp)
        raise ParseError(f"unsupported expression {expr}")

    def format(self, p: "LaurentPoly") -> str:
        if not p.terms:
            return "0"
        pieces = []
        for mono in sorted(p.terms, reverse=True):
            c = p.terms[mono]
            factors = []
            for v, e in zip(self.variables, mono):
                if e == 1:
                    factors.append(v)
                elif e:
                    factors.append(f"{v}^{e}")
            mono_text = "*".join(factors)
            c_text = self.format_scalar(c)
            if self.base and not _plain_number(c_text):
                c_text = f"({c_text})"
            if not mono_text:
                pieces.append(c_text)
            elif c_text == "1":
                pieces.append(mono_text)
            elif c_text == "-1":
                pieces.append(f"-{mono_text}")
            else:
                pieces.append(f"{c_text}*{mono_text}")
        text = " + ".join(pieces)
        return text.replace("+ -", "- ")


def _plain_number(text: str) -> bool:
    body = text[1:] if text.startswith("-") else text
    return body.replace("/", "", 1).isdigit()


class LaurentPoly:
    """Immutable element of a LaurentRing: exponent tuple -> nonzero scalar."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: LaurentRing, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # ── Coercion ─────────────────────────────────────────────────────────────

    def _lift(self, other) -> "LaurentPoly | None":
        if isinstance(other, LaurentPoly):
            if other.ring is self.ring or other.ring == self.ring:
                return other
            return self.ring.convert(other)
        if isinstance(other, (int, Fraction)):
            return self.ring.constant(other)
        return None

    # ── Arithmetic ───────────────────────────────────────────────────────────

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        zero = self.ring.domain.zero
        for mono, c in other.terms.items():
            s = terms.get(mono, zero) + c
            if s:
                terms[mono] = s
            else:
                terms.pop(mono, None)
        return LaurentPoly(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if not self.terms or not other.terms:
            return self.ring.zero
        nil = self.ring._nil
        zero = self.ring.domain.zero
        acc: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                if nil and any(m[i] >= o for i, o in nil):
                    continue
                acc[m] = acc.get(m, zero) + c1 * c2
        return LaurentPoly(self.ring, {m: c for m, c in acc.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = self.ring.one, self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def inverse(self) -> "LaurentPoly":
        return self.ring.inverse(self)

    def is_unit(self) -> bool:
        return self.ring.is_unit(self)

    def scale(self, c) -> "LaurentPoly":
        c = self.ring.scalar(c)
        if not c:
            return self.ring.zero
        return LaurentPoly(self.ring, {m: v * c for m, v in self.terms.items()})

    # ── Comparison ───────────────────────────────────────────────────────────

    def __eq__(self, other) -> bool:
        # rational-function coefficients are not kept in lowest terms, so
        # compare through the difference
        if isinstance(other, LaurentPoly):
            if other.ring != self.ring:
                try:
                    other = self.ring.convert(other)
                except RejectedInput:
                    return False
        elif isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        else:
            return NotImplemented
        if self.terms.keys() != other.terms.keys():
            return False
        return not (self - other).terms

    def __hash__(self) -> int:
        if self._hash is None:
            if self.ring.base:
                self._hash = hash((self.ring.key, frozenset(self.terms)))
            else:
                self._hash = hash((self.ring.key, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"

    def __str__(self) -> str:
        return self.ring.format(self)

    # ── Inspection ───────────────────────────────────────────────────────────

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_term(self):
        return self.terms.get(self.ring._zero_mono, self.ring.domain.zero)

    def degree(self, var: str) -> int | None:
        i = self.ring._index[var]
        return max((m[i] for m in self.terms), default=None)

    def min_degree(self, var: str) -> int | None:
        i = self.ring._index[var]
        return min((m[i] for m in self.terms), default=None)

    def total_degree(self) -> int:
        return max((sum(abs(e) for e in m) for m in self.terms), default=0)

    def coefficients(self) -> list:
        return [self.terms[m] for m in sorted(self.terms)]

    def split_by_sign(self, var: str) -> tuple["LaurentPoly", "LaurentPoly"]:
        """(part with var-exponent >= 0, part with var-exponent < 0)."""
        i = self.ring._index[var]
        pos = {m: c for m, c in self.terms.items() if m[i] >= 0}
        neg = {m: c for m, c in self.terms.items() if m[i] < 0}
        return LaurentPoly(self.ring, pos), LaurentPoly(self.ring, neg)

    def part(self, var: str, exponent: int) -> "LaurentPoly":
        """Coefficient of var^exponent, still expressed in this ring."""
        i = self.ring._index[var]
        terms = {}
        for m, c in self.terms.items():
            if m[i] == exponent:
                mm = list(m)
                mm[i] = 0
                terms[tuple(mm)] = c
        return LaurentPoly(self.ring, terms)

    def involves(self, var: str) -> bool:
        i = self.ring._index.get(var)
        return i is not None and any(m[i] for m in self.terms)

    def monomials(self) -> list["LaurentPoly"]:
        return [LaurentPoly(self.ring, {m: self.terms[m]}) for m in sorted(self.terms)]

    # ── Maps ─────────────────────────────────────────────────────────────────

    def substitute(
        self,
        assignments: Mapping[str, object],
        target: LaurentRing | None = None,
    ) -> "LaurentPoly":
        """Ring homomorphism sending the named variables to the given values."""
        src = self.ring
        target = target or src
        values = []
        for name in src.variables:
            if name in assignments:
                values.append(target.convert(assignments[name]))
            elif name in target._index:
                values.append(target.gen(name))
            else:
                raise RejectedInput(f"variable {name} has no image in {target.describe()}")
        powers: dict = {}

        def power(i: int, e: int) -> LaurentPoly:
            key = (i, e)
            if key not in powers:
                if e < 0:
                    powers[key] = values[i].inverse() ** (-e)
                else:
                    powers[key] = values[i] ** e
            return powers[key]

        acc: dict = {}
        zero = target.domain.zero
        for mono, c in self.terms.items():
            term = target.constant(target.coerce_scalar(c, src.domain))
            for i, e in enumerate(mono):
                if e:
                    term = term * power(i, e)
            for m, v in term.terms.items():
                acc[m] = acc.get(m, zero) + v
        return target.from_terms(acc)

    def reduce(self, ideal) -> "LaurentPoly":
        """Canonical representative modulo the ideal generated by the named variables."""
        names = (ideal,) if isinstance(ideal, str) else tuple(ideal)
        for name in names:
            if name not in self.ring._index:
                raise RejectedInput(f"unsupported ideal ({name}) in {self.ring.describe()}")
            i = self.ring._index[name]
            if any(m[i] < 0 for m in self.terms):
                raise RejectedInput(f"{self} is not in the polynomial part for ({name})")
        idx = [self.ring._index[n] for n in names]
        return LaurentPoly(
            self.ring, {m: c for m, c in self.terms.items() if not any(m[i] for i in idx)}
        )

    def map_coefficients(self, fn, target: LaurentRing | None = None) -> "LaurentPoly":
        target = target or self.ring
        return target.from_terms({m: fn(c) for m, c in self.terms.items()})

    def to_dict(self) -> dict:
        return {
            "terms": [
                {"exponents": list(m), "coeff": self.ring.format_scalar(self.terms[m])}
                for m in sorted(self.terms)
            ]
        }

    @classmethod
    def from_dict(cls, ring: LaurentRing, d: Mapping) -> "LaurentPoly":
        terms = {}
        try:
            for t in d["terms"]:
                mono = tuple(int(e) for e in t["exponents"])
                if len(mono) != len(ring.variables):
                    raise ParseError(f"exponent vector {mono} does not match {ring.describe()}")
                terms[mono] = ring.parse(str(t["coeff"])).constant_term()
        except (KeyError, TypeError) as e:
            raise ParseError(f"bad term map: {e}") from e
        return ring.from_terms(terms)


# ── Base-field transfer ───────────────────────────────────────────────────────

def absorb_into_base(p: LaurentPoly, target: LaurentRing) -> LaurentPoly:
    """Move variables of ``p`` that are base generators of ``target`` into coefficients."""
    src = p.ring
    acc: dict = {}
    zero = target.domain.zero
    for mono, c in p.terms.items():
        coeff = target.coerce_scalar(c, src.domain)
        rest = {}
        for name, e in zip(src.variables, mono):
            if not e:
                continue
            if name in target.base:
                g = target.base_gen(name)
                coeff = coeff * (g ** e if e > 0 else (target.domain.one / g) ** (-e))
            else:
                rest[name] = e
        term = target.monomial(rest, 1)
        for m, v in term.terms.items():
            acc[m] = acc.get(m, zero) + v * coeff
    return target.from_terms(acc)


def release_from_base(p: LaurentPoly, target: LaurentRing) -> LaurentPoly:
    """Inverse of absorb_into_base for denominator-free coefficients.

    Base generators that are also base generators of ``target`` stay in the coefficient.
    """
    src = p.ring
    acc: dict = {}
    for mono, c in p.terms.items():
        if not c.denom.is_ground:
            raise RejectedInput(f"coefficient {src.format_scalar(c)} has a denominator")
        ground = src.domain.domain
        scale = ground.one / c.denom.LC
        numer = c.numer
        base_names = [str(s) for s in numer.ring.symbols]
        for bmono, bc in numer.terms():
            exps = {name: e for name, e in zip(src.variables, mono) if e}
            coeff = target.coerce_scalar(bc * scale, ground)
            for name, e in zip(base_names, bmono):
                if not e:
                    continue
                if name in target.base:
                    coeff = coeff * target.base_gen(name) ** e
                else:
                    exps[name] = exps.get(name, 0) + e
            term = target.monomial(exps, 1)
            for m, v in term.terms.items():
                acc[m] = acc.get(m, target.domain.zero) + v * coeff
    return target.from_terms(acc)


# ── Localizations ─────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Localization:
    """k[Y]_S: coefficients whose denominators divide products of the allowed bases."""

    ring: LaurentRing
    bases: tuple = ()

    @classmethod
    def of(cls, ring: LaurentRing, *bases) -> "Localization":
        K = ring.domain
        conv = []
        for b in bases:
            if isinstance(b, str):
                b = K.from_sympy(parse_expr(b, local_dict={n: Symbol(n) for n in ring.base},
                                            transformations=_TRANSFORMS))
            elif isinstance(b, LaurentPoly):
                b = b.constant_term()
            conv.append(K.convert(b))
        return cls(ring, tuple(conv))

    def describe(self) -> str:
        if not self.bases:
            return "polynomial"
        return "denominators:" + "*".join(f"({self.ring.format_scalar(b)})" for b in self.bases)

    def contains(self, c) -> bool:
        if not self.ring.base:
            return True
        den = c.denom
        for b in self.bases:
            numer = b.numer
            while not den.is_ground:
                g = den.gcd(numer)
                if g.is_ground:
                    break
                den = den.quo(g)
        return den.is_ground

    def contains_poly(self, p: LaurentPoly) -> bool:
        return all(self.contains(c) for c in p.terms.values())

    def valuation(self, c, pi) -> int:
        """Exponent of the polynomial ``pi`` in the rational function ``c``."""
        if not c:
            return 10 ** 6
        pi_num = pi.numer if hasattr(pi, "numer") else pi
        return _multiplicity(c.numer, pi_num) - _multiplicity(c.denom, pi_num)

    def poly_valuation(self, p: LaurentPoly, pi) -> int:
        return min((self.valuation(c, pi) for c in p.terms.values()), default=10 ** 6)

    def bezout(self, f, g, k: int = 1) -> tuple:
        """Return (s, t) with f^k s + g^k t = 1 in k[Y]; rejects non-comaximal pairs."""
        F = (f ** k).numer
        G = (g ** k).numer
        s, t, h = F.gcdex(G)
        if not h.is_ground or not h:
            raise RejectedInput(f"{self.ring.format_scalar(f)} and {self.ring.format_scalar(g)} are not comaximal")
        field = self.ring.domain.field
        inv = field.field_new(h)
        return field.field_new(s) / inv, field.field_new(t) / inv

    def partial_fractions(self, c, f, g) -> tuple:
        """Split c with denominator f^a g^b into (part over k[Y]_f, part over k[Y]_g)."""
        den = c.denom
        a = _multiplicity(den, f.numer)
        b = _multiplicity(den, g.numer)
        rest = den.quo(f.numer ** a).quo(g.numer ** b) if (a or b) else den
        if not rest.is_ground:
            raise RejectedInput("denominator is not a product of powers of f and g")
        field = self.ring.domain.field
        if a == 0:
            return field.field_new(field.ring.zero), c
        if b == 0:
            return c, field.field_new(field.ring.zero)
        s, t = self._bezout_powers(f, g, a, b)
        # c = c (f^a s + g^b t)
        part_f = c * (g ** b) * t
        part_g = c * (f ** a) * s
        return part_f, part_g

    def _bezout_powers(self, f, g, a: int, b: int) -> tuple:
        F = (f ** a).numer
        G = (g ** b).numer
        s, t, h = F.gcdex(G)
        if not h.is_ground:
            raise RejectedInput("f and g are not comaximal")
        field = self.ring.domain.field
        inv = field.field_new(h)
        return field.field_new(s) / inv, field.field_new(t) / inv


def _multiplicity(poly, pi) -> int:
    if pi.is_ground or not poly:
        return 0
    n = 0
    while True:
        q, r = divmod(poly, pi)
        if r:
            return n
        poly = q
        n += 1
