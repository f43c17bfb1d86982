from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Union

from modules.errors import ParseError, RejectedInput
from modules.rings import LaurentPoly, LaurentRing


@dataclass(frozen=True)
class RootLetter:
    """x_β(t) for an absolute root β."""

    root: tuple[int, ...]
    param: LaurentPoly

    kind = "x"

    def inverse(self) -> "RootLetter":
        return RootLetter(self.root, -self.param)

    def map_params(self, fn: Callable[[LaurentPoly], LaurentPoly]) -> "RootLetter":
        return RootLetter(self.root, fn(self.param))

    @property
    def params(self) -> tuple[LaurentPoly, ...]:
        return (self.param,)

    def is_trivial(self) -> bool:
        return self.param.is_zero

    def text(self) -> str:
        return f"x[{_vec(self.root)}]({self.param})"

    def to_dict(self) -> dict:
        return {"kind": "x", "root": list(self.root), "param": str(self.param)}


@dataclass(frozen=True)
class TorusLetter:
    """χ(u) for a cocharacter χ on the coweight basis and a unit u."""

    cochar: tuple[int, ...]
    unit: LaurentPoly

    kind = "chi"

    def inverse(self) -> "TorusLetter":
        return TorusLetter(self.cochar, self.unit.inverse())

    def map_params(self, fn: Callable[[LaurentPoly], LaurentPoly]) -> "TorusLetter":
        return TorusLetter(self.cochar, fn(self.unit))

    @property
    def params(self) -> tuple[LaurentPoly, ...]:
        return (self.unit,)

    def is_trivial(self) -> bool:
        return not any(self.cochar) or self.unit == 1

    def text(self) -> str:
        return f"chi[{_vec(self.cochar)}]({self.unit})"

    def to_dict(self) -> dict:
        return {"kind": "chi", "cochar": list(self.cochar), "unit": str(self.unit)}


@dataclass(frozen=True)
class RelLetter:
    """X_α(v) for a relative root α and v indexed by the fiber of α (lex order)."""

    root: tuple[int, ...]
    params: tuple[LaurentPoly, ...]

    kind = "X"

    def inverse(self) -> "RelLetter":
        return RelLetter(self.root, tuple(-p for p in self.params))

    def map_params(self, fn: Callable[[LaurentPoly], LaurentPoly]) -> "RelLetter":
        return RelLetter(self.root, tuple(fn(p) for p in self.params))

    def is_trivial(self) -> bool:
        return all(p.is_zero for p in self.params)

    def text(self) -> str:
        return f"X[{_vec(self.root)}]({', '.join(str(p) for p in self.params)})"

    def to_dict(self) -> dict:
        return {"kind": "X", "root": list(self.root), "params": [str(p) for p in self.params]}


Letter = Union[RootLetter, TorusLetter, RelLetter]


def _vec(v: Iterable[int]) -> str:
    return ",".join(str(x) for x in v)


@dataclass(frozen=True)
class Word:
    """A finite product of letters over one coefficient ring."""

    ring: LaurentRing
    letters: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __bool__(self) -> bool:
        return True

    def __mul__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        if other.ring != self.ring:
            other = other.to_ring(self.ring)
        return Word(self.ring, self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(self.ring, tuple(l.inverse() for l in reversed(self.letters)))

    @property
    def is_empty(self) -> bool:
        return not self.letters

    @property
    def is_relative(self) -> bool:
        return any(isinstance(l, RelLetter) for l in self.letters)

    def map_params(self, fn: Callable[[LaurentPoly], LaurentPoly], ring: LaurentRing | None = None) -> "Word":
        return Word(ring or self.ring, tuple(l.map_params(fn) for l in self.letters))

    def substitute(self, assignments, target: LaurentRing | None = None) -> "Word":
        target = target or self.ring
        return self.map_params(lambda p: p.substitute(assignments, target), target)

    def to_ring(self, ring: LaurentRing) -> "Word":
        return self.map_params(ring.convert, ring)

    def params(self) -> list[LaurentPoly]:
        out = []
        for l in self.letters:
            out.extend(l.params)
        return out

    def simplify(self) -> "Word":
        """Merge adjacent letters on the same absolute root and drop trivial ones."""
        out: list = []
        for l in self.letters:
            if isinstance(l, RootLetter) and out and isinstance(out[-1], RootLetter) \
                    and out[-1].root == l.root:
                merged = RootLetter(l.root, out[-1].param + l.param)
                out.pop()
                if not merged.is_trivial():
                    out.append(merged)
                continue
            if not l.is_trivial():
                out.append(l)
        return Word(self.ring, tuple(out))

    def text(self) -> str:
        if not self.letters:
            return "1"
        return " * ".join(l.text() for l in self.letters)

    def __str__(self) -> str:
        return self.text()

    def to_dict(self) -> dict:
        return {"ring": self.ring.to_dict(), "letters": [l.to_dict() for l in self.letters]}

    @classmethod
    def from_dict(cls, d: dict, ring: LaurentRing | None = None) -> "Word":
        ring = ring or LaurentRing.from_dict(d["ring"])
        letters = []
        for item in d.get("letters", []):
            kind = item.get("kind")
            if kind == "x":
                letters.append(RootLetter(tuple(item["root"]), ring.parse(item["param"])))
            elif kind == "chi":
                letters.append(TorusLetter(tuple(item["cochar"]), ring.parse(item["unit"])))
            elif kind == "X":
                letters.append(RelLetter(tuple(item["root"]), tuple(ring.parse(p) for p in item["params"])))
            else:
                raise ParseError(f"unknown letter kind {kind!r}")
        return cls(ring, tuple(letters))

    @classmethod
    def parse(cls, text: str, ring: LaurentRing) -> "Word":
        return cls(ring, tuple(parse_letters(text, ring)))


# ── Grammar ───────────────────────────────────────────────────────────────────

_HEAD = re.compile(r"\s*(x|chi|X)\s*\[\s*([-\d\s,]*)\]\s*")


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced brackets in '{text}'")
        elif ch == sep and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    if depth:
        raise ParseError(f"unbalanced brackets in '{text}'")
    parts.append(text[start:])
    return parts


def parse_letters(text: str, ring: LaurentRing) -> list[Letter]:
    """`x[1,0](3/2*X) * x[0,1](X^-1)^-1 * chi[1,0](X) * X[1,1](v1, v2)`; `1` is the empty word."""
    text = (text or "").strip()
    if text in ("", "1"):
        return []
    letters = []
    for token in _split_top(text, "*"):
        token = token.strip()
        if token == "1":
            continue
        m = _HEAD.match(token)
        if not m:
            raise ParseError(f"cannot read letter '{token}'")
        kind, vec = m.group(1), m.group(2)
        try:
            coords = tuple(int(x) for x in vec.replace(" ", "").split(",") if x)
        except ValueError as e:
            raise ParseError(f"bad root vector in '{token}'") from e
        rest = token[m.end():]
        if not rest.startswith("("):
            raise ParseError(f"missing parameter in '{token}'")
        depth, close = 0, None
        for i, ch in enumerate(rest):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    close = i
                    break
        if close is None:
            raise ParseError(f"unbalanced parameter in '{token}'")
        body, tail = rest[1:close], rest[close + 1:].replace(" ", "")
        if tail not in ("", "^-1"):
            raise ParseError(f"unexpected '{tail}' after letter '{token}'")
        if kind == "x":
            letter = RootLetter(coords, ring.parse(body))
        elif kind == "chi":
            letter = TorusLetter(coords, ring.parse(body))
            if tail:
                try:
                    letter.unit.inverse()
                except RejectedInput as e:
                    raise RejectedInput(f"torus parameter {letter.unit} is not a unit") from e
        else:
            letter = RelLetter(coords, tuple(ring.parse(p) for p in _split_top(body, ",")))
        letters.append(letter.inverse() if tail else letter)
    return letters
