from __future__ import annotations
from dataclasses import dataclass, field
from typing import Optional

from models.word import Word
from modules.errors import ParseError
from modules.matrices import Mat
from modules.rings import LaurentRing


STATEMENTS = (
    "gauss", "gauss-congruence", "shrink", "shift", "suslin", "excision",
    "laurent", "congruence-laurent", "patch",
)


def _matrix_from_rows(ring: LaurentRing, rows) -> Mat:
    if not isinstance(rows, list) or not rows:
        raise ParseError("matrix must be a non-empty list of rows")
    return Mat.from_rows(ring, [[str(x) for x in r] for r in rows])


@dataclass
class CertificatePart:
    name: str
    ring: LaurentRing
    pattern: str = "laurent"               # ';'-joined membership patterns
    word: Optional[Word] = None
    matrix: Optional[Mat] = None

    @property
    def patterns(self) -> list[str]:
        return [p for p in self.pattern.split(";") if p]

    def to_dict(self) -> dict:
        d = {"name": self.name, "ring": self.ring.to_dict(), "pattern": self.pattern}
        if self.word is not None:
            d["word"] = self.word.text()
        if self.matrix is not None:
            d["matrix"] = self.matrix.to_text_rows()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CertificatePart":
        try:
            ring = LaurentRing.from_dict(d["ring"])
            word = Word.parse(d["word"], ring) if "word" in d else None
            matrix = _matrix_from_rows(ring, d["matrix"]) if "matrix" in d else None
            return cls(d["name"], ring, d.get("pattern", "laurent"), word, matrix)
        except (KeyError, TypeError) as e:
            raise ParseError(f"bad certificate part: {e}") from e


@dataclass
class Certificate:
    statement: str
    group: dict
    ring: LaurentRing
    parts: list[CertificatePart] = field(default_factory=list)
    input_word: Optional[Word] = None
    input_matrix: Optional[Mat] = None
    transcript: dict = field(default_factory=dict)   # {"hash": ..., "flags": {...}}
    data: dict = field(default_factory=dict)

    def part(self, name: str) -> CertificatePart:
        for p in self.parts:
            if p.name == name:
                return p
        raise KeyError(name)

    def to_dict(self) -> dict:
        d = {
            "kind": "certificate",
            "statement": self.statement,
            "group": self.group,
            "ring": self.ring.to_dict(),
            "parts": [p.to_dict() for p in self.parts],
            "transcript": self.transcript,
            "data": self.data,
        }
        if self.input_word is not None:
            d["input"] = {"word": self.input_word.text()}
        elif self.input_matrix is not None:
            d["input"] = {"matrix": self.input_matrix.to_text_rows()}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        try:
            if d.get("statement") not in STATEMENTS:
                raise ParseError(f"unknown statement {d.get('statement')!r}")
            ring = LaurentRing.from_dict(d["ring"])
            inp = d.get("input", {})
            return cls(
                statement=d["statement"],
                group=dict(d["group"]),
                ring=ring,
                parts=[CertificatePart.from_dict(p) for p in d.get("parts", [])],
                input_word=Word.parse(inp["word"], ring) if "word" in inp else None,
                input_matrix=_matrix_from_rows(ring, inp["matrix"]) if "matrix" in inp else None,
                transcript=dict(d.get("transcript", {})),
                data=dict(d.get("data", {})),
            )
        except (KeyError, TypeError, AttributeError) as e:
            raise ParseError(f"bad certificate: {e}") from e


@dataclass
class K1Certificate:
    """g = g₀·evaluate(word) in SL_m(k[X_1..X_n]) with g₀ constant."""

    m: int
    ring: LaurentRing
    n: int
    matrix: Mat
    constant: Mat
    word: Word
    transcript: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)

    @property
    def group(self) -> dict:
        return {"type": "A", "rank": self.m - 1, "rep": "natural"}

    def to_dict(self) -> dict:
        return {
            "kind": "k1",
            "group": self.group,
            "field": self.ring.describe(),
            "ring": self.ring.to_dict(),
            "n": self.n,
            "input": self.matrix.to_text_rows(),
            "constant": self.constant.to_text_rows(),
            "word": self.word.text(),
            "transcript": self.transcript,
            "data": self.data,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "K1Certificate":
        try:
            ring = LaurentRing.from_dict(d["ring"])
            matrix = _matrix_from_rows(ring, d["input"])
            return cls(
                m=matrix.nrows,
                ring=ring,
                n=int(d["n"]),
                matrix=matrix,
                constant=_matrix_from_rows(ring, d["constant"]),
                word=Word.parse(d["word"], ring),
                transcript=dict(d.get("transcript", {})),
                data=dict(d.get("data", {})),
            )
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(f"bad K1 certificate: {e}") from e


def load_certificate(d: dict) -> "Certificate | K1Certificate":
    if d.get("kind") == "k1":
        return K1Certificate.from_dict(d)
    return Certificate.from_dict(d)


@dataclass
class VerificationReport:
    ok: bool
    failures: list[str] = field(default_factory=list)
    checks: list[str] = field(default_factory=list)
    hash: Optional[str] = None

    def to_dict(self) -> dict:
        return {"ok": self.ok, "failures": self.failures, "checks": self.checks, "hash": self.hash}
