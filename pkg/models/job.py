from __future__ import annotations
import json
from dataclasses import dataclass, field, asdict
from typing import Optional

from modules.errors import ParseError
from modules.rings import LaurentRing


COMMANDS = (
    "roots", "relative", "constants", "gauss", "shrink", "shift", "suslin",
    "excision", "laurent", "k1-factor", "verify", "suite", "identities",
)

DUAL_VARIABLE = "t"


def _int_list(value) -> list[int]:
    if value is None or value == "":
        return []
    if isinstance(value, str):
        try:
            return [int(x) for x in value.replace(" ", "").split(",") if x]
        except ValueError as e:
            raise ParseError(f"expected comma-separated integers, got {value!r}") from e
    return [int(x) for x in value]


def _name_list(value) -> list[str]:
    if not value:
        return []
    if isinstance(value, str):
        return [x.strip() for x in value.split(",") if x.strip()]
    return [str(x) for x in value]


def parse_gamma(text: str, rank: int) -> list[list[int]]:
    """'1:5,5:1;2:4,4:2' -> one permutation per ';' group, unlisted nodes fixed."""
    perms = []
    for group in (text or "").split(";"):
        group = group.strip()
        if not group:
            continue
        perm = list(range(1, rank + 1))
        for pair in group.split(","):
            try:
                src, dst = (int(x) for x in pair.split(":"))
            except ValueError as e:
                raise ParseError(f"bad gamma entry {pair!r}; use i:j") from e
            if not (1 <= src <= rank and 1 <= dst <= rank):
                raise ParseError(f"gamma entry {pair!r} names a node outside 1..{rank}")
            perm[src - 1] = dst
        perms.append(perm)
    return perms


@dataclass
class GroupSpec:
    type: str = "A"
    rank: Optional[int] = None
    J: Optional[list[int]] = None          # surviving simple roots, 1-based; None = split
    gamma: list[list[int]] = field(default_factory=list)
    rep: str = "adjoint"

    @property
    def label(self) -> str:
        t = self.type.strip().upper()
        if self.rank is not None and not any(ch.isdigit() for ch in t):
            return f"{t}{self.rank}"
        return t

    def load(self):
        from modules.relgrp import load_group
        return load_group(self.label, self.J, tuple(tuple(p) for p in self.gamma), self.rep)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "GroupSpec":
        d = dict(d or {})
        rank = d.get("rank")
        J = d.get("J")
        gamma = d.get("gamma") or []
        if isinstance(gamma, str):
            if rank is None:
                raise ParseError("gamma in i:j form needs an explicit rank")
            gamma = parse_gamma(gamma, int(rank))
        return cls(
            type=str(d.get("type", "A")),
            rank=int(rank) if rank is not None else None,
            J=_int_list(J) if J is not None else None,
            gamma=[[int(x) for x in p] for p in gamma],
            rep=str(d.get("rep", "adjoint")),
        )


@dataclass
class RingSpec:
    field_name: str = "Q"
    prime: Optional[int] = None
    variables: list[str] = field(default_factory=list)
    laurent: list[str] = field(default_factory=list)
    dual: bool = False                      # adds t with t^2 = 0
    base: list[str] = field(default_factory=list)

    def build(self) -> LaurentRing:
        variables = list(self.variables)
        nilpotent = {}
        if self.dual:
            if DUAL_VARIABLE not in variables:
                variables.append(DUAL_VARIABLE)
            nilpotent[DUAL_VARIABLE] = 2
        prime = self.prime
        if self.field_name == "Fp" and prime is None:
            import config
            prime = config.DEFAULT_PRIME
        return LaurentRing(self.field_name, variables, self.laurent, nilpotent, prime, self.base)

    def to_dict(self) -> dict:
        return {"field": self.field_name, **{k: v for k, v in asdict(self).items() if k != "field_name"}}

    @classmethod
    def from_dict(cls, d: dict) -> "RingSpec":
        d = dict(d or {})
        field_name = str(d.get("field", "Q"))
        if field_name not in ("Q", "Fp"):
            raise ParseError(f"field must be Q or Fp, got {field_name!r}")
        return cls(
            field_name=field_name,
            prime=int(d["prime"]) if d.get("prime") is not None else None,
            variables=_name_list(d.get("variables")),
            laurent=_name_list(d.get("laurent")),
            dual=bool(d.get("dual", False)),
            base=_name_list(d.get("base")),
        )


@dataclass
class JobSpec:
    command: str
    group: GroupSpec = field(default_factory=GroupSpec)
    ring: RingSpec = field(default_factory=RingSpec)
    input: dict = field(default_factory=dict)      # {"word": ...} | {"matrix": ...} | {"certificate": ...}
    options: dict = field(default_factory=dict)    # command-specific arguments (s, a, b, f, g, h, ...)
    budget_scale: Optional[float] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ParseError(f"unknown command {self.command!r}; choose from {', '.join(COMMANDS)}")

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "group": self.group.to_dict(),
            "ring": self.ring.to_dict(),
            "input": self.input,
            "options": self.options,
            "budget_scale": self.budget_scale,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "JobSpec":
        if not isinstance(d, dict):
            raise ParseError("job document must be a JSON object")
        command = d.get("command") or d.get("subcommand")
        if not command:
            raise ParseError("job document has no command")
        try:
            scale = d.get("budget_scale")
            seed = d.get("seed")
            return cls(
                command=str(command),
                group=GroupSpec.from_dict(d.get("group")),
                ring=RingSpec.from_dict(d.get("ring")),
                input=dict(d.get("input") or {}),
                options=dict(d.get("options") or {}),
                budget_scale=float(scale) if scale is not None else None,
                seed=int(seed) if seed is not None else None,
            )
        except (TypeError, ValueError) as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(f"bad job document: {e}") from e

    @classmethod
    def from_json(cls, text: str) -> "JobSpec":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as e:
            raise ParseError(f"job document is not JSON: {e}") from e
