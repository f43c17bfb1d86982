"""
suite.py — Seeded acceptance runs over every engine, one criterion at a time.

Each criterion builds its own instances from (seed, count), so criteria can
run in worker processes; results come back ordered by criterion index and
carry a digest of every certificate hash they produced.
"""
from __future__ import annotations

import hashlib
import logging
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import config
from models.word import RelLetter, RootLetter, Word
from modules.chevgrp import proportional
from modules.errors import IsoK1Error, RejectedInput
from modules.matrices import Mat
from modules.relgrp import RelativeGroup, load_group
from modules.rings import LaurentRing
from modules.rootsys import relative_datum

logger = logging.getLogger(__name__)

CRITERIA = ("relations", "sigma", "gauss", "suslin", "laurent", "identities", "k1", "determinism")

RELATION_SYSTEMS = (
    ("A2", None),
    ("G2", None),
    ("A3", (2,)),
    ("C2", (1,)),
    ("B3", (1, 2)),
    ("C3", (1, 2)),
)

SIGMA_SYSTEMS = (
    ("A2", None, "natural"),
    ("G2", None, "adjoint"),
    ("A3", (2,), "natural"),
    ("C2", (1,), "adjoint"),
    ("B3", (1, 2), "adjoint"),
    ("C3", (1, 2), "adjoint"),
)

MAX_FAILURES = 20


@dataclass
class CriterionResult:
    name: str
    passed: bool
    count: int
    failures: list[str] = field(default_factory=list)
    digest: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "count": self.count,
            "failures": self.failures,
            "digest": self.digest,
        }


class _Tally:
    """Failure list and running digest for one criterion."""

    def __init__(self, name: str):
        self.name = name
        self.failures: list[str] = []
        self._hash = hashlib.sha256(name.encode())

    def record(self, text: str) -> None:
        self._hash.update(text.encode())
        self._hash.update(b"\n")

    def fail(self, label: str, reason) -> None:
        self.record(f"FAIL {label}")
        if len(self.failures) < MAX_FAILURES:
            self.failures.append(f"{label}: {reason}")

    def attempt(self, label: str, fn: Callable[[], object]) -> None:
        """Run one instance; a certificate's hash goes into the digest, errors become failures."""
        try:
            out = fn()
        except IsoK1Error as e:
            self.fail(label, f"{type(e).__name__}: {e}")
            return
        if out is False:
            self.fail(label, "check failed")
            return
        transcript = getattr(out, "transcript", None)
        self.record(transcript.get("hash", "ok") if isinstance(transcript, dict) else "ok")

    @property
    def digest(self) -> str:
        return self._hash.hexdigest()

    def result(self, count: int) -> CriterionResult:
        return CriterionResult(self.name, not self.failures, count, list(self.failures), self.digest)


def _rng(seed: int, name: str, i: int = 0) -> random.Random:
    return random.Random(f"{seed}:{name}:{i}")


# ── Random words ─────────────────────────────────────────────────────────────

def random_relative_word(group: RelativeGroup, ring: LaurentRing, rng: random.Random, length: int,
                         values: Sequence) -> Word:
    """Relative letters X_α(v) with every fiber coordinate drawn from ``values``."""
    roots = group.rrd.relative_roots
    letters = []
    for _ in range(length):
        alpha = roots[rng.randrange(len(roots))]
        fiber = group.rrd.fiber(alpha)
        params = tuple(values[rng.randrange(len(values))] for _ in fiber)
        if group.is_split:
            letters.append(RootLetter(fiber[0], params[0]))
        else:
            letters.append(RelLetter(alpha, params))
    return Word(ring, tuple(letters))


def random_root_word(group: RelativeGroup, ring: LaurentRing, rng: random.Random, length: int,
                     values: Sequence) -> Word:
    roots = group.rd.roots
    return Word(ring, tuple(
        RootLetter(roots[rng.randrange(len(roots))], values[rng.randrange(len(values))])
        for _ in range(length)
    ))


def laurent_values(ring: LaurentRing, var: str = "X", factor=None) -> list:
    """c·X^e with c ∈ {±1, ±2} and -2 <= e <= 2, optionally times ``factor``."""
    out = []
    for c in (1, -1, 2, -2):
        for e in range(-2, 3):
            p = ring.monomial({var: e}, c)
            out.append(p * factor if factor is not None else p)
    return out


# ── Criteria ─────────────────────────────────────────────────────────────────

def _ordered(maps) -> list:
    return sorted(maps.maps, key=lambda k: (sum(k), k[0]) if isinstance(k, tuple) else (k, k))


def check_relations(group: RelativeGroup, tally: _Tally, label: str) -> None:
    """Sum and commutator relations as exact identities with symbolic parameters."""
    roots = group.rrd.relative_roots
    for alpha in roots:
        q = group.q_maps(alpha)
        d = len(group.rrd.fiber(alpha))
        gens = q.ring.gens()
        v, w = list(gens[:d]), list(gens[d:])
        lhs = group.rel_element(alpha, v) * group.rel_element(alpha, w)
        rhs = group.rel_element(alpha, [a + b for a, b in zip(v, w)])
        for k in _ordered(q):
            rhs = rhs * group.rel_element(q.roots[k], list(q.maps[k]))
        tally.attempt(f"{label} sum {list(alpha)}", lambda: lhs == rhs)
        for beta in roots:
            if proportional(alpha, beta):
                continue
            n = group.n_maps(alpha, beta)
            e = len(group.rrd.fiber(beta))
            gens = n.ring.gens()
            u, v = list(gens[:d]), list(gens[d:d + e])
            comm = (group.rel_element(alpha, u) * group.rel_element(beta, v)
                    * group.rel_element(alpha, [-x for x in u]) * group.rel_element(beta, [-x for x in v]))
            prod = Mat.identity(n.ring, group.rep.dim)
            for k in _ordered(n):
                prod = prod * group.rel_element(n.roots[k], list(n.maps[k]))
            tally.attempt(f"{label} commutator {list(alpha)},{list(beta)}", lambda: comm == prod)


def criterion_relations(seed: int, count: int) -> CriterionResult:
    tally = _Tally("relations")
    for label, J in RELATION_SYSTEMS:
        group = load_group(label, J)
        name = label if J is None else f"{label}/J={','.join(map(str, J))}"
        tally.record(f"{name}:{group.rrd.type_label}")
        check_relations(group, tally, name)
    if load_group("C3", (1, 2)).rrd.type_label != "BC2":
        tally.fail("C3/J=1,2", "relative type is not BC2")
    d12 = relative_datum("D12", (4, 8)).type_label
    tally.record(f"D12/J=4,8:{d12}")
    if d12 != "BC2":
        tally.fail("D12/J=4,8", f"relative type {d12}, expected BC2")
    return tally.result(len(RELATION_SYSTEMS))


def criterion_sigma(seed: int, count: int) -> CriterionResult:
    """count words per system: σ is conjugation by the cocharacter and commutes with t ↦ 0."""
    tally = _Tally("sigma")
    ring = LaurentRing("Q", ["X"], laurent=["X"])
    dual = LaurentRing("Q", ["X", "t"], laurent=["X"], nilpotent={"t": 2})
    values = laurent_values(ring)
    dual_values = [dual.embed(p) for p in values] + [dual.embed(p) * dual.gen("t") for p in values]
    for label, J, rep in SIGMA_SYSTEMS:
        group = load_group(label, J, rep=rep)
        name = label if J is None else f"{label}/J={','.join(map(str, J))}"
        tally.record(name)
        S = group.sigma_matrix(ring)
        S_inv = group.sigma_matrix(ring, direction=-1)
        for i in range(count):
            rng = _rng(seed, f"sigma:{name}", i)
            w = random_relative_word(group, ring, rng, rng.randint(1, 4), values)

            def conjugation_matches(w=w, group=group, S=S, S_inv=S_inv) -> bool:
                return group.evaluate(group.sigma_apply(w)) == S * group.evaluate(w) * S_inv

            tally.attempt(f"sigma {name} #{i}", conjugation_matches)
            wd = random_relative_word(group, dual, rng, rng.randint(1, 3), dual_values)

            def commutes_with_reduction(wd=wd, group=group) -> bool:
                reduced = wd.substitute({"t": 0}, dual)
                left = group.evaluate(group.sigma_apply(wd)).substitute({"t": 0})
                return left == group.evaluate(group.sigma_apply(reduced))

            tally.attempt(f"sigma-reduction {name} #{i}", commutes_with_reduction)
    return tally.result(count * len(SIGMA_SYSTEMS))


def criterion_gauss(seed: int, count: int) -> CriterionResult:
    from modules.gauss import congruence_gauss_certificate, gauss_certificate, random_group_element

    tally = _Tally("gauss")
    group = load_group("A3", J=(2,), rep="natural")
    field_ring = LaurentRing("Fp", prime=config.DEFAULT_PRIME)
    for i in range(count):
        g = random_group_element(group, field_ring, _rng(seed, "gauss", i), length=12)
        tally.attempt(f"gauss #{i}", lambda g=g: gauss_certificate(group, g, seed + i))
    dual = LaurentRing("Fp", ["t"], nilpotent={"t": 2}, prime=config.DEFAULT_PRIME)
    t = dual.gen("t")
    params = [t.scale(c) for c in range(1, config.DEFAULT_PRIME)]
    for i in range(max(1, count // 5)):
        g = random_group_element(group, dual, _rng(seed, "gauss-dual", i), length=8, params=params)
        tally.attempt(f"gauss-congruence #{i}", lambda g=g: congruence_gauss_certificate(group, g, "t"))
    return tally.result(count + max(1, count // 5))


def _fraction_values(ring: LaurentRing, f: str, g: str) -> list:
    out = []
    for c in (1, -1, 2):
        for a in range(3):
            for b in range(3):
                out.append(ring.parse(f"{c}/(({f})**{a}*({g})**{b})"))
    return out


def criterion_suslin(seed: int, count: int) -> CriterionResult:
    from modules.decomp import excision_certificate, suslin_certificate

    tally = _Tally("suslin")
    group = load_group("A2", rep="natural")
    ring = LaurentRing("Q", base=["Y"])
    values = _fraction_values(ring, "Y", "1-Y")
    for i in range(count):
        rng = _rng(seed, "suslin", i)
        x = random_root_word(group, ring, rng, rng.randint(1, 2), values)
        tally.attempt(f"suslin #{i}", lambda x=x: suslin_certificate(group, x, "Y", "1-Y"))
    tring = LaurentRing("Q", base=["t"])
    tvalues = _fraction_values(tring, "t", "t-1")
    excisions = max(1, count // 2)
    for i in range(excisions):
        rng = _rng(seed, "excision", i)
        x = random_root_word(group, tring, rng, rng.randint(1, 2), tvalues)
        tally.attempt(f"excision #{i}", lambda x=x: excision_certificate(group, x, "t", ("t-1",)))
    return tally.result(count + excisions)


def criterion_laurent(seed: int, count: int) -> CriterionResult:
    from modules.laurent import congruence_laurent_certificate, laurent_certificate

    tally = _Tally("laurent")
    group = load_group("A2", rep="natural")
    ring = LaurentRing("Q", ["X"], laurent=["X"])
    values = laurent_values(ring)
    for i in range(count):
        rng = _rng(seed, "laurent", i)
        w = random_root_word(group, ring, rng, rng.randint(1, 8), values)
        tally.attempt(f"laurent #{i}", lambda w=w: laurent_certificate(group, w, "X", seed + i))
    dual = LaurentRing("Q", ["X", "t"], laurent=["X"], nilpotent={"t": 2})
    dvalues = laurent_values(dual, factor=dual.gen("t"))
    congruences = max(1, count // 4)
    for i in range(congruences):
        rng = _rng(seed, "laurent-dual", i)
        w = random_root_word(group, dual, rng, rng.randint(1, 6), dvalues)
        tally.attempt(f"congruence-laurent #{i}", lambda w=w: congruence_laurent_certificate(group, w, "X", "t"))
    return tally.result(count + congruences)


def criterion_identities(seed: int, count: int) -> CriterionResult:
    from modules.identities import run_identity_suite

    tally = _Tally("identities")
    results = run_identity_suite()
    for res in results:
        tally.record(f"{res.system}:{res.name}:{res.ok}")
        if not res.ok:
            tally.fail(f"{res.system} {res.name}", res.detail or "sides differ")
    return tally.result(len(results))


def _constant_times_word(rng: random.Random, ring: LaurentRing, values: Sequence) -> Mat:
    from modules.gauss import random_group_element

    group = load_group("A2", rep="natural")
    g0 = random_group_element(group, ring, rng, length=4)
    w = random_root_word(group, ring, rng, rng.randint(1, 6), values)
    return g0 * group.rep.evaluate(w)


def _glue_instance(rng: random.Random) -> tuple[Word, Word, Word]:
    group = load_group("A2", rep="natural")
    ring = LaurentRing("Q", ["X"], laurent=["X"])
    plus = [ring.monomial({"X": e}, c) for c in (1, -1, 2) for e in (1, 2)]
    minus = [ring.monomial({"X": -e}, c) for c in (1, -1, 2) for e in (0, 1, 2)]
    x = random_root_word(group, ring, rng, rng.randint(1, 3), plus)
    y = random_root_word(group, ring, rng, rng.randint(0, 3), minus)
    return x, y, x * y.inverse()


def criterion_k1(seed: int, count: int) -> CriterionResult:
    from modules.k1 import SL2_REMARK, one_var_factor, p1_glue_check, poly_factor

    tally = _Tally("k1")
    two = LaurentRing("Fp", ["X1", "X2"], prime=config.DEFAULT_PRIME)
    two_values = [two.parse(s) for s in ("X1", "X2", "2*X1*X2", "X1 + X2", "3*X2^2", "X1^2 - X2")]
    for i in range(count):
        g = _constant_times_word(_rng(seed, "k1-poly", i), two, two_values)
        tally.attempt(f"poly_factor #{i}", lambda g=g: poly_factor(g, seed + i))
    one = LaurentRing("Q", ["X"])
    one_values = [one.parse(s) for s in ("X", "-X", "2*X^2", "X^2 + 1", "1/2*X^3", "3")]
    for i in range(count):
        g = _constant_times_word(_rng(seed, "k1-one", i), one, one_values)
        tally.attempt(f"one_var_factor #{i}", lambda g=g: one_var_factor(g))
    glues = max(1, count // 2)
    for i in range(glues):
        x, y, witness = _glue_instance(_rng(seed, "k1-glue", i))
        tally.attempt(f"p1_glue_check #{i}", lambda x=x, y=y, w=witness: p1_glue_check(x, y, w, "X"))

    def sl2_rejected() -> bool:
        try:
            one_var_factor(Mat.identity(one, 2))
        except RejectedInput as e:
            return SL2_REMARK in str(e)
        return False

    tally.attempt("SL2 rejection", sl2_rejected)
    return tally.result(2 * count + glues + 1)


def criterion_determinism(seed: int, count: int) -> CriterionResult:
    tally = _Tally("determinism")
    for name in ("gauss", "laurent", "k1"):
        first = CRITERION_RUNNERS[name](seed, 2)
        second = CRITERION_RUNNERS[name](seed, 2)
        tally.record(f"{name}:{first.digest}")
        if first.to_dict() != second.to_dict():
            tally.fail(name, f"digests {first.digest[:12]} and {second.digest[:12]} differ")
    return tally.result(3)


CRITERION_RUNNERS: dict[str, Callable[[int, int], CriterionResult]] = {
    "relations": criterion_relations,
    "sigma": criterion_sigma,
    "gauss": criterion_gauss,
    "suslin": criterion_suslin,
    "laurent": criterion_laurent,
    "identities": criterion_identities,
    "k1": criterion_k1,
    "determinism": criterion_determinism,
}


# ── Driver ───────────────────────────────────────────────────────────────────

def suite_counts(scale: float | None = None) -> dict[str, int]:
    if scale is None:
        return dict(config.SUITE_COUNTS)
    if scale <= 0:
        raise RejectedInput("suite scale must be positive")
    return {
        name: (max(1, math.ceil(config.SUITE_BASE[name] * scale)) if scale < 1 else config.SUITE_BASE[name])
        for name in CRITERIA
    }


def run_criterion(name: str, seed: int, count: int) -> CriterionResult:
    if name not in CRITERION_RUNNERS:
        raise RejectedInput(f"unknown criterion {name!r}; choose from {', '.join(CRITERIA)}")
    logger.info(f"criterion {name}: {count} instance(s), seed {seed}")
    result = CRITERION_RUNNERS[name](seed, count)
    logger.info(f"criterion {name}: {'passed' if result.passed else f'{len(result.failures)} failure(s)'}")
    return result


def run_suite(seed: int | None = None, scale: float | None = None, workers: int | None = None,
              only: Sequence[str] | None = None) -> list[CriterionResult]:
    """Run the acceptance criteria in index order; worker processes never change the output."""
    seed = config.SEED if seed is None else seed
    workers = config.WORKERS if workers is None else max(1, workers)
    counts = suite_counts(scale)
    names = [n for n in CRITERIA if not only or n in only]
    unknown = set(only or ()) - set(CRITERIA)
    if unknown:
        raise RejectedInput(f"unknown criteria {sorted(unknown)}; choose from {', '.join(CRITERIA)}")
    jobs = [(name, seed, counts[name]) for name in names]
    if workers == 1 or len(jobs) == 1:
        return [run_criterion(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_criterion, *job) for job in jobs]
        return [f.result() for f in futures]
