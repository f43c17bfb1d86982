"""
verify.py — Re-checks certificates: exact product identity plus per-part ring patterns.
"""
from __future__ import annotations

import logging

from models.certificate import Certificate, CertificatePart, K1Certificate, VerificationReport
from models.word import RelLetter, RootLetter, TorusLetter
from modules.errors import IsoK1Error, RejectedInput
from modules.euclid import natural_rep
from modules.matrices import Mat
from modules.relgrp import RelativeGroup, load_group
from modules.rings import LaurentRing, Localization

logger = logging.getLogger(__name__)


def group_of(spec: dict) -> RelativeGroup:
    label = spec.get("type", "")
    if "rank" in spec and not any(ch.isdigit() for ch in label):
        label = f"{label}{spec['rank']}"
    return load_group(label, spec.get("J"), spec.get("gamma", ()), spec.get("rep", "adjoint"))


def part_matrix(group: RelativeGroup, part: CertificatePart, ring: LaurentRing) -> Mat:
    if part.word is not None:
        return group.evaluate(part.word.to_ring(ring))
    return part.matrix.to_ring(ring)


def product_matrix(group: RelativeGroup, cert: Certificate) -> Mat:
    M = Mat.identity(cert.ring, group.rep.dim)
    for part in cert.parts:
        M = M * part_matrix(group, part, cert.ring)
    return M


def input_matrix(group: RelativeGroup, cert: Certificate) -> Mat:
    if cert.input_word is not None:
        return group.evaluate(cert.input_word)
    if cert.input_matrix is not None:
        return cert.input_matrix
    raise RejectedInput("certificate has no input")


# ── Patterns ─────────────────────────────────────────────────────────────────

def _values(part: CertificatePart):
    if part.word is not None:
        return part.word.params()
    return list(part.matrix.entries())


def _letter_degree(group: RelativeGroup, letter) -> int:
    if isinstance(letter, RootLetter):
        return group.rrd.degree(letter.root)
    if isinstance(letter, RelLetter):
        return sum(letter.root)
    return 0


def is_levi(group: RelativeGroup, M: Mat) -> bool:
    """M is block diagonal in the J-degree grading and has determinant 1."""
    from modules.gauss import degree_blocks

    if M.nrows != group.rep.dim or not M.is_square:
        return False
    block_of = {}
    for k, block in enumerate(degree_blocks(group)):
        for i in block:
            block_of[i] = k
    for i, r in enumerate(M.rows):
        if any(block_of[j] != block_of[i] for j in r):
            return False
    return M.det() == 1


def check_pattern(group: RelativeGroup, part: CertificatePart, pattern: str) -> str | None:
    """None when the part satisfies the pattern, else a short reason."""
    ring = part.ring
    name, _, arg = pattern.partition(":")
    values = _values(part)
    if name == "laurent":
        return None
    if name in ("poly", "inverse"):
        i = ring.variables.index(arg) if arg in ring.variables else None
        if i is None:
            return f"{arg} is not a variable of {ring.describe()}"
        for v in values:
            for mono in v.terms:
                if (name == "poly" and mono[i] < 0) or (name == "inverse" and mono[i] > 0):
                    return f"coefficient {v} violates {pattern}"
        return None
    if name == "polynomial":
        for v in values:
            if any(e < 0 for mono in v.terms for e in mono):
                return f"coefficient {v} has a negative exponent"
        return None
    if name == "constant":
        for v in values:
            if not v.is_constant():
                return f"coefficient {v} is not constant"
        return None
    if name == "denominators":
        bases = [b for b in arg.split(",") if b]
        loc = Localization.of(ring, *bases)
        for v in values:
            if not loc.contains_poly(v):
                return f"coefficient {v} has a denominator outside {loc.describe()}"
        return None
    if name == "congruent":
        M = part_matrix(group, part, ring)
        if not M.reduce(arg).is_identity():
            return f"part is not congruent to 1 modulo ({arg})"
        return None
    if name in ("upper", "lower", "levi"):
        if part.matrix is not None:
            if name == "levi":
                if is_levi(group, part.matrix):
                    return None
                return "matrix is not a grading-preserving group element"
            return "unipotent patterns need a word"
        for letter in part.word.letters:
            if isinstance(letter, TorusLetter):
                if name != "levi":
                    return f"torus letter {letter.text()} in a unipotent part"
                continue
            d = _letter_degree(group, letter)
            ok = d > 0 if name == "upper" else d < 0 if name == "lower" else d == 0
            if not ok:
                return f"letter {letter.text()} has J-degree {d}, violating {name}"
        return None
    return f"unknown pattern {pattern!r}"


# ── Certificates ─────────────────────────────────────────────────────────────

def verify_certificate(cert: Certificate | K1Certificate) -> VerificationReport:
    """Re-evaluate every part and re-check every declared pattern."""
    if isinstance(cert, K1Certificate):
        return verify_k1(cert)
    report = VerificationReport(ok=True)
    try:
        group = group_of(cert.group)
        product = product_matrix(group, cert)
        target = input_matrix(group, cert)
    except IsoK1Error as e:
        return VerificationReport(ok=False, failures=[f"evaluation: {e}"])
    report.hash = product.digest()
    report.checks.append("product")
    if product != target:
        report.ok = False
        report.failures.append("product of parts differs from the input")
    expected = cert.transcript.get("hash")
    if expected and expected != report.hash:
        report.ok = False
        report.failures.append("recorded hash does not match the product")
    for part in cert.parts:
        for pattern in part.patterns:
            try:
                reason = check_pattern(group, part, pattern)
            except IsoK1Error as e:
                reason = str(e)
            report.checks.append(f"{part.name}:{pattern}")
            if reason:
                report.ok = False
                report.failures.append(f"part {part.name}: {reason}")
    logger.debug(f"verified {cert.statement}: ok={report.ok}, {len(report.checks)} checks")
    return report


def verify_k1(cert: K1Certificate) -> VerificationReport:
    report = VerificationReport(ok=True)
    rep = natural_rep(cert.m)
    try:
        product = cert.constant * rep.evaluate(cert.word.to_ring(cert.ring))
    except IsoK1Error as e:
        return VerificationReport(ok=False, failures=[f"evaluation: {e}"])
    report.hash = product.digest()
    report.checks.append("product")
    if product != cert.matrix:
        report.ok = False
        report.failures.append("constant · word differs from the input")
    if not cert.constant.is_constant():
        report.ok = False
        report.failures.append("constant part has non-constant entries")
    report.checks.append("constant")
    fixed = [i for i, v in enumerate(cert.ring.variables) if v not in cert.ring.laurent]
    for v in cert.word.params():
        if any(mono[i] < 0 for mono in v.terms for i in fixed):
            report.ok = False
            report.failures.append(f"word parameter {v} is not polynomial")
            break
    report.checks.append("polynomial")
    if cert.word.is_relative or any(isinstance(l, TorusLetter) for l in cert.word.letters):
        report.ok = False
        report.failures.append("word must use absolute root letters only")
    expected = cert.transcript.get("hash")
    if expected and expected != report.hash:
        report.ok = False
        report.failures.append("recorded hash does not match the product")
    return report


def seal(cert: Certificate | K1Certificate) -> Certificate | K1Certificate:
    """Record hash and per-check flags; a synthesized certificate that fails is a bug."""
    report = verify_certificate(cert)
    if not report.ok:
        raise IsoK1Error(f"self-verification failed: {'; '.join(report.failures)}")
    cert.transcript = {
        "hash": report.hash,
        "flags": {check: True for check in report.checks},
    }
    return cert
