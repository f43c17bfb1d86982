"""
runner.py — Executes a JobSpec: builds the group and ring, parses the input,
dispatches to the engine and maps errors to exit codes.

run(job) returns (exit_code, payload, transcript).  The payload is plain JSON
data; the transcript is the user-facing step log the CLI writes to stderr.
"""
from __future__ import annotations

import json
import logging
from typing import Callable

import config
from models.certificate import load_certificate
from models.job import JobSpec
from models.transcript import Transcript
from models.word import Word
from modules.errors import IsoK1Error, ParseError, RejectedInput
from modules.matrices import Mat
from modules.rings import LaurentRing

logger = logging.getLogger(__name__)


# ── Input helpers ────────────────────────────────────────────────────────────

def _root(value) -> tuple[int, ...]:
    if isinstance(value, str):
        value = value.replace(" ", "").strip("[]()").split(",")
    try:
        return tuple(int(x) for x in value)
    except (TypeError, ValueError) as e:
        raise ParseError(f"bad root vector {value!r}") from e


def _word(job: JobSpec, ring: LaurentRing, key: str = "word") -> Word:
    text = job.input.get(key)
    if text is None:
        raise ParseError(f"{job.command} needs an input {key}")
    return Word.parse(str(text), ring)


def _matrix(job: JobSpec, ring: LaurentRing) -> Mat:
    rows = job.input.get("matrix")
    if rows is None:
        raise ParseError(f"{job.command} needs an input matrix")
    if isinstance(rows, str):
        try:
            rows = json.loads(rows)
        except json.JSONDecodeError as e:
            raise ParseError(f"matrix is not JSON rows: {e}") from e
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ParseError("matrix must be a non-empty list of rows")
    if len({len(r) for r in rows}) != 1:
        raise ParseError("matrix rows have different lengths")
    return Mat.from_rows(ring, [[str(x) for x in r] for r in rows])


def _option(job: JobSpec, name: str, default=None, required: bool = False):
    value = job.options.get(name, default)
    if required and value in (None, ""):
        raise ParseError(f"{job.command} needs option --{name.replace('_', '-')}")
    return value


def _bases(value) -> tuple[str, ...]:
    if not value:
        return ()
    if isinstance(value, str):
        return tuple(x.strip() for x in value.split(";") if x.strip())
    return tuple(str(x) for x in value)


def _seed(job: JobSpec) -> int:
    return config.SEED if job.seed is None else job.seed


# ── Commands ─────────────────────────────────────────────────────────────────

def _roots(job: JobSpec, transcript: Transcript) -> dict:
    from modules.rootsys import build_root_system

    rd = build_root_system(job.group.label)
    top, coeffs = rd.highest_root_and_coeffs()
    transcript.note("roots", f"{rd.label}: {len(rd.roots)} roots")
    return {**rd.to_dict(), "highest_root_coefficients": list(coeffs)}


def _relative(job: JobSpec, transcript: Transcript) -> dict:
    from modules.rootsys import pick_alpha1, relative_datum

    group = job.group
    J = group.J if group.J is not None else []
    rrd = relative_datum(group.label, J, tuple(tuple(p) for p in group.gamma))
    out = rrd.to_dict()
    try:
        node, m1 = pick_alpha1(rrd)
        out["alpha1"] = {"node": node, "m1": m1}
    except RejectedInput as e:
        out["alpha1"] = None
        transcript.note("alpha1", str(e))
    transcript.note("relative", f"{group.label}/J={J}: {rrd.type_label}")
    return out


def _constants(job: JobSpec, transcript: Transcript) -> dict:
    from modules.chevgrp import build_chevalley_basis, derive_commutator_constants

    alpha, beta = _option(job, "alpha"), _option(job, "beta")
    if job.group.J is not None:
        group = job.group.load()
        if alpha is None:
            raise ParseError("relative constants need --alpha (and --beta for commutator maps)")
        if beta is None:
            maps = group.q_maps(_root(alpha))
            transcript.note("q_maps", f"X{list(_root(alpha))} on {group.rrd.type_label}")
        else:
            maps = group.n_maps(_root(alpha), _root(beta))
            transcript.note("n_maps", f"X{list(_root(alpha))}, X{list(_root(beta))} on {group.rrd.type_label}")
        return {"relative_type": group.rrd.type_label, "maps": maps.to_dict()}
    cb = build_chevalley_basis(job.group.label)
    if alpha is not None and beta is not None:
        table = derive_commutator_constants(cb, _root(alpha), _root(beta))
        transcript.note("commutator", f"{len(table)} nonzero constants")
        return {"alpha": list(_root(alpha)), "beta": list(_root(beta)),
                "constants": {f"{i},{j}": c for (i, j), c in sorted(table.items())}}
    constants = cb.structure_constants()
    transcript.note("structure", f"{len(constants)} constants N_ab")
    return {
        "type": cb.label,
        "structure_constants": [
            {"alpha": list(a), "beta": list(b), "N": n} for (a, b), n in sorted(constants.items())
        ],
    }


def _gauss(job: JobSpec, transcript: Transcript) -> dict:
    from modules.gauss import congruence_gauss_certificate, gauss_certificate

    group, ring = job.group.load(), job.ring.build()
    g = _matrix(job, ring)
    if _option(job, "congruence", False):
        cert = congruence_gauss_certificate(group, g, _option(job, "nil", "t"))
    else:
        cert = gauss_certificate(group, g, _seed(job))
    transcript.note("gauss", f"{cert.statement} with {len(cert.parts)} parts")
    return cert.to_dict()


def _shrink(job: JobSpec, transcript: Transcript) -> dict:
    from modules.decomp import shrink_certificate

    group, ring = job.group.load(), job.ring.build()
    cert = shrink_certificate(group, _word(job, ring), _option(job, "var", "X"),
                              _option(job, "s", required=True), _bases(_option(job, "allowed")))
    transcript.note("shrink", f"k = {cert.data['k']}")
    return cert.to_dict()


def _shift(job: JobSpec, transcript: Transcript) -> dict:
    from modules.decomp import shift_certificate

    group, ring = job.group.load(), job.ring.build()
    cert = shift_certificate(group, _word(job, ring), _option(job, "var", "X"),
                             _option(job, "s", required=True), _option(job, "a", required=True),
                             _option(job, "b", required=True), _bases(_option(job, "allowed")))
    transcript.note("shift", f"k = {cert.data['k']}")
    return cert.to_dict()


def _suslin(job: JobSpec, transcript: Transcript) -> dict:
    from modules.decomp import suslin_certificate

    group, ring = job.group.load(), job.ring.build()
    cert = suslin_certificate(group, _word(job, ring), _option(job, "f", required=True),
                              _option(job, "g", required=True), _bases(_option(job, "allowed")))
    transcript.note("suslin", f"patched with K = {cert.data['K']}")
    return cert.to_dict()


def _excision(job: JobSpec, transcript: Transcript) -> dict:
    from modules.decomp import excision_certificate

    group, ring = job.group.load(), job.ring.build()
    cert = excision_certificate(group, _word(job, ring), _option(job, "h", required=True),
                                _bases(_option(job, "a_bases")))
    transcript.note("excision", f"patched with K = {cert.data['K']}")
    return cert.to_dict()


def _laurent(job: JobSpec, transcript: Transcript) -> dict:
    from modules.laurent import congruence_laurent_certificate, laurent_certificate

    group, ring = job.group.load(), job.ring.build()
    w, var = _word(job, ring), _option(job, "var", "X")
    if _option(job, "congruence", False):
        cert = congruence_laurent_certificate(group, w, var, _option(job, "nil", "t"))
    else:
        cert = laurent_certificate(group, w, var, _seed(job))
    transcript.note("laurent", f"{cert.statement}: {', '.join(p.name for p in cert.parts)}")
    return cert.to_dict()


def _k1_factor(job: JobSpec, transcript: Transcript) -> dict:
    from modules.k1 import laurent_factor, p1_glue_check, poly_factor

    ring = job.ring.build()
    if "witness" in job.input:
        cert = p1_glue_check(_word(job, ring, "x"), _word(job, ring, "y"), _word(job, ring, "witness"),
                             _option(job, "var", "X"))
    elif ring.laurent:
        cert = laurent_factor(_matrix(job, ring), _option(job, "var"), _seed(job))
    else:
        cert = poly_factor(_matrix(job, ring), _seed(job))
    transcript.note("k1", f"{cert.data['letters']} letters, max degree {cert.data['max_degree']}")
    return cert.to_dict()


def _verify(job: JobSpec, transcript: Transcript) -> dict:
    from modules.verify import verify_certificate

    doc = job.input.get("certificate")
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as e:
            raise ParseError(f"certificate is not JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ParseError("verify needs a certificate document")
    report = verify_certificate(load_certificate(doc))
    transcript.note("verify", "ok" if report.ok else "; ".join(report.failures))
    return report.to_dict()


def _suite(job: JobSpec, transcript: Transcript) -> dict:
    from modules.suite import run_suite

    only = _option(job, "only")
    if isinstance(only, str):
        only = [x.strip() for x in only.split(",") if x.strip()]
    results = run_suite(_seed(job), _option(job, "scale"), _option(job, "workers"), only)
    for r in results:
        transcript.note(r.name, f"{'passed' if r.passed else 'FAILED'} ({r.count} instances)")
    return {"seed": _seed(job), "passed": all(r.passed for r in results),
            "criteria": [r.to_dict() for r in results]}


def _identities(job: JobSpec, transcript: Transcript) -> dict:
    from modules.identities import run_identity_suite

    systems = _option(job, "systems")
    if isinstance(systems, str):
        systems = [x.strip() for x in systems.split(";") if x.strip()]
    results = run_identity_suite(systems)
    transcript.note("identities", f"{sum(r.ok for r in results)}/{len(results)} hold")
    return {"passed": all(r.ok for r in results), "identities": [r.to_dict() for r in results]}


HANDLERS: dict[str, Callable[[JobSpec, Transcript], dict]] = {
    "roots": _roots,
    "relative": _relative,
    "constants": _constants,
    "gauss": _gauss,
    "shrink": _shrink,
    "shift": _shift,
    "suslin": _suslin,
    "excision": _excision,
    "laurent": _laurent,
    "k1-factor": _k1_factor,
    "verify": _verify,
    "suite": _suite,
    "identities": _identities,
}


# ── Entry point ──────────────────────────────────────────────────────────────

def _failed(payload: dict) -> bool:
    return payload.get("ok") is False or payload.get("passed") is False


def error_payload(exc: IsoK1Error) -> dict:
    out = {"error": type(exc).__name__, "message": str(exc)}
    residue = getattr(exc, "residue", None)
    if residue is not None:
        out["residue"] = residue
    partial = getattr(exc, "transcript", None)
    if partial is not None:
        out["transcript"] = partial
    return out


def run(job: JobSpec) -> tuple[int, dict, Transcript]:
    """Execute one job; exit 0 on success, 2 when a verification or suite fails."""
    transcript = Transcript()
    previous = config.BUDGET_SCALE
    try:
        if job.budget_scale is not None:
            config.set_budget_scale(job.budget_scale)
        payload = HANDLERS[job.command](job, transcript)
    except IsoK1Error as e:
        logger.debug(f"{job.command} stopped: {e}")
        return e.exit_code, error_payload(e), transcript
    except (ValueError, KeyError) as e:
        return ParseError.exit_code, {"error": "ParseError", "message": str(e)}, transcript
    finally:
        if config.BUDGET_SCALE != previous:
            config.set_budget_scale(previous)
    code = 2 if _failed(payload) else 0
    return code, payload, transcript
