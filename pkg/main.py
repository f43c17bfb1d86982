#!/usr/bin/env python3
"""
main.py — isok1 CLI
Usage: python main.py <command> [args]

Every command builds a JobSpec and hands it to modules.runner; the result JSON
goes to stdout, the step transcript to stderr.
"""
import sys
import os
import json
import logging
from pathlib import Path

import click

# Ensure project root is always on sys.path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from config import LOG_LEVEL

# ── Logging ──────────────────────────────────────────────────────────────────
logging.basicConfig(
    level=getattr(logging, LOG_LEVEL, logging.WARNING),
    format="%(levelname)s: %(message)s"
)
logger = logging.getLogger(__name__)


def _emit(job) -> None:
    """Run a job, print its JSON, exit with its code."""
    from modules.runner import run

    code, payload, transcript = run(job)
    if len(transcript):
        click.echo(transcript.text(), err=True)
    click.echo(json.dumps(payload, indent=2, sort_keys=True, default=str))
    sys.exit(code)


def _job(command: str, group: dict | None = None, ring: dict | None = None, input: dict | None = None,
         options: dict | None = None, seed: int | None = None, budget: float | None = None):
    from models.job import GroupSpec, JobSpec, RingSpec
    from modules.errors import ParseError

    try:
        return JobSpec(
            command=command,
            group=GroupSpec.from_dict(group or {}),
            ring=RingSpec.from_dict(ring or {}),
            input={k: v for k, v in (input or {}).items() if v is not None},
            options={k: v for k, v in (options or {}).items() if v not in (None, False, "")},
            budget_scale=budget,
            seed=seed,
        )
    except (ParseError, ValueError) as e:
        click.echo(json.dumps({"error": "ParseError", "message": str(e)}, indent=2, sort_keys=True))
        sys.exit(1)


def _read_word(word: str | None, word_file: str | None) -> str | None:
    if word_file:
        return Path(word_file).read_text().strip()
    return word


# ── Shared options ───────────────────────────────────────────────────────────

def group_options(fn):
    fn = click.option("--type", "type_", default="A", help="Root system type, e.g. G2 or D")(fn)
    fn = click.option("--rank", type=int, default=None, help="Rank when --type is a bare letter")(fn)
    fn = click.option("--J", "J", default=None, help="Surviving simple roots, e.g. 4,8 (default: split)")(fn)
    fn = click.option("--gamma", default=None, help='Diagram automorphisms, e.g. "1:5,5:1"')(fn)
    fn = click.option("--rep", type=click.Choice(["adjoint", "natural"]), default="adjoint")(fn)
    return fn


def ring_options(fn):
    fn = click.option("--field", "field_", type=click.Choice(["Q", "Fp"]), default="Q")(fn)
    fn = click.option("--prime", type=int, default=None, help="Characteristic for Fp")(fn)
    fn = click.option("--vars", default="", help="Ring variables, e.g. X,Y")(fn)
    fn = click.option("--laurent", default="", help="Variables with inverses, e.g. X")(fn)
    fn = click.option("--dual", is_flag=True, help="Adjoin t with t^2 = 0")(fn)
    fn = click.option("--base", default="", help="Rational-function base variables, e.g. Y")(fn)
    return fn


def run_options(fn):
    fn = click.option("--seed", type=int, default=None, help="Seed for randomized searches")(fn)
    fn = click.option("--budget", type=float, default=None, help="Budget scale for this job")(fn)
    return fn


def word_options(fn):
    fn = click.option("--word", default=None, help="Input word, e.g. x[1,0](X)*x[0,1](2)")(fn)
    fn = click.option("--word-file", type=click.Path(exists=True, dir_okay=False), default=None)(fn)
    return fn


def _group(type_, rank, J, gamma, rep) -> dict:
    return {"type": type_, "rank": rank, "J": J, "gamma": gamma or [], "rep": rep}


def _ring(field_, prime, vars, laurent, dual, base) -> dict:
    return {"field": field_, "prime": prime, "variables": vars, "laurent": laurent, "dual": dual, "base": base}


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress at INFO level")
def cli(verbose):
    """isok1 — relative root systems, elementary decompositions and K1 certificates."""
    if verbose:
        logging.getLogger().setLevel(logging.INFO)


# ── Root data ────────────────────────────────────────────────────────────────

@cli.command("roots")
@group_options
def roots(type_, rank, J, gamma, rep):
    """Enumerate a root system with its highest root."""
    _emit(_job("roots", _group(type_, rank, J, gamma, rep)))


@cli.command("relative")
@group_options
def relative(type_, rank, J, gamma, rep):
    """Project a root system onto the relative root system of a parabolic."""
    _emit(_job("relative", _group(type_, rank, J, gamma, rep)))


@cli.command("constants")
@group_options
@click.option("--alpha", default=None, help="Root, e.g. 1,0")
@click.option("--beta", default=None, help="Root, e.g. 0,1")
def constants(type_, rank, J, gamma, rep, alpha, beta):
    """Structure constants, commutator constants or relative N/q maps."""
    _emit(_job("constants", _group(type_, rank, J, gamma, rep), options={"alpha": alpha, "beta": beta}))


# ── Decompositions ───────────────────────────────────────────────────────────

@cli.command("gauss")
@group_options
@ring_options
@run_options
@click.option("--matrix", required=True, help='JSON rows, e.g. [["0","1"],["-1","0"]]')
@click.option("--congruence", is_flag=True, help="U+(tA) L(tA) U-(tA) for g = 1 mod t")
def gauss(type_, rank, J, gamma, rep, field_, prime, vars, laurent, dual, base, seed, budget, matrix,
          congruence):
    """Gauss decomposition g = u1 u2 l u3."""
    _emit(_job("gauss", _group(type_, rank, J, gamma, rep), _ring(field_, prime, vars, laurent, dual, base),
               {"matrix": matrix}, {"congruence": congruence}, seed, budget))


@cli.command("shrink")
@group_options
@ring_options
@run_options
@word_options
@click.option("--var", default="X", show_default=True)
@click.option("--s", "s", required=True, help="Element to dilate by, e.g. Y")
@click.option("--allowed", default=None, help="Extra allowed denominators, ';'-separated")
def shrink(type_, rank, J, gamma, rep, field_, prime, vars, laurent, dual, base, seed, budget, word, word_file,
           var, s, allowed):
    """Dilation shrink: g(s^k X) = F_s(h) with h free of s-denominators."""
    _emit(_job("shrink", _group(type_, rank, J, gamma, rep), _ring(field_, prime, vars, laurent, dual, base),
               {"word": _read_word(word, word_file)}, {"var": var, "s": s, "allowed": allowed}, seed, budget))


@cli.command("shift")
@group_options
@ring_options
@run_options
@word_options
@click.option("--var", default="X", show_default=True)
@click.option("--s", "s", required=True)
@click.option("--a", "a", required=True)
@click.option("--b", "b", required=True)
@click.option("--allowed", default=None)
def shift(type_, rank, J, gamma, rep, field_, prime, vars, laurent, dual, base, seed, budget, word, word_file,
          var, s, a, b, allowed):
    """g(aX)·g(bX)^-1 without s-denominators when a = b mod s^k."""
    _emit(_job("shift", _group(type_, rank, J, gamma, rep), _ring(field_, prime, vars, laurent, dual, base),
               {"word": _read_word(word, word_file)},
               {"var": var, "s": s, "a": a, "b": b, "allowed": allowed}, seed, budget))


@cli.command("suslin")
@group_options
@ring_options
@run_options
@word_options
@click.option("--f", "f", required=True)
@click.option("--g", "g", required=True)
@click.option("--allowed", default=None)
def suslin(type_, rank, J, gamma, rep, field_, prime, vars, laurent, dual, base, seed, budget, word, word_file,
           f, g, allowed):
    """x over A_fg as F_g(x1)·F_f(x2)."""
    _emit(_job("suslin", _group(type_, rank, J, gamma, rep), _ring(field_, prime, vars, laurent, dual, base),
               {"word": _read_word(word, word_file)}, {"f": f, "g": g, "allowed": allowed}, seed, budget))


@cli.command("excision")
@group_options
@ring_options
@run_options
@word_options
@click.option("--h", "h", required=True)
@click.option("--a-bases", default=None, help="Denominators of A over B, ';'-separated")
def excision(type_, rank, J, gamma, rep, field_, prime, vars, laurent, dual, base, seed, budget, word, word_file,
             h, a_bases):
    """x over A_h as F_h(y)·z with y over A and z over B_h."""
    _emit(_job("excision", _group(type_, rank, J, gamma, rep), _ring(field_, prime, vars, laurent, dual, base),
               {"word": _read_word(word, word_file)}, {"h": h, "a_bases": a_bases}, seed, budget))


@cli.command("laurent")
@group_options
@ring_options
@run_options
@word_options
@click.option("--var", default="X", show_default=True)
@click.option("--congruence", is_flag=True, help="Two-factor split of w = 1 mod t")
def laurent_cmd(type_, rank, J, gamma, rep, field_, prime, vars, laurent, dual, base, seed, budget, word,
                word_file, var, congruence):
    """w = w+ · w- · w+' over A[X, X^-1]."""
    _emit(_job("laurent", _group(type_, rank, J, gamma, rep), _ring(field_, prime, vars, laurent, dual, base),
               {"word": _read_word(word, word_file)}, {"var": var, "congruence": congruence}, seed, budget))


# ── K1 ───────────────────────────────────────────────────────────────────────

def _k1_options(fn):
    fn = click.option("--matrix", default=None, help="JSON rows of an SL_m matrix")(fn)
    fn = click.option("--x", "x", default=None, help="Word over k[X] (glue check)")(fn)
    fn = click.option("--y", "y", default=None, help="Word over k[X^-1] (glue check)")(fn)
    fn = click.option("--witness", default=None, help="Word over k[X, X^-1] equal to x·y^-1")(fn)
    fn = click.option("--var", default=None)(fn)
    return fn


def _k1_job(field_, prime, vars, laurent, dual, base, seed, budget, matrix, x, y, witness, var):
    return _job("k1-factor", None, _ring(field_, prime, vars, laurent, dual, base),
                {"matrix": matrix, "x": x, "y": y, "witness": witness}, {"var": var}, seed, budget)


@cli.command("k1-factor")
@ring_options
@run_options
@_k1_options
def k1_factor(field_, prime, vars, laurent, dual, base, seed, budget, matrix, x, y, witness, var):
    """g = g0 · E-word over k[X1..Xn] (n <= 2), k[X, X^-1], or a glue check."""
    _emit(_k1_job(field_, prime, vars, laurent, dual, base, seed, budget, matrix, x, y, witness, var))


@cli.group("k1")
def k1():
    """K1 factorization and verification."""
    pass


@k1.command("factor")
@ring_options
@run_options
@_k1_options
def k1_factor_sub(field_, prime, vars, laurent, dual, base, seed, budget, matrix, x, y, witness, var):
    """Same as k1-factor."""
    _emit(_k1_job(field_, prime, vars, laurent, dual, base, seed, budget, matrix, x, y, witness, var))


def _verify_job(certificate: str):
    text = sys.stdin.read() if certificate == "-" else Path(certificate).read_text()
    return _job("verify", input={"certificate": text})


@k1.command("verify")
@click.argument("certificate")
def k1_verify(certificate):
    """Verify a K1 certificate file ('-' for stdin)."""
    _emit(_verify_job(certificate))


# ── Checking ─────────────────────────────────────────────────────────────────

@cli.command("verify")
@click.argument("certificate")
def verify(certificate):
    """Re-check a certificate file ('-' for stdin); exit 2 if it fails."""
    _emit(_verify_job(certificate))


@cli.command("suite")
@click.option("--seed", type=int, default=None)
@click.option("--scale", type=float, default=None, help="Instance-count multiplier (< 1 shrinks)")
@click.option("--workers", type=int, default=None)
@click.option("--only", default=None, help="Comma-separated criteria, e.g. gauss,k1")
def suite(seed, scale, workers, only):
    """Run the seeded acceptance criteria."""
    _emit(_job("suite", options={"scale": scale, "workers": workers, "only": only}, seed=seed))


@cli.command("identities")
@click.option("--systems", default=None, help="';'-separated, e.g. B2;G2;C3/J=1,2")
def identities(systems):
    """Evaluate the commutator identities behind the m1 = 2 case."""
    _emit(_job("identities", options={"systems": systems}))


@cli.command("run")
@click.option("--job", "job_path", required=True, type=click.Path(exists=True, dir_okay=False))
def run_job(job_path):
    """Execute a JobSpec JSON document."""
    from models.job import JobSpec
    from modules.errors import ParseError

    try:
        job = JobSpec.from_json(Path(job_path).read_text())
    except ParseError as e:
        click.echo(json.dumps({"error": "ParseError", "message": str(e)}, indent=2, sort_keys=True))
        sys.exit(1)
    _emit(job)


if __name__ == "__main__":
    cli()
