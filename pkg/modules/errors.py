"""
errors.py — Exception hierarchy shared by every engine and mapped to CLI exit codes.
"""
from __future__ import annotations


class IsoK1Error(Exception):
    """Base class for all toolkit errors."""

    exit_code = 2


class ParseError(IsoK1Error, ValueError):
    """Malformed word, polynomial, matrix or job document."""

    exit_code = 1


class RejectedInput(IsoK1Error, ValueError):
    """A precondition of the requested operation does not hold."""

    exit_code = 2

    def __init__(self, message: str, residue=None):
        super().__init__(message)
        self.residue = residue


class BudgetExhausted(IsoK1Error, RuntimeError):
    """A search ran out of its configured budget before finding a certificate."""

    exit_code = 3

    def __init__(self, message: str, transcript=None):
        super().__init__(message)
        self.transcript = transcript
