"""Translate set-based quantum-state specifications into tree automata."""

from .build import TranslationResult, translate
from .errors import LstaqError
from .lsta import Lsta, StateVector, enumerate_language, membership, write_lsta
from .oracle import denote, differential_check
from .parser import parse, parse_many

__version__ = "0.1.0"

__all__ = [
    "Lsta",
    "LstaqError",
    "StateVector",
    "TranslationResult",
    "denote",
    "differential_check",
    "enumerate_language",
    "membership",
    "parse",
    "parse_many",
    "translate",
    "write_lsta",
    "__version__",
]
