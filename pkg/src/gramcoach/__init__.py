"""gramcoach: a desk-scale grammar coaching engine.

Parses Spanish sentences with a typed-feature-structure unification
grammar, detects learner error constructions through relaxation rules
carrying a LEARNER marker, and returns feedback plus a corrected form.
Ships a toy grammar fragment, a chart parser with rule and supertag
filters, MRS-lite semantics, a suite profiler, a CLI and an HTTP service.
"""

from .chart import ParseOptions, ParseResult, parse
from .coaching import Verdict, coach_sentence
from .errors import CoachError, GrammarLoadError, InputError, InvariantError
from .grammar import Grammar, load_grammar
from .tfs import FeatureStructure, TypeHierarchy, UnificationFailure, subsumes, unify

__version__ = "0.1.0"

__all__ = [
    "CoachError",
    "FeatureStructure",
    "Grammar",
    "GrammarLoadError",
    "InputError",
    "InvariantError",
    "ParseOptions",
    "ParseResult",
    "TypeHierarchy",
    "UnificationFailure",
    "Verdict",
    "coach_sentence",
    "load_grammar",
    "parse",
    "subsumes",
    "unify",
    "__version__",
]
