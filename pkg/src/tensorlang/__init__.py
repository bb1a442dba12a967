"""A small tensor language: parser, type checker, reference and padded evaluators."""

from tensorlang.syntax import parse_program, pretty_print
from tensorlang.typecheck import TypeCheckError, check_program
from tensorlang.evaluate import UNDEF, run
from tensorlang.padded import run_padded

__all__ = [
    "UNDEF",
    "TypeCheckError",
    "check_program",
    "parse_program",
    "pretty_print",
    "run",
    "run_padded",
]
