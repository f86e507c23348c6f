"""Program syntax, litmus parser, pretty-printer and thread-local semantics."""

from .ast import ProgramSpec
from .parser import ParseError, parse_program
from .pretty import pretty

__all__ = ["ParseError", "ProgramSpec", "parse_program", "pretty"]
