"""Bounded exhaustive checking of RC11-RAR client/library programs."""

from .core import (
    Action, ComponentState, Configuration, Mode, TOp, Tok, UsageError,
    canonicalize, last_op, merge_views, observable, wellformed,
)

__all__ = [
    "Action", "ComponentState", "Configuration", "Mode", "TOp", "Tok", "UsageError",
    "canonicalize", "last_op", "merge_views", "observable", "wellformed",
]

__version__ = "0.1.0"
