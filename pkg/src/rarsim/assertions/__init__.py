"""Assertion language, proof-outline checking and Hoare-rule corpus checks."""

from .syntax import parse_assertion

__all__ = ["parse_assertion"]
