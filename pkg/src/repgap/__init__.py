"""Exact toolkit for rigid and pivotal planar diagram monoids."""

from .diagram import Diagram, Family, compose, flip, identity, parse, serialize, tensor, validate
from .monoids import MonoidTable, enumerate_monoid, family_word

__all__ = [
    "Diagram",
    "Family",
    "MonoidTable",
    "compose",
    "enumerate_monoid",
    "family_word",
    "flip",
    "identity",
    "parse",
    "serialize",
    "tensor",
    "validate",
]

__version__ = "0.1.0"
