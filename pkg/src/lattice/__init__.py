"""Lattice domains and coefficient fields."""

from .domain import Exhaustion, NodeSet, build_exhaustion, tail_region
from .fields import FieldSpec, parse_field, spec_hash

__all__ = [
    "Exhaustion",
    "NodeSet",
    "build_exhaustion",
    "tail_region",
    "FieldSpec",
    "parse_field",
    "spec_hash",
]
