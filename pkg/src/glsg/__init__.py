"""Generalized Latin square graphs of finite semigroups."""

from glsg.errors import GlsgError
from glsg.graph import GlsgGraph, build_graph, connected_components, export_graph, naive_degrees
from glsg.invariants import InvariantSet, compute_invariants, delta_obstruction, is_regular_glsg
from glsg.semigroup import CayleyTable, FamilySpec, build_family, canonical_form, parse_family, validate_table
from glsg.spectral import Spectrum, spectrum

__all__ = [
    "CayleyTable",
    "FamilySpec",
    "GlsgError",
    "GlsgGraph",
    "InvariantSet",
    "Spectrum",
    "build_family",
    "build_graph",
    "canonical_form",
    "compute_invariants",
    "connected_components",
    "delta_obstruction",
    "export_graph",
    "is_regular_glsg",
    "naive_degrees",
    "parse_family",
    "spectrum",
    "validate_table",
]

__version__ = "0.1.0"
