"""Subgraph scaling in geometric inhomogeneous random graphs."""

from ._backend import BACKEND
from .pattern import Pattern, PatternError, named_pattern, parse_pattern

__version__ = "0.1.0"

__all__ = ["BACKEND", "Pattern", "PatternError", "named_pattern", "parse_pattern", "__version__"]
