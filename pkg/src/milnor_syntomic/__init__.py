"""Exact truncated models of syntomic complexes and the graded pieces of Milnor K-groups."""

from .params import HypothesisError, TruncationParams

__all__ = ["HypothesisError", "TruncationParams"]
__version__ = "0.1.0"
