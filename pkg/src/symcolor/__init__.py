"""Graph coloring as 0-1 ILP with symmetry-breaking predicates."""

__version__ = "0.1.0"
