"""Instance-dependent symmetry handling: detection, group order, lex-leader SBPs."""

from .colored import ColoredGraph, build_colored_graph, circular_chains, lit_node, node_lit
from .detect import GeneratorList, GroupSummary, find_generators
from .lexleader import NotASymmetry, lex_leader_sbp
from .perm import PermError, PermGenerator, format_generators, group_order, parse_generators

__all__ = [
    "ColoredGraph", "build_colored_graph", "circular_chains", "lit_node", "node_lit",
    "GeneratorList", "GroupSummary", "find_generators", "NotASymmetry", "lex_leader_sbp",
    "PermError", "PermGenerator", "format_generators", "group_order", "parse_generators",
]
