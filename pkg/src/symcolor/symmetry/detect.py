"""Formula symmetries: graph search, projection to literals, verification."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

from ..formula import Formula, constraint_multiset, is_formula_symmetry
from .colored import ColoredGraph, build_colored_graph, node_lit
from .perm import PermError, PermGenerator, group_order
from .search import automorphism_generators

log = logging.getLogger(__name__)

NODE_BUDGET = 200_000


class GeneratorList(list):
    """List of :class:`PermGenerator` plus how the search went.

    ``capped`` means the node or time budget ran out; the generators found
    so far are still genuine symmetries, just not a full generating set.
    """

    capped: bool = False
    nodes: int = 0
    elapsed: float = 0.0
    spurious: int = 0        # graph automorphisms that were not formula symmetries
    graph_order: int = 1     # order of the colored-graph group (orbit product)


@dataclass
class GroupSummary:
    num_generators: int
    group_order: int
    detection_time: float
    capped: bool = False

    @classmethod
    def of(cls, gens: GeneratorList) -> "GroupSummary":
        return cls(len(gens), group_order(gens), gens.elapsed, gens.capped)


def project(cg: ColoredGraph, gamma) -> PermGenerator | None:
    """Literal part of a node permutation; None if not Boolean-consistent."""
    m = {}
    for k in range(cg.num_literal_nodes):
        if gamma[k] != k:
            m[node_lit(k)] = node_lit(gamma[k])
    try:
        return PermGenerator(m)
    except PermError:
        return None


def find_generators(src: Formula | ColoredGraph, node_budget: int = NODE_BUDGET,
                    time_budget: float | None = None) -> GeneratorList:
    """Verified literal-permutation generators of the symmetry group of a formula."""
    t0 = time.monotonic()
    cg = src if isinstance(src, ColoredGraph) else build_colored_graph(src)
    f = cg.formula
    if f is None:
        raise ValueError("colored graph carries no formula to verify against")
    sr = automorphism_generators(cg.num_nodes, cg.node_color, cg.adjacency, cg.edges,
                                 node_budget=node_budget, time_budget=time_budget)
    out = GeneratorList()
    ref = constraint_multiset(f)
    seen = set()
    for gamma in sr.generators:
        g = project(cg, gamma)
        if g is None or not is_formula_symmetry(f, g.mapping, ref):
            out.spurious += 1
            continue
        if g and g not in seen:
            seen.add(g)
            out.append(g)
    if out.spurious:
        log.warning("dropped %d spurious graph automorphism(s)", out.spurious)
    out.capped = sr.capped
    out.nodes = sr.nodes
    out.graph_order = sr.order
    out.elapsed = time.monotonic() - t0
    return out
