"""Colored undirected graph of a formula, for automorphism search.

Node layout: literal nodes first (variable ``v`` -> nodes ``2v-2`` for ``v``
and ``2v-1`` for ``~v``), then one node per clause of length 1 or >= 3, one
per PB constraint (plus per-coefficient hubs when coefficients differ), and
one objective node.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import networkx as nx

from ..formula import Formula

log = logging.getLogger(__name__)


def lit_node(lit: int) -> int:
    return 2 * lit - 2 if lit > 0 else -2 * lit - 1


def node_lit(node: int) -> int:
    v = node // 2 + 1
    return -v if node & 1 else v


@dataclass
class ColoredGraph:
    num_nodes: int
    node_color: list[int]
    edges: set[tuple[int, int]]
    node_origin: list[tuple]
    num_literal_nodes: int = 0
    formula: Formula | None = field(default=None, repr=False)
    adjacency: list[list[int]] = field(default_factory=list, repr=False)

    def __post_init__(self):
        if not self.adjacency:
            adj = [[] for _ in range(self.num_nodes)]
            for a, b in self.edges:
                adj[a].append(b)
                adj[b].append(a)
            self.adjacency = [sorted(a) for a in adj]

    @property
    def num_colors(self) -> int:
        return len(set(self.node_color))

    def is_automorphism(self, perm) -> bool:
        col = self.node_color
        if any(col[perm[v]] != col[v] for v in range(self.num_nodes)):
            return False
        es = self.edges
        for a, b in es:
            pa, pb = perm[a], perm[b]
            if (pa, pb) not in es and (pb, pa) not in es:
                return False
        return True


def _key_order(keys):
    return {k: i for i, k in enumerate(sorted(set(keys), key=repr))}


def build_colored_graph(f: Formula, check_chains: bool = True) -> ColoredGraph:
    """Literal nodes share one color; see the module docstring for the rest."""
    f.validate()
    if check_chains:
        chains = circular_chains(f)
        if chains:
            log.warning("formula has %d circular implication chain(s); the graph may "
                        "admit spurious symmetries (they are filtered later)", len(chains))
    nl = 2 * f.num_vars
    keys: list[tuple] = [("lit",)] * nl
    origin: list[tuple] = [("lit", node_lit(k)) for k in range(nl)]
    edges: set[tuple[int, int]] = set()

    def add_edge(a, b):
        edges.add((a, b) if a < b else (b, a))

    for v in range(1, f.num_vars + 1):
        add_edge(lit_node(v), lit_node(-v))
    for ci, c in enumerate(f.clauses):
        if len(c) == 2:
            add_edge(lit_node(c[0]), lit_node(c[1]))
            continue
        node = len(keys)
        keys.append(("clause",))
        origin.append(("clause", ci))
        for lit in c:
            add_edge(node, lit_node(lit))
    for pi, p in enumerate(f.pb_constraints):
        sig = p.signature()
        node = len(keys)
        keys.append(("pb", sig))
        origin.append(("pb", pi))
        coefs = sorted({a for a, _ in p.terms})
        if len(coefs) == 1:
            for _, lit in p.terms:
                add_edge(node, lit_node(lit))
        else:
            # one hub per coefficient value keeps weights from being confused
            hub = {}
            for a in coefs:
                hub[a] = len(keys)
                keys.append(("pbcoef", sig, a))
                origin.append(("pbcoef", pi, a))
                add_edge(node, hub[a])
            for a, lit in p.terms:
                add_edge(hub[a], lit_node(lit))
    if f.objective is not None:
        coefs = sorted({a for a, _ in f.objective})
        node = len(keys)
        keys.append(("objective",))
        origin.append(("objective",))
        if len(coefs) <= 1:
            for _, lit in f.objective:
                add_edge(node, lit_node(lit))
        else:
            hub = {}
            for a in coefs:
                hub[a] = len(keys)
                keys.append(("objcoef", a))
                origin.append(("objcoef", a))
                add_edge(node, hub[a])
            for a, lit in f.objective:
                add_edge(hub[a], lit_node(lit))
    order = _key_order(keys)
    return ColoredGraph(len(keys), [order[k] for k in keys], edges, origin, nl, f)


def circular_chains(f: Formula) -> list[list[int]]:
    """Cycles of binary implications over two or more variables.

    A clause ``(a | b)`` gives ``~a -> b`` and ``~b -> a``.  Every strongly
    connected component of that digraph with at least two literals is
    reported (as a sorted literal list).
    """
    g = nx.DiGraph()
    for c in f.clauses:
        if len(c) == 2:
            a, b = c
            g.add_edge(-a, b)
            g.add_edge(-b, a)
    return sorted(sorted(comp) for comp in nx.strongly_connected_components(g)
                  if len(comp) > 1)
