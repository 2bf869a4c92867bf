"""Undirected simple graphs in DIMACS ``.col`` form.

Vertices are 0-based internally.  Everything that faces a user (file
formats, :func:`degree`, printed colorings) is 1-based, as in DIMACS.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable

log = logging.getLogger(__name__)


class DimacsError(ValueError):
    """Malformed DIMACS graph input."""


@dataclass(frozen=True)
class Graph:
    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    name: str = ""
    adjacency: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        adj: list[list[int]] = [[] for _ in range(self.num_vertices)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(a)) for a in adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], name: str = "") -> "Graph":
        """Build from 0-based edge pairs; duplicates and orientation are ignored."""
        seen = set()
        for u, v in edges:
            if u == v:
                raise DimacsError(f"self-loop on vertex {u + 1}")
            if not (0 <= u < n and 0 <= v < n):
                raise DimacsError(f"edge ({u + 1}, {v + 1}) out of range for n={n}")
            seen.add((min(u, v), max(u, v)))
        return cls(n, tuple(sorted(seen)), name)

    @property
    def n(self) -> int:
        return self.num_vertices

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]


def parse_dimacs_col(text: str | bytes, name: str = "") -> Graph:
    """Parse DIMACS ``.col`` text.

    ``e u v`` and ``e v u`` collapse to one edge.  A header edge count that
    disagrees with the de-duplicated ``e`` lines is tolerated with a warning;
    many published files list every edge in both directions.
    """
    if isinstance(text, bytes):
        text = text.decode("ascii")
    n = None
    declared_m = 0
    raw_edges = []
    for lineno, line in enumerate(text.splitlines(), 1):
        tok = line.split()
        if not tok or tok[0] == "c":
            continue
        if tok[0] == "p":
            if n is not None:
                raise DimacsError(f"line {lineno}: duplicate 'p' line")
            if len(tok) != 4 or tok[1] not in ("edge", "col"):
                raise DimacsError(f"line {lineno}: expected 'p edge <n> <m>'")
            n, declared_m = _ints(tok[2:], lineno)
            if n < 0 or declared_m < 0:
                raise DimacsError(f"line {lineno}: negative size")
        elif tok[0] == "e":
            if n is None:
                raise DimacsError(f"line {lineno}: 'e' line before 'p' line")
            if len(tok) != 3:
                raise DimacsError(f"line {lineno}: expected 'e <u> <v>'")
            u, v = _ints(tok[1:], lineno)
            if not (1 <= u <= n and 1 <= v <= n):
                raise DimacsError(f"line {lineno}: vertex index out of range 1..{n}")
            if u == v:
                raise DimacsError(f"line {lineno}: self-loop on vertex {u}")
            raw_edges.append((u - 1, v - 1))
        elif tok[0] in ("n", "x"):
            # vertex weights / extensions from some generators; not used
            continue
        else:
            raise DimacsError(f"line {lineno}: unknown line type {tok[0]!r}")
    if n is None:
        raise DimacsError("missing 'p edge' line")
    g = Graph.from_edges(n, raw_edges, name)
    if g.m != declared_m:
        log.warning("%s: header declares %d edges, file has %d distinct edges",
                    name or "graph", declared_m, g.m)
    return g


def _ints(tokens, lineno):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise DimacsError(f"line {lineno}: non-integer token in {tokens}") from None


def to_dimacs_col(g: Graph, comment: str | None = None) -> str:
    """Serialize with canonical (sorted, u < v) edge order."""
    out = []
    if comment:
        out.extend(f"c {c}" for c in comment.splitlines())
    out.append(f"p edge {g.n} {g.m}")
    out.extend(f"e {u + 1} {v + 1}" for u, v in g.edges)
    return "\n".join(out) + "\n"


def read_col(path) -> Graph:
    from pathlib import Path
    p = Path(path)
    return parse_dimacs_col(p.read_text(), name=p.stem)


def degree(g: Graph, v: int) -> int:
    """Degree of the 1-based vertex ``v``."""
    if not 1 <= v <= g.n:
        raise IndexError(f"vertex {v} out of range 1..{g.n}")
    return len(g.adjacency[v - 1])


# --- exhaustive oracles (small graphs only) ---------------------------------

class OracleTooLarge(ValueError):
    pass


def brute_force_chromatic(g: Graph, max_vertices: int = 10) -> int:
    """Exact chromatic number by exhaustive backtracking.

    Colors are introduced in canonical order (vertex ``i`` may only open
    color ``max_used + 1``), which removes color-permutation duplicates.
    """
    n = g.n
    if n > max_vertices:
        raise OracleTooLarge(f"{n} vertices exceeds oracle cap {max_vertices}")
    if n == 0:
        return 0
    adj = g.adjacency

    def colorable(k):
        col = [-1] * n

        def rec(i, used):
            if i == n:
                return True
            banned = {col[w] for w in adj[i] if w < i}
            for c in range(min(used + 1, k)):
                if c not in banned:
                    col[i] = c
                    if rec(i + 1, max(used, c + 1)):
                        return True
            col[i] = -1
            return False

        return rec(0, 0)

    for k in range(1, n + 1):
        if colorable(k):
            return k
    raise AssertionError("unreachable: n colors always suffice")


def brute_force_max_clique(g: Graph, max_vertices: int = 10) -> int:
    if g.n > max_vertices:
        raise OracleTooLarge(f"{g.n} vertices exceeds oracle cap {max_vertices}")
    best = 1 if g.n else 0
    for size in range(2, g.n + 1):
        if any(all(g.has_edge(a, b) for a, b in itertools.combinations(c, 2))
               for c in itertools.combinations(range(g.n), size)):
            best = size
        else:
            break
    return best


def brute_force_automorphisms(g: Graph, max_vertices: int = 8) -> list[tuple[int, ...]]:
    """All vertex permutations preserving adjacency (0-based images)."""
    if g.n > max_vertices:
        raise OracleTooLarge(f"{g.n} vertices exceeds oracle cap {max_vertices}")
    es = set(g.edges)
    degs = [len(a) for a in g.adjacency]
    out = []
    for p in itertools.permutations(range(g.n)):
        if any(degs[i] != degs[p[i]] for i in range(g.n)):
            continue
        if all((min(p[u], p[v]), max(p[u], p[v])) in es for u, v in g.edges):
            out.append(p)
    return out


def is_proper_coloring(g: Graph, colors) -> bool:
    return all(colors[u] != colors[v] for u, v in g.edges)


# --- deterministic benchmark families ---------------------------------------

def mycielski_graph(k: int) -> Graph:
    """DIMACS ``myciel<k>``: iterated Mycielskian starting from K2 (= myciel1).

    Vertex numbering follows the DIMACS files: originals first, then their
    shadows, then the apex.  ``myciel3`` is the Groetzsch graph.
    """
    if k < 1:
        raise ValueError("k >= 1")
    n, edges = 2, [(0, 1)]
    for _ in range(k - 1):
        new = list(edges)
        for u, v in edges:
            new.append((u, n + v))
            new.append((v, n + u))
        apex = 2 * n
        new.extend((n + i, apex) for i in range(n))
        n, edges = 2 * n + 1, new
    return Graph.from_edges(n, edges, name=f"myciel{k}")


def queen_graph(rows: int, cols: int) -> Graph:
    """DIMACS ``queen<r>_<c>``: cells attack along rows, columns, diagonals."""
    cells = [(r, c) for r in range(rows) for c in range(cols)]
    edges = []
    for a, (r1, c1) in enumerate(cells):
        for b in range(a + 1, len(cells)):
            r2, c2 = cells[b]
            if r1 == r2 or c1 == c2 or abs(r1 - r2) == abs(c1 - c2):
                edges.append((a, b))
    return Graph.from_edges(len(cells), edges, name=f"queen{rows}_{cols}")


def random_graph(n: int, p: float, rng) -> Graph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges)
