"""Instance-independent symmetry-breaking predicates for the coloring encoding.

All four families target color permutations:

NU  null colors only at the end: ``y[k+1] -> y[k]``
CA  color classes sorted by size: ``sum_i x[i,k] >= sum_i x[i,k+1]``
LI  lowest-index vertices of the colors ordered (fresh ``V[i,k]`` variables)
SC  pin a max-degree vertex to color 1 and its max-degree neighbor to color 2

Every function returns a new :class:`Formula`; new constraints are appended
after the existing ones and new variables get ids above the current range.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formula import Formula, FormulaError, normalize_pb
from .graph import Graph

ORDER = ("nu", "ca", "li", "sc")


@dataclass(frozen=True)
class SbpConfig:
    flags: frozenset = frozenset()

    def __post_init__(self):
        bad = set(self.flags) - set(ORDER)
        if bad:
            raise ValueError(f"unknown SBP flag(s): {sorted(bad)}")

    @classmethod
    def parse(cls, text: str | None) -> "SbpConfig":
        """``"nu,sc"`` / ``"NU+SC"`` / ``""`` / ``"none"``."""
        if not text or text.strip().lower() in ("none", "no", "-"):
            return cls()
        parts = text.replace("+", ",").lower().split(",")
        return cls(frozenset(p.strip() for p in parts if p.strip()))

    @property
    def ordered(self) -> tuple[str, ...]:
        return tuple(f for f in ORDER if f in self.flags)

    @property
    def name(self) -> str:
        return "+".join(f.upper() for f in self.ordered) or "none"

    def __str__(self):
        return self.name


# The six configurations of the standard experiment grid.
GRID_CONFIGS = tuple(SbpConfig.parse(s) for s in ("", "nu", "ca", "li", "sc", "nu,sc"))


def _usage_vars(f: Formula, K: int) -> dict[int, int]:
    ys = {key[0]: v for key, v in f.vars_with_role("y").items()}
    if not ys:
        raise FormulaError("formula has no color-usage variables (decision CNF?)")
    if sorted(ys) != list(range(1, K + 1)):
        raise FormulaError(f"formula has usage variables for colors {sorted(ys)}, expected 1..{K}")
    return ys


def _color_vars(f: Formula) -> dict[tuple[int, int], int]:
    return f.vars_with_role("x")


def add_nu(f: Formula, K: int) -> Formula:
    y = _usage_vars(f, K)
    clauses = [(-y[k + 1], y[k]) for k in range(1, K)]
    return f.extend(clauses=clauses)


def add_ca(f: Formula, g: Graph, K: int) -> Formula:
    """``K - 1`` PB constraints, stored as ``sum ~x[i,k] + sum x[i,k+1] <= n``."""
    _usage_vars(f, K)
    x = _color_vars(f)
    pb = []
    for k in range(1, K):
        terms = [(1, x[i, k]) for i in range(1, g.n + 1)]
        terms += [(-1, x[i, k + 1]) for i in range(1, g.n + 1)]
        pb.append(normalize_pb(terms, ">=", 0))
    return f.extend(pb=pb)


def li_clause_count(n: int, K: int) -> int:
    """Clauses added by :func:`add_li` (including the definitional link)."""
    return K * (n * (n - 1) + 2 * n + 1) + (K - 1) * n


def add_li(f: Formula, g: Graph, K: int) -> Formula:
    """Lowest-index ordering.

    ``V[i,k]`` holds iff vertex ``i`` is the lowest-index vertex with color
    ``k``.  Besides uniqueness, existence and ordering, ``V`` is tied to the
    ``x`` variables in both directions, otherwise it would float free.
    Ordering makes the lowest index of color ``k - 1`` larger than that of
    color ``k``.
    """
    y = _usage_vars(f, K)
    x = _color_vars(f)
    n = g.n
    base = f.num_vars

    def V(i, k):
        return base + (i - 1) * K + k

    roles = {V(i, k): ("V", i, k) for i in range(1, n + 1) for k in range(1, K + 1)}
    cl = []
    for k in range(1, K + 1):
        for i in range(1, n + 1):
            cl.extend((-V(i, k), -V(j, k)) for j in range(1, i))
    for k in range(1, K + 1):
        cl.append((-y[k],) + tuple(V(i, k) for i in range(1, n + 1)))
    # color 1 has no predecessor, so ordering starts at k = 2
    for k in range(2, K + 1):
        for i in range(1, n + 1):
            cl.append((-V(i, k),) + tuple(V(j, k - 1) for j in range(i + 1, n + 1)))
    for k in range(1, K + 1):
        for i in range(1, n + 1):
            cl.append((-V(i, k), x[i, k]))
            cl.extend((-V(i, k), -x[j, k]) for j in range(1, i))
            cl.append((-x[i, k],) + tuple(x[j, k] for j in range(1, i)) + (V(i, k),))
    return f.extend(new_vars=n * K, clauses=cl, roles=roles)


def sc_vertices(g: Graph) -> tuple[int, int | None]:
    """0-based (max-degree vertex, its max-degree neighbor); ties go to the lower index."""
    if g.n == 0:
        raise FormulaError("empty graph")
    deg = [len(a) for a in g.adjacency]
    lead = max(range(g.n), key=lambda v: (deg[v], -v))
    nbrs = g.adjacency[lead]
    if not nbrs:
        return lead, None
    second = max(nbrs, key=lambda v: (deg[v], -v))
    return lead, second


def add_sc(f: Formula, g: Graph) -> Formula:
    if g.n == 0:
        return f
    x = _color_vars(f)
    lead, second = sc_vertices(g)
    clauses = [(x[lead + 1, 1],)]
    if second is not None and (second + 1, 2) in x:
        clauses.append((x[second + 1, 2],))
    return f.extend(clauses=clauses)


def apply_sbps(f: Formula, g: Graph, K: int, config: SbpConfig) -> Formula:
    """Apply the configured families in the fixed order NU, CA, LI, SC."""
    for flag in config.ordered:
        if flag == "nu":
            f = add_nu(f, K)
        elif flag == "ca":
            f = add_ca(f, g, K)
        elif flag == "li":
            f = add_li(f, g, K)
        elif flag == "sc":
            f = add_sc(f, g)
    return f.extend(comment=f"sbp: {config.name}")
