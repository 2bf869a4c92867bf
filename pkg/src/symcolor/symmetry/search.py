"""Automorphism generators by partition refinement and individualization.

The search follows one path of individualizations down to a discrete
partition (the first path).  Then, from the deepest level upward, it tries
every other vertex of the target cell that is not yet known to be in the
same orbit, looking for a leaf whose refinement trace matches the first
path.  Each success gives an automorphism of the pointwise stabilizer of
the earlier individualized vertices, so the generators found form a strong
generating set and the group order is the product of the orbit sizes.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field


class BudgetExceeded(Exception):
    pass


class _Part:
    """Ordered partition: cells are contiguous ranges of ``lab``."""

    __slots__ = ("lab", "pos", "cell", "end")

    def __init__(self, lab, pos, cell, end):
        self.lab = lab
        self.pos = pos
        self.cell = cell  # node -> start index of its cell
        self.end = end    # start index -> end index (valid at cell starts)

    def copy(self):
        return _Part(self.lab[:], self.pos[:], self.cell[:], self.end[:])

    def discrete(self):
        return all(self.end[self.cell[v]] - self.cell[v] == 1 for v in self.lab)

    def target(self):
        """Start of the first smallest cell with more than one node."""
        best = None
        best_size = None
        i = 0
        n = len(self.lab)
        end = self.end
        while i < n:
            e = end[i]
            size = e - i
            if size > 1 and (best is None or size < best_size):
                best, best_size = i, size
                if size == 2:
                    break
            i = e
        return best


def _initial(colors):
    n = len(colors)
    order = sorted(range(n), key=lambda v: (colors[v], v))
    pos = [0] * n
    for i, v in enumerate(order):
        pos[v] = i
    cell = [0] * n
    end = [0] * n
    i = 0
    while i < n:
        j = i
        c = colors[order[i]]
        while j < n and colors[order[j]] == c:
            j += 1
        for k in range(i, j):
            cell[order[k]] = i
        end[i] = j
        i = j
    return _Part(order, pos, cell, end)


def _refine(p: _Part, adj, queue, ref=None):
    """Equitable refinement in place.

    ``queue`` holds splitter cell starts.  Returns the trace (a list of
    split records), or None as soon as it disagrees with ``ref``.
    """
    lab, pos, cell, end = p.lab, p.pos, p.cell, p.end
    inq = set(queue)
    queue = deque(queue)
    trace = []
    while queue:
        s = queue.popleft()
        inq.discard(s)
        cnt = {}
        for i in range(s, end[s]):
            for w in adj[lab[i]]:
                cnt[w] = cnt.get(w, 0) + 1
        bycell = {}
        for w, c in cnt.items():
            cs = cell[w]
            if end[cs] - cs > 1:
                bycell.setdefault(cs, []).append(w)
        for cs in sorted(bycell):
            ws = bycell[cs]
            ce = end[cs]
            size = ce - cs
            groups = {}
            for w in ws:
                groups.setdefault(cnt[w], []).append(w)
            if len(ws) < size:
                hit = set(ws)
                groups[0] = [lab[i] for i in range(cs, ce) if lab[i] not in hit]
            if len(groups) == 1:
                continue
            keys = sorted(groups)
            rec = (s, cs, tuple((k, len(groups[k])) for k in keys))
            if ref is not None:
                k = len(trace)
                if k >= len(ref) or ref[k] != rec:
                    return None
            trace.append(rec)
            i = cs
            starts = []
            for k in keys:
                g = groups[k]
                starts.append((i, len(g)))
                for w in g:
                    lab[i] = w
                    pos[w] = i
                    i += 1
            for st, ln in starts:
                end[st] = st + ln
                for j in range(st, st + ln):
                    cell[lab[j]] = st
            if cs in inq:
                for st, _ in starts[1:]:
                    queue.append(st)
                    inq.add(st)
            else:
                big = max(range(len(starts)), key=lambda t: starts[t][1])
                for t, (st, _) in enumerate(starts):
                    if t != big:
                        queue.append(st)
                        inq.add(st)
    if ref is not None and len(trace) != len(ref):
        return None
    return trace


def _individualize(p: _Part, v):
    s = p.cell[v]
    e = p.end[s]
    lab, pos = p.lab, p.pos
    i = pos[v]
    u = lab[s]
    lab[s], lab[i] = v, u
    pos[v], pos[u] = s, i
    p.end[s] = s + 1
    p.end[s + 1] = e
    for j in range(s + 1, e):
        p.cell[lab[j]] = s + 1
    return s


@dataclass
class SearchResult:
    generators: list[list[int]] = field(default_factory=list)  # node images
    order: int = 1           # product of orbit sizes (exact unless capped)
    capped: bool = False
    nodes: int = 0
    elapsed: float = 0.0
    base: list[int] = field(default_factory=list)


class _UF:
    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, a):
        par = self.parent
        while par[a] != a:
            par[a] = par[par[a]]
            a = par[a]
        return a

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a == b:
            return
        if self.size[a] < self.size[b]:
            a, b = b, a
        self.parent[b] = a
        self.size[a] += self.size[b]


def automorphism_generators(num_nodes, colors, adjacency, edges=None,
                            node_budget=200_000, time_budget=None) -> SearchResult:
    """Generators of the color-preserving automorphism group of a graph."""
    t0 = time.monotonic()
    deadline = None if time_budget is None else t0 + time_budget
    res = SearchResult()
    if num_nodes == 0:
        return res
    if edges is None:
        edges = {(a, b) for a in range(num_nodes) for b in adjacency[a] if a < b}
    adjset = [set(a) for a in adjacency]

    counter = [0]

    def tick():
        counter[0] += 1
        if counter[0] > node_budget or (
                deadline is not None and counter[0] & 31 == 0 and time.monotonic() > deadline):
            raise BudgetExceeded

    root = _initial(colors)
    starts = sorted({root.cell[v] for v in range(num_nodes)})
    root_trace = _refine(root, adjacency, starts)
    # first path
    parts = [root]
    traces = [root_trace]
    targets = []
    chosen = []
    p = root
    try:
        while True:
            t = p.target()
            if t is None:
                break
            v = p.lab[t]
            targets.append(t)
            chosen.append(v)
            q = p.copy()
            s = _individualize(q, v)
            tr = _refine(q, adjacency, [s])
            tick()
            parts.append(q)
            traces.append(tr)
            p = q
    except BudgetExceeded:
        res.capped = True
        res.nodes = counter[0]
        res.elapsed = time.monotonic() - t0
        return res
    leaf = p.lab
    depth = len(targets)
    res.base = chosen[:]

    def is_aut(gamma):
        for a, b in edges:
            if gamma[b] not in adjset[gamma[a]]:
                return False
        return True

    def explore(q, level):
        """Search below partition ``q`` (matching first-path level ``level``) for an automorphism."""
        if level == depth:
            gamma = [0] * num_nodes
            for i, a in enumerate(leaf):
                gamma[a] = q.lab[i]
            return gamma if is_aut(gamma) else None
        t = targets[level]
        for i in range(t, q.end[t]):
            u = q.lab[i]
            r = q.copy()
            s = _individualize(r, u)
            tick()
            if _refine(r, adjacency, [s], traces[level + 1]) is None:
                continue
            gamma = explore(r, level + 1)
            if gamma is not None:
                return gamma
        return None

    uf = _UF(num_nodes)
    order = 1
    try:
        for level in range(depth - 1, -1, -1):
            t = targets[level]
            v = chosen[level]
            base_part = parts[level]
            failed = set()
            for i in range(t, base_part.end[t]):
                w = base_part.lab[i]
                if w == v:
                    continue
                rw = uf.find(w)
                if rw == uf.find(v) or rw in failed:
                    continue
                r = base_part.copy()
                s = _individualize(r, w)
                tick()
                gamma = None
                if _refine(r, adjacency, [s], traces[level + 1]) is not None:
                    gamma = explore(r, level + 1)
                if gamma is None:
                    failed.add(rw)
                    continue
                res.generators.append(gamma)
                for a in range(num_nodes):
                    if gamma[a] != a:
                        uf.union(a, gamma[a])
                failed = {uf.find(x) for x in failed}
            root_v = uf.find(v)
            orbit = sum(1 for i in range(t, base_part.end[t])
                        if uf.find(base_part.lab[i]) == root_v)
            order *= orbit
    except BudgetExceeded:
        res.capped = True
    res.order = order
    res.nodes = counter[0]
    res.elapsed = time.monotonic() - t0
    return res
