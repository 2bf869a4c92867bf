"""CDCL search over CNF + normalized PB constraints, with linear-search minimization.

Internally a literal is ``2*v`` (positive) or ``2*v + 1`` (negated), so
negation is ``lit ^ 1`` and per-literal arrays avoid sign handling in the hot
loop.  Clauses of length two live in implication lists; longer clauses use
two watched literals.  PB constraints ``sum a_i l_i <= b`` keep a slack
counter ``b - sum(a_i : l_i true)``; a literal whose coefficient exceeds the
slack is forced false.
"""

from __future__ import annotations

import heapq
import logging
import random
import time
from dataclasses import dataclass, field
from typing import Sequence

from .formula import EQ, Formula, FormulaError, PbConstraint, lit_true

log = logging.getLogger(__name__)

OPTIMAL = "OPTIMAL"
SAT = "SAT"
UNSAT = "UNSAT"
TIMEOUT = "TIMEOUT"

DEFAULT_TIMEOUT = 1000.0

_PBOFF = 1 << 40  # reason codes >= this are PB constraint ids
_DECISION = -1    # reason code of decisions and level-0 facts


class InternalError(RuntimeError):
    """A model failed verification: a solver bug, never a user error."""


@dataclass
class Budget:
    timeout: float | None = DEFAULT_TIMEOUT
    max_conflicts: int | None = None

    def deadline(self, start: float) -> float | None:
        return None if self.timeout is None else start + self.timeout


@dataclass
class SolveResult:
    status: str
    best_value: int | None = None
    model: tuple[bool, ...] | None = None  # index 0 unused
    stats: dict = field(default_factory=dict)
    history: list[int] = field(default_factory=list)

    def true_vars(self) -> list[int]:
        return [v for v in range(1, len(self.model)) if self.model[v]] if self.model else []

    def to_dict(self, with_model: bool = True) -> dict:
        d = {"status": self.status, "value": self.best_value, "stats": dict(self.stats),
             "history": list(self.history)}
        if with_model and self.model is not None:
            d["model"] = [v if self.model[v] else -v for v in range(1, len(self.model))]
        return d


def _enc(lit: int) -> int:
    return 2 * lit if lit > 0 else -2 * lit + 1


def _dec(code: int) -> int:
    return -(code >> 1) if code & 1 else code >> 1


def _luby(i: int) -> int:
    """i-th element (0-based) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i %= size
    return 1 << seq


class Solver:
    """Incremental CDCL engine.  Not thread-safe; one instance per search."""

    restart_unit = 64
    var_decay = 0.95
    reduce_first = 2000
    reduce_inc = 300

    def __init__(self, formula: Formula, seed: int = 0, learning: bool = True):
        formula.validate()
        self.formula = formula
        self.learning = learning
        n = formula.num_vars
        self.n = n
        size = 2 * n + 2
        self.val = [0] * size
        self.level = [0] * (n + 1)
        self.reason = [_DECISION] * (n + 1)
        self.tpos = [0] * (n + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.bins: list[list[int]] = [[] for _ in range(size)]
        self.watches: list[list[int]] = [[] for _ in range(size)]
        self.cls: list[list[int] | None] = []
        self.learnt_info: dict[int, int] = {}  # clause id -> LBD
        self.pb_terms: list[list[tuple[int, int]]] = []
        self.pb_bound: list[int] = []
        self.pb_slack: list[int] = []
        self.pb_amax: list[int] = []
        self.pb_occ: list[list[tuple[int, int]]] = [[] for _ in range(size)]
        self.phase = [1] * (n + 1)  # 1 = try false first
        rng = random.Random(seed)
        self.activity = [0.0] + [rng.random() * 1e-6 for _ in range(n)]
        self.var_inc = 1.0
        self.heap = [(-self.activity[v], v) for v in range(1, n + 1)]
        heapq.heapify(self.heap)
        self.seen = [0] * (n + 1)
        self.flipped: list[bool] = []  # learning=False: per level, decision already flipped
        self.ok = True
        self.stats = dict(decisions=0, propagations=0, conflicts=0, restarts=0, learned=0,
                          deleted=0)
        for c in formula.clauses:
            self.add_clause(c)
        for p in formula.pb_constraints:
            self.add_pb(p)

    # --- building ------------------------------------------------------------

    def _root(self):
        if self.trail_lim:
            self._backtrack(0)

    def add_clause(self, lits: Sequence[int]) -> None:
        """Add a clause (signed DIMACS literals) at decision level 0."""
        if not self.ok:
            return
        self._root()
        out = []
        for e in dict.fromkeys(lits):
            L = _enc(e)
            if (L ^ 1) in out or self.val[L] == 1:
                return  # tautology or already satisfied
            if self.val[L] == 0:
                out.append(L)
        if not out:
            self.ok = False
        elif len(out) == 1:
            self._assign(out[0], _DECISION)
            self.ok = self._propagate() is None
        elif len(out) == 2:
            self.bins[out[0]].append(out[1])
            self.bins[out[1]].append(out[0])
        else:
            ci = len(self.cls)
            self.cls.append(out)
            self.watches[out[0]].append(ci)
            self.watches[out[1]].append(ci)

    def add_pb(self, c: PbConstraint) -> None:
        if c.relation == EQ:
            self._add_le(list(c.terms), c.bound)
            total = sum(a for a, _ in c.terms)
            if c.bound >= 1 and all(a >= c.bound for a, _ in c.terms):
                self.add_clause([lit for _, lit in c.terms])
            else:
                self._add_le([(a, -lit) for a, lit in c.terms], total - c.bound)
        else:
            self._add_le(list(c.terms), c.bound)

    def add_le(self, terms: Sequence[tuple[int, int]], bound: int) -> None:
        """``sum coef * lit <= bound`` over signed literals, positive coefficients."""
        self._add_le(list(terms), bound)

    def _add_le(self, terms, bound):
        if not self.ok:
            return
        self._root()
        if sum(a for a, _ in terms) <= bound:
            return
        enc = sorted(((a, _enc(l)) for a, l in terms), key=lambda t: -t[0])
        pi = len(self.pb_terms)
        slack = bound - sum(a for a, L in enc if self.val[L] == 1)
        self.pb_terms.append(enc)
        self.pb_bound.append(bound)
        self.pb_slack.append(slack)
        self.pb_amax.append(enc[0][0] if enc else 0)
        for a, L in enc:
            self.pb_occ[L].append((pi, a))
        if slack < 0:
            self.ok = False
            return
        for a, L in enc:
            if a <= slack:
                break
            if self.val[L] == 0:
                self._assign(L ^ 1, _DECISION)
        self.ok = self._propagate() is None

    # --- core ----------------------------------------------------------------

    def _assign(self, L, why):
        v = L >> 1
        self.val[L] = 1
        self.val[L ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = why
        self.tpos[v] = len(self.trail)
        self.trail.append(L)

    def _propagate(self):
        """Unit propagation to fixpoint.  Returns a falsified clause (internal lits) or None."""
        trail = self.trail
        val = self.val
        level = self.level
        reason = self.reason
        tpos = self.tpos
        bins = self.bins
        watches = self.watches
        cls = self.cls
        pb_occ = self.pb_occ
        pb_slack = self.pb_slack
        pb_amax = self.pb_amax
        pb_terms = self.pb_terms
        valget = val.__getitem__
        lvl = len(self.trail_lim)
        qhead = self.qhead
        props = 0
        confl = None
        while qhead < len(trail):
            p = trail[qhead]
            qhead += 1
            props += 1
            occ = pb_occ[p]
            for pi, a in occ:
                pb_slack[pi] -= a
            fp = p ^ 1
            for q in bins[fp]:
                vq = val[q]
                if vq == 1:
                    continue
                if vq == -1:
                    confl = [q, fp]
                    break
                v = q >> 1
                val[q] = 1
                val[q ^ 1] = -1
                level[v] = lvl
                reason[v] = -2 - fp
                tpos[v] = len(trail)
                trail.append(q)
            if confl is not None:
                break
            for pi, a in occ:
                s = pb_slack[pi]
                if s >= pb_amax[pi]:
                    continue
                if s < 0:
                    confl = [L ^ 1 for _, L in pb_terms[pi] if val[L] == 1]
                    break
                why = _PBOFF + pi
                for b, L in pb_terms[pi]:
                    if b <= s:
                        break
                    if val[L] == 0:
                        q = L ^ 1
                        v = q >> 1
                        val[q] = 1
                        val[L] = -1
                        level[v] = lvl
                        reason[v] = why
                        tpos[v] = len(trail)
                        trail.append(q)
            if confl is not None:
                break
            ws = watches[fp]
            i = j = 0
            nw = len(ws)
            while i < nw:
                ci = ws[i]
                i += 1
                c = cls[ci]
                if c is None:
                    continue
                if c[0] == fp:
                    c[0] = c[1]
                    c[1] = fp
                first = c[0]
                if val[first] == 1:
                    ws[j] = ci
                    j += 1
                    continue
                # scan for a non-false literal at C speed
                t = list(map(valget, c))
                t[0] = t[1] = -1
                if 1 in t:
                    k = t.index(1)
                elif 0 in t:
                    k = t.index(0)
                else:
                    k = 0
                if k:
                    L = c[k]
                    c[1] = L
                    c[k] = fp
                    watches[L].append(ci)
                else:
                    ws[j] = ci
                    j += 1
                    if val[first] == -1:
                        confl = c
                        while i < nw:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        break
                    v = first >> 1
                    val[first] = 1
                    val[first ^ 1] = -1
                    level[v] = lvl
                    reason[v] = ci
                    tpos[v] = len(trail)
                    trail.append(first)
            del ws[j:]
            if confl is not None:
                break
        self.qhead = qhead
        self.stats["propagations"] += props
        return confl

    def _backtrack(self, lvl):
        if len(self.trail_lim) <= lvl:
            return
        lim = self.trail_lim[lvl]
        trail = self.trail
        val = self.val
        pb_occ = self.pb_occ
        pb_slack = self.pb_slack
        phase = self.phase
        heap = self.heap
        act = self.activity
        qhead = self.qhead
        for idx in range(len(trail) - 1, lim - 1, -1):
            L = trail[idx]
            v = L >> 1
            if idx < qhead:
                for pi, a in pb_occ[L]:
                    pb_slack[pi] += a
            val[L] = 0
            val[L ^ 1] = 0
            phase[v] = L & 1
            heapq.heappush(heap, (-act[v], v))
        del trail[lim:]
        del self.trail_lim[lvl:]
        del self.flipped[lvl:]
        self.qhead = lim

    def _reason_lits(self, v):
        """False literals that forced variable ``v`` (the implied literal excluded)."""
        r = self.reason[v]
        if r >= _PBOFF:
            pi = r - _PBOFF
            pos = self.tpos[v]
            val = self.val
            tpos = self.tpos
            return [L ^ 1 for _, L in self.pb_terms[pi]
                    if val[L] == 1 and tpos[L >> 1] < pos]
        if r >= 0:
            return self.cls[r][1:]
        return [-2 - r]

    def _bump(self, v):
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for u in range(1, self.n + 1):
                act[u] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-act[u], u) for u in range(1, self.n + 1) if self.val[2 * u] == 0]
            heapq.heapify(self.heap)
        elif self.val[2 * v] == 0:
            heapq.heappush(self.heap, (-act[v], v))

    def _analyze(self, confl):
        """First-UIP learning; returns (learnt clause, backjump level)."""
        seen = self.seen
        level = self.level
        trail = self.trail
        cur = len(self.trail_lim)
        learnt = [0]
        path = 0
        idx = len(trail) - 1
        lits = confl
        p = -1
        while True:
            for q in lits:
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    self._bump(v)
                    if level[v] >= cur:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            seen[p >> 1] = 0
            path -= 1
            if path == 0:
                break
            lits = self._reason_lits(p >> 1)
        learnt[0] = p ^ 1
        # drop literals implied by the rest of the clause (recursive check)
        abstract = 0
        for q in learnt[1:]:
            abstract |= 1 << (level[q >> 1] & 31)
        toclear = [q >> 1 for q in learnt[1:]]
        kept = [learnt[0]]
        for q in learnt[1:]:
            if self.reason[q >> 1] == _DECISION or not self._redundant(q, abstract, toclear):
                kept.append(q)
        for v in toclear:
            seen[v] = 0
        bt = 0
        if len(kept) > 1:
            best = 1
            for k in range(2, len(kept)):
                if level[kept[k] >> 1] > level[kept[best] >> 1]:
                    best = k
            kept[1], kept[best] = kept[best], kept[1]
            bt = level[kept[1] >> 1]
        return kept, bt

    def _redundant(self, q, abstract, toclear):
        """True if ``q`` follows from other learnt literals through reasons."""
        seen = self.seen
        level = self.level
        reason = self.reason
        stack = [q]
        top = len(toclear)
        while stack:
            for r in self._reason_lits(stack.pop() >> 1):
                u = r >> 1
                if seen[u] or level[u] == 0:
                    continue
                if reason[u] != _DECISION and (1 << (level[u] & 31)) & abstract:
                    seen[u] = 1
                    stack.append(r)
                    toclear.append(u)
                else:
                    for w in toclear[top:]:
                        seen[w] = 0
                    del toclear[top:]
                    return False
        return True

    def _learn(self, learnt):
        self.stats["learned"] += 1
        if len(learnt) == 1:
            self._assign(learnt[0], _DECISION)
        elif len(learnt) == 2:
            self.bins[learnt[0]].append(learnt[1])
            self.bins[learnt[1]].append(learnt[0])
            self._assign(learnt[0], -2 - learnt[1])
        else:
            ci = len(self.cls)
            self.cls.append(learnt)
            self.watches[learnt[0]].append(ci)
            self.watches[learnt[1]].append(ci)
            self.learnt_info[ci] = len({self.level[L >> 1] for L in learnt})
            self._assign(learnt[0], ci)

    def _reduce_db(self):
        locked = set()
        for L in self.trail:
            r = self.reason[L >> 1]
            if 0 <= r < _PBOFF:
                locked.add(r)
        cand = [ci for ci, lbd in self.learnt_info.items() if lbd > 2 and ci not in locked]
        cand.sort(key=lambda ci: (-self.learnt_info[ci], ci))
        for ci in cand[: len(cand) // 2]:
            self.cls[ci] = None
            del self.learnt_info[ci]
        self.stats["deleted"] += len(cand) // 2

    def _pick(self):
        heap = self.heap
        val = self.val
        act = self.activity
        while heap:
            a, v = heapq.heappop(heap)
            if val[2 * v] == 0 and -a == act[v]:
                return v
        for v in range(1, self.n + 1):  # stale heap; should not happen
            if val[2 * v] == 0:
                return v
        return None

    def solve(self, deadline: float | None = None, max_conflicts: int | None = None) -> str:
        """Search for a model of the current constraint set: SAT / UNSAT / TIMEOUT."""
        if not self.ok:
            return UNSAT
        self._root()
        if self._propagate() is not None:
            self.ok = False
            return UNSAT
        stats = self.stats
        conflicts_here = 0
        luby_i = 0
        restart_at = self.restart_unit * _luby(luby_i)
        since_restart = 0
        next_reduce = stats["conflicts"] + self.reduce_first
        tick = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                stats["conflicts"] += 1
                conflicts_here += 1
                since_restart += 1
                if not self.trail_lim:
                    self.ok = False
                    return UNSAT
                if self.learning:
                    learnt, bt = self._analyze(confl)
                    self._backtrack(bt)
                    self._learn(learnt)
                    self.var_inc /= self.var_decay
                else:
                    lvl = len(self.flipped) - 1
                    while lvl >= 0 and self.flipped[lvl]:
                        lvl -= 1
                    if lvl < 0:
                        self.ok = False
                        return UNSAT
                    dec = self.trail[self.trail_lim[lvl]]
                    self._backtrack(lvl)
                    self.trail_lim.append(len(self.trail))
                    self.flipped.append(True)
                    self._assign(dec ^ 1, _DECISION)
                if max_conflicts is not None and conflicts_here >= max_conflicts:
                    self._root()
                    return TIMEOUT
                continue
            if self.learning and since_restart >= restart_at:
                since_restart = 0
                luby_i += 1
                restart_at = self.restart_unit * _luby(luby_i)
                stats["restarts"] += 1
                self._backtrack(0)
                continue
            if self.learning and stats["conflicts"] >= next_reduce:
                self._reduce_db()
                next_reduce = stats["conflicts"] + self.reduce_first + \
                    self.reduce_inc * (stats["deleted"] // 1000)
            tick += 1
            if deadline is not None and tick & 63 == 0 and time.monotonic() > deadline:
                self._root()
                return TIMEOUT
            v = self._pick()
            if v is None:
                return SAT
            stats["decisions"] += 1
            self.trail_lim.append(len(self.trail))
            self.flipped.append(False)
            self._assign(2 * v + self.phase[v], _DECISION)

    def model(self) -> tuple[bool, ...]:
        return (False,) + tuple(self.val[2 * v] == 1 for v in range(1, self.n + 1))


def _verified(f: Formula, model) -> None:
    bad = f.violations(model)
    if bad:
        raise InternalError(f"model violates {len(bad)} constraint(s), e.g. {bad[0]}")


def decide(f: Formula, budget: Budget | None = None, seed: int = 0,
           learning: bool = True) -> SolveResult:
    """Satisfiability of the constraints of ``f`` (any objective is ignored)."""
    budget = budget or Budget()
    t0 = time.monotonic()
    s = Solver(f, seed=seed, learning=learning)
    status = s.solve(budget.deadline(t0), budget.max_conflicts)
    res = SolveResult(status, stats=dict(s.stats))
    if status == SAT:
        res.model = s.model()
        _verified(f, res.model)
    res.stats["elapsed"] = time.monotonic() - t0
    return res


def minimize(f: Formula, budget: Budget | None = None, seed: int = 0,
             learning: bool = True) -> SolveResult:
    """Linear search on the objective.

    After each model of value ``B`` the constraint ``objective <= B - 1`` is
    added and the same solver instance (keeping learned clauses) is rerun.
    UNSAT then proves the last model optimal; running out of budget returns
    TIMEOUT with the incumbent, if any.
    """
    if f.objective is None:
        raise FormulaError("minimize() needs an objective")
    budget = budget or Budget()
    t0 = time.monotonic()
    deadline = budget.deadline(t0)
    s = Solver(f, seed=seed, learning=learning)
    best = None
    best_val = None
    history = []
    conflicts_left = budget.max_conflicts
    while True:
        before = s.stats["conflicts"]
        status = s.solve(deadline, conflicts_left)
        if conflicts_left is not None:
            conflicts_left -= s.stats["conflicts"] - before
        if status == SAT:
            model = s.model()
            _verified(f, model)
            value = f.objective_value(model)
            best, best_val = model, value
            history.append(value)
            log.debug("incumbent %d after %.2fs", value, time.monotonic() - t0)
            if value == 0 or value <= sum(min(a, 0) for a, _ in f.objective):
                status = UNSAT
            else:
                s.add_le(f.objective, value - 1)
                if conflicts_left is not None and conflicts_left <= 0:
                    status = TIMEOUT
                else:
                    continue
        if status == UNSAT:
            final = OPTIMAL if best is not None else UNSAT
        else:
            final = TIMEOUT
        stats = dict(s.stats)
        stats["elapsed"] = time.monotonic() - t0
        return SolveResult(final, best_val, best, stats, history)


# --- reference forms of the propagation and learning rules ------------------

@dataclass
class PbPropagation:
    implied: list[int]
    conflict: bool
    slack: int


def propagate_pb(c: PbConstraint, assignment: dict[int, bool]) -> PbPropagation:
    """Slack rule on one constraint under a partial assignment ``{var: bool}``.

    ``=`` is checked as the pair ``sum <= b`` and ``sum ~l <= total - b``.
    Implied literals are signed DIMACS literals.
    """

    def one(terms, bound):
        slack = bound - sum(a for a, l in terms
                            if abs(l) in assignment and lit_true(l, _AsVec(assignment)))
        if slack < 0:
            return slack, None
        forced = [-l for a, l in terms if abs(l) not in assignment and a > slack]
        return slack, forced

    pairs = [(list(c.terms), c.bound)]
    if c.relation == EQ:
        pairs.append(([(a, -l) for a, l in c.terms], sum(a for a, _ in c.terms) - c.bound))
    implied: list[int] = []
    first_slack = None
    for terms, bound in pairs:
        slack, forced = one(terms, bound)
        if first_slack is None:
            first_slack = slack
        if forced is None:
            return PbPropagation([], True, slack)
        implied.extend(l for l in forced if l not in implied)
    if any(-l in implied for l in implied):
        return PbPropagation([], True, first_slack)
    return PbPropagation(implied, False, first_slack)


class _AsVec:
    def __init__(self, d):
        self.d = d

    def __getitem__(self, v):
        return self.d[v]


@dataclass
class TrailEntry:
    lit: int
    level: int
    reason: tuple[int, ...] | None = None  # full clause containing ``lit``; None = decision


def analyze_conflict(trail: Sequence[TrailEntry], conflict: Sequence[int]):
    """First-UIP clause for a falsified ``conflict`` clause.

    Returns ``(learned_clause, backjump_level)``; the asserting literal comes
    first.  A conflict with no decision behind it returns ``(None, -1)``:
    the formula is unsatisfiable.  PB reasons must already be turned into
    clauses (implied literal plus the negations of the true literals used).
    """
    where = {abs(e.lit): k for k, e in enumerate(trail)}
    lvl = {abs(e.lit): e.level for e in trail}
    cur = max((e.level for e in trail), default=0)
    if cur == 0 or all(lvl[abs(l)] == 0 for l in conflict):
        return None, -1
    seen = set()
    learnt = []
    path = 0
    k = len(trail) - 1
    lits = list(conflict)
    while True:
        for q in lits:
            v = abs(q)
            if v not in seen and lvl[v] > 0:
                seen.add(v)
                if lvl[v] == cur:
                    path += 1
                else:
                    learnt.append(q)
        while abs(trail[k].lit) not in seen:
            k -= 1
        entry = trail[k]
        k -= 1
        path -= 1
        if path == 0:
            break
        lits = [l for l in entry.reason if l != entry.lit]
    clause = [-entry.lit] + sorted(learnt, key=lambda l: (-lvl[abs(l)], where[abs(l)]))
    bt = lvl[abs(clause[1])] if len(clause) > 1 else 0
    return clause, bt
