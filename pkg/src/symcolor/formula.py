"""0-1 ILP instances: CNF clauses, normalized PB constraints, linear objective.

Literals are signed DIMACS integers: ``v`` is variable ``v`` and ``-v`` its
complement.  Variables are numbered ``1..num_vars``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

Clause = tuple[int, ...]
Term = tuple[int, int]  # (coefficient, literal)

LE = "<="
EQ = "="


class FormulaError(ValueError):
    pass


@dataclass(frozen=True)
class PbConstraint:
    """``sum(coef * lit) <relation> bound`` with every coefficient positive."""

    terms: tuple[Term, ...]
    relation: str
    bound: int

    def __post_init__(self):
        if self.relation not in (LE, EQ):
            raise FormulaError(f"relation must be '<=' or '=', got {self.relation!r}")
        seen = set()
        for a, lit in self.terms:
            if a <= 0:
                raise FormulaError("PB coefficients must be positive (normalized form)")
            if abs(lit) in seen:
                raise FormulaError(f"variable {abs(lit)} occurs twice in PB constraint")
            seen.add(abs(lit))

    def lhs(self, value) -> int:
        return sum(a for a, lit in self.terms if lit_true(lit, value))

    def satisfied(self, value) -> bool:
        s = self.lhs(value)
        return s <= self.bound if self.relation == LE else s == self.bound

    def signature(self) -> tuple:
        return (tuple(sorted(a for a, _ in self.terms)), self.relation, self.bound)


def lit_true(lit: int, value) -> bool:
    return bool(value[lit]) if lit > 0 else not value[-lit]


def make_clause(lits: Iterable[int]) -> Clause | None:
    """Drop duplicate literals (first occurrence wins); None for a tautology."""
    out: list[int] = []
    seen = set()
    for lit in lits:
        if -lit in seen:
            return None
        if lit not in seen:
            seen.add(lit)
            out.append(lit)
    if not out:
        raise FormulaError("empty clause")
    return tuple(out)


def normalize_pb(terms: Iterable[Term], relation: str, bound: int) -> PbConstraint:
    """Rewrite an arbitrary linear constraint over literals into normalized form.

    ``>=`` is flipped to ``<=`` by negation; every negative coefficient is
    moved onto the complementary literal using ``~x = 1 - x``.  Repeated
    variables are merged.  Variable order follows first appearance.
    """
    if relation == ">=":
        terms = [(-a, lit) for a, lit in terms]
        bound = -bound
        relation = LE
    elif relation not in (LE, EQ):
        raise FormulaError(f"unknown relation {relation!r}")
    coef: dict[int, int] = {}
    for a, lit in terms:
        v = abs(lit)
        coef.setdefault(v, 0)
        if lit > 0:
            coef[v] += a
        else:
            coef[v] -= a
            bound -= a
    out = []
    for v, c in coef.items():
        if c > 0:
            out.append((c, v))
        elif c < 0:
            out.append((-c, -v))
            bound -= c
    return PbConstraint(tuple(out), relation, bound)


@dataclass(frozen=True)
class Formula:
    num_vars: int
    clauses: tuple[Clause, ...] = ()
    pb_constraints: tuple[PbConstraint, ...] = ()
    objective: tuple[Term, ...] | None = None
    var_roles: Mapping[int, tuple] = field(default_factory=dict, compare=False)
    comments: tuple[str, ...] = field(default=(), compare=False)

    def validate(self):
        n = self.num_vars
        for c in self.clauses:
            if not c:
                raise FormulaError("empty clause")
            for lit in c:
                if lit == 0 or abs(lit) > n:
                    raise FormulaError(f"literal {lit} outside 1..{n}")
        for p in self.pb_constraints:
            for _, lit in p.terms:
                if lit == 0 or abs(lit) > n:
                    raise FormulaError(f"literal {lit} outside 1..{n}")
        for _, lit in self.objective or ():
            if lit == 0 or abs(lit) > n:
                raise FormulaError(f"objective literal {lit} outside 1..{n}")
        return self

    def extend(self, *, new_vars: int = 0, clauses: Sequence[Clause] = (),
               pb: Sequence[PbConstraint] = (), roles: Mapping[int, tuple] | None = None,
               comment: str | None = None) -> "Formula":
        """New formula with extra variables/constraints appended after the old ones."""
        merged = dict(self.var_roles)
        if roles:
            merged.update(roles)
        return replace(
            self,
            num_vars=self.num_vars + new_vars,
            clauses=self.clauses + tuple(clauses),
            pb_constraints=self.pb_constraints + tuple(pb),
            var_roles=merged,
            comments=self.comments + ((comment,) if comment else ()),
        )

    # --- lookup helpers ----------------------------------------------------

    def vars_with_role(self, tag: str) -> dict[tuple, int]:
        """Map role arguments to variable ids, e.g. ``{(i, j): var}`` for tag ``"x"``."""
        return {r[1:]: v for v, r in self.var_roles.items() if r[0] == tag}

    def objective_value(self, value) -> int | None:
        if self.objective is None:
            return None
        return sum(a for a, lit in self.objective if lit_true(lit, value))

    def violations(self, value) -> list[str]:
        """Human-readable list of constraints the 0/1 vector ``value`` breaks."""
        bad = []
        for i, c in enumerate(self.clauses):
            if not any(lit_true(lit, value) for lit in c):
                bad.append(f"clause {i}: {c}")
        for i, p in enumerate(self.pb_constraints):
            if not p.satisfied(value):
                bad.append(f"pb {i}: lhs={p.lhs(value)} {p.relation} {p.bound}")
        return bad


# --- syntactic symmetry check -------------------------------------------------

def constraint_multiset(f: Formula):
    """Order-free view of a formula used to test literal permutations."""
    clauses = Counter(frozenset(c) for c in f.clauses)
    pbs = Counter((frozenset(p.terms), p.relation, p.bound) for p in f.pb_constraints)
    obj = Counter(f.objective) if f.objective is not None else None
    return clauses, pbs, obj


def permute_formula_multiset(f: Formula, perm: Mapping[int, int]):
    """Image of :func:`constraint_multiset` under a literal map (identity where absent)."""
    g = perm.get
    clauses = Counter(frozenset(g(l, l) for l in c) for c in f.clauses)
    pbs = Counter((frozenset((a, g(l, l)) for a, l in p.terms), p.relation, p.bound)
                  for p in f.pb_constraints)
    obj = Counter((a, g(l, l)) for a, l in f.objective) if f.objective is not None else None
    return clauses, pbs, obj


def is_formula_symmetry(f: Formula, perm: Mapping[int, int], reference=None) -> bool:
    ref = reference if reference is not None else constraint_multiset(f)
    return permute_formula_multiset(f, perm) == ref
