"""Per-generator lex-leader symmetry-breaking clauses.

For a generator ``g`` with support ``v1 < v2 < ... < vs`` (by variable id)
the clauses force ``assignment <= assignment o g`` lexicographically.  A
chain of prefix variables ``p[t]`` means "``v1..vt`` agree with their
images"; ``p[0]`` is true by a unit clause.
"""

from __future__ import annotations

from typing import Sequence

from ..formula import Formula, constraint_multiset, is_formula_symmetry, make_clause
from .perm import PermGenerator


class NotASymmetry(ValueError):
    pass


def lex_leader_clauses(g: PermGenerator, p0: int) -> tuple[list[tuple[int, ...]], int]:
    """Clauses for one generator; prefix variables are ``p0, p0+1, ...``.

    Returns ``(clauses, number_of_prefix_vars)``.  The prefix variable after
    the last position is never read, so it is not created.
    """
    support = g.support()
    s = len(support)
    if s == 0:
        return [], 0
    cl = [(p0,)]
    for t, v in enumerate(support, 1):
        prev = p0 + t - 1
        img = g(v)
        cl.append(make_clause((-prev, -v, img)))
        if t == s:
            break
        cur = p0 + t
        # cur <-> prev & (v <-> img)
        cl.append(make_clause((-cur, prev)))
        cl.append(make_clause((-cur, -v, img)))
        cl.append(make_clause((-cur, v, -img)))
        cl.append(make_clause((-prev, v, img, cur)))
        cl.append(make_clause((-prev, -v, -img, cur)))
    return [c for c in cl if c is not None], s


def lex_leader_sbp(gens: Sequence[PermGenerator], f: Formula) -> Formula:
    """Append lex-leader clauses for every generator to ``f``.

    Each generator must be a symmetry of ``f``; otherwise :class:`NotASymmetry`.
    """
    ref = constraint_multiset(f)
    clauses = []
    roles = {}
    nxt = f.num_vars + 1
    for k, g in enumerate(gens):
        if not g:
            continue
        if any(abs(l) > f.num_vars for l in g.mapping):
            raise NotASymmetry(f"generator {k} moves variables outside 1..{f.num_vars}")
        if not is_formula_symmetry(f, g.mapping, ref):
            raise NotASymmetry(f"generator {k} does not map the formula to itself: {g.format()}")
        cl, used = lex_leader_clauses(g, nxt)
        for t in range(used):
            roles[nxt + t] = ("lexpre", k, t)
        clauses.extend(cl)
        nxt += used
    if not clauses:
        return f
    return f.extend(new_vars=nxt - f.num_vars - 1, clauses=clauses, roles=roles,
                    comment=f"lex-leader: {sum(1 for g in gens if g)} generator(s)")
