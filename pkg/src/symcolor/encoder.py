"""Graph coloring as 0-1 ILP, plus OPB / DIMACS CNF text formats.

Variable numbering is fixed so that emitted files are stable:

* ``x[i, j]`` (vertex ``i`` has color ``j``, both 1-based) is ``(i - 1) * K + j``
* ``y[j]`` (color ``j`` is used) is ``n * K + j``

The optimization encoding has exactly ``n*K + K`` variables,
``K * (m + n + 1)`` clauses and ``n`` PB constraints.
"""

from __future__ import annotations

import re

from .formula import EQ, LE, Formula, FormulaError, PbConstraint, normalize_pb
from .graph import Graph


def x_var(i: int, j: int, K: int) -> int:
    return (i - 1) * K + j


def y_var(j: int, n: int, K: int) -> int:
    return n * K + j


def encode_opt(g: Graph, K: int) -> Formula:
    """Minimum-coloring 0-1 ILP with at most ``K`` colors.

    Per vertex an exactly-one PB constraint; per edge and color a conflict
    clause; ``y[j] <-> OR_i x[i, j]`` as ``n*K`` binary clauses plus one long
    clause per color; objective ``min sum_j y[j]``.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    n = g.n
    roles: dict[int, tuple] = {}
    for i in range(1, n + 1):
        for j in range(1, K + 1):
            roles[x_var(i, j, K)] = ("x", i, j)
    for j in range(1, K + 1):
        roles[y_var(j, n, K)] = ("y", j)

    pb = tuple(PbConstraint(tuple((1, x_var(i, j, K)) for j in range(1, K + 1)), EQ, 1)
               for i in range(1, n + 1))
    clauses = []
    for a, b in g.edges:
        for j in range(1, K + 1):
            clauses.append((-x_var(a + 1, j, K), -x_var(b + 1, j, K)))
    for i in range(1, n + 1):
        for j in range(1, K + 1):
            clauses.append((-x_var(i, j, K), y_var(j, n, K)))
    for j in range(1, K + 1):
        clauses.append((-y_var(j, n, K),) + tuple(x_var(i, j, K) for i in range(1, n + 1)))
    objective = tuple((1, y_var(j, n, K)) for j in range(1, K + 1))
    return Formula(n * K + K, tuple(clauses), pb, objective, roles,
                   comments=(f"graph coloring: {g.name or 'graph'} n={n} m={g.m} K={K}",))


def encode_decision_cnf(g: Graph, K: int) -> Formula:
    """Pure CNF for "is ``g`` K-colorable?".

    Only at-least-one clauses per vertex; a vertex that ends up with several
    colors still yields a proper coloring by keeping any one of them.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    n = g.n
    roles = {x_var(i, j, K): ("x", i, j) for i in range(1, n + 1) for j in range(1, K + 1)}
    clauses = [tuple(x_var(i, j, K) for j in range(1, K + 1)) for i in range(1, n + 1)]
    for a, b in g.edges:
        for j in range(1, K + 1):
            clauses.append((-x_var(a + 1, j, K), -x_var(b + 1, j, K)))
    return Formula(n * K, tuple(clauses), (), None, roles,
                   comments=(f"{K}-coloring: {g.name or 'graph'} n={n} m={g.m}",))


def decode_coloring(f: Formula, model) -> dict[int, int]:
    """``{vertex: color}`` (1-based) read off the ``x`` variables of a model."""
    out = {}
    for v, role in f.var_roles.items():
        if role[0] == "x" and model[v]:
            out.setdefault(role[1], role[2])
    return out


# --- OPB ---------------------------------------------------------------------

def _fmt_lit(lit: int) -> str:
    return f"x{lit}" if lit > 0 else f"~x{-lit}"


def _fmt_terms(terms) -> str:
    return " ".join(f"{a:+d} {_fmt_lit(lit)}" for a, lit in terms)


def emit_opb(f: Formula) -> str:
    """Pseudo-Boolean competition style text.

    Clauses become ``>= 1`` constraints.  Normalized ``<=`` constraints are
    written as ``>=`` with negated coefficients, since OPB has no ``<=``.
    """
    lines = [f"* #variable= {f.num_vars} #constraint= {len(f.clauses) + len(f.pb_constraints)}"]
    lines.extend(f"* {c}" for c in f.comments)
    if f.objective:
        lines.append(f"min: {_fmt_terms(f.objective)} ;")
    for p in f.pb_constraints:
        if p.relation == EQ:
            lines.append(f"{_fmt_terms(p.terms)} = {p.bound} ;")
        else:
            lines.append(f"{_fmt_terms((-a, l) for a, l in p.terms)} >= {-p.bound} ;")
    for c in f.clauses:
        lines.append(f"{_fmt_terms((1, l) for l in c)} >= 1 ;")
    return "\n".join(lines) + "\n"


_TERM = re.compile(r"^([+-]?\d+)$")
_VAR = re.compile(r"^(~?)x(\d+)$")


class OpbError(FormulaError):
    pass


def _parse_terms(tokens, lineno):
    if len(tokens) % 2:
        raise OpbError(f"line {lineno}: dangling token in {' '.join(tokens)!r}")
    terms = []
    for k in range(0, len(tokens), 2):
        mc, mv = _TERM.match(tokens[k]), _VAR.match(tokens[k + 1])
        if not mc or not mv:
            raise OpbError(f"line {lineno}: bad term {tokens[k]!r} {tokens[k + 1]!r}")
        v = int(mv.group(2))
        if v == 0:
            raise OpbError(f"line {lineno}: variable x0")
        terms.append((int(mc.group(1)), -v if mv.group(1) else v))
    return terms


def parse_opb(text: str | bytes) -> Formula:
    """Read OPB text back into a :class:`Formula`.

    A ``>= 1`` constraint whose coefficients are all ``+1`` is read as a clause,
    everything else is normalized into a PB constraint.  Comment lines other
    than the size header are kept.
    """
    if isinstance(text, bytes):
        text = text.decode("ascii")
    num_vars = None
    comments = []
    objective = None
    clauses = []
    pbs = []
    max_var = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("*"):
            m = re.match(r"^\*\s*#variable=\s*(\d+)\s+#constraint=\s*(\d+)", line)
            if m and num_vars is None:
                num_vars = int(m.group(1))
            else:
                comments.append(raw[2:] if raw.startswith("* ") else raw[1:])
            continue
        if not line.endswith(";"):
            raise OpbError(f"line {lineno}: missing ';'")
        body = line[:-1].split()
        if body and body[0] == "min:":
            if objective is not None:
                raise OpbError(f"line {lineno}: second objective")
            objective = tuple(_parse_terms(body[1:], lineno))
            for a, lit in objective:
                if a <= 0:
                    raise OpbError(f"line {lineno}: objective coefficients must be positive")
                max_var = max(max_var, abs(lit))
            continue
        if len(body) < 2 or body[-2] not in (">=", "=", "<="):
            raise OpbError(f"line {lineno}: expected '<terms> >= <int> ;'")
        try:
            rhs = int(body[-1])
        except ValueError:
            raise OpbError(f"line {lineno}: bad right-hand side {body[-1]!r}") from None
        terms = _parse_terms(body[:-2], lineno)
        if not terms:
            raise OpbError(f"line {lineno}: empty constraint")
        for _, lit in terms:
            max_var = max(max_var, abs(lit))
        rel = body[-2]
        if rel == ">=" and rhs == 1 and all(a == 1 for a, _ in terms):
            clauses.append(tuple(lit for _, lit in terms))
        else:
            pbs.append(normalize_pb(terms, rel, rhs))
    if num_vars is None:
        num_vars = max_var
    f = Formula(num_vars, tuple(clauses), tuple(pbs), objective, {}, tuple(comments))
    return f.validate()


def emit_dimacs_cnf(f: Formula) -> str:
    if f.pb_constraints:
        raise FormulaError("DIMACS CNF cannot carry PB constraints; use OPB")
    lines = [f"c {c}" for c in f.comments]
    lines.append(f"p cnf {f.num_vars} {len(f.clauses)}")
    lines.extend(" ".join(map(str, c)) + " 0" for c in f.clauses)
    return "\n".join(lines) + "\n"
