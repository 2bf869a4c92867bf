"""Literal permutations, cycle notation and group order."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from sympy.combinatorics import Permutation, PermutationGroup


class PermError(ValueError):
    pass


def _fmt(lit: int) -> str:
    return f"x{lit}" if lit > 0 else f"~x{-lit}"


@dataclass(frozen=True)
class PermGenerator:
    """Permutation of literals, stored on its moved literals only.

    Always Boolean-consistent: ``p(~l) == ~p(l)``.
    """

    mapping: Mapping[int, int] = field(hash=False)

    def __post_init__(self):
        m = {a: b for a, b in self.mapping.items() if a != b}
        if sorted(m) != sorted(m.values()):
            raise PermError("mapping is not a bijection on its moved literals")
        for a, b in m.items():
            if m.get(-a, -a) != -b:
                raise PermError(f"not Boolean-consistent at literal {a}")
        object.__setattr__(self, "mapping", m)

    def __call__(self, lit: int) -> int:
        return self.mapping.get(lit, lit)

    def __bool__(self):
        return bool(self.mapping)

    def __eq__(self, other):
        return isinstance(other, PermGenerator) and self.mapping == other.mapping

    def __hash__(self):
        return hash(frozenset(self.mapping.items()))

    def support(self) -> list[int]:
        """Moved variables, ascending."""
        return sorted({abs(l) for l in self.mapping})

    def cycles(self) -> list[tuple[int, ...]]:
        done = set()
        out = []
        for start in sorted(self.mapping, key=lambda l: (abs(l), l < 0)):
            if start in done:
                continue
            cyc = [start]
            done.add(start)
            nxt = self.mapping[start]
            while nxt != start:
                cyc.append(nxt)
                done.add(nxt)
                nxt = self.mapping[nxt]
            out.append(tuple(cyc))
        return out

    def format(self) -> str:
        """Cycle notation with one cycle of each mirrored pair, e.g. ``(x3 x7)(x4 x8)``."""
        shown = set()
        parts = []
        for cyc in self.cycles():
            if cyc[0] in shown:
                continue
            shown.update(cyc)
            shown.update(-l for l in cyc)
            parts.append("(" + " ".join(_fmt(l) for l in cyc) + ")")
        return "".join(parts)

    __str__ = format

    @classmethod
    def parse(cls, text: str) -> "PermGenerator":
        m: dict[int, int] = {}
        body = text.strip()
        if body in ("", "()"):
            return cls({})
        if not re.fullmatch(r"(\(\s*[~x0-9\s]+\))+", body.replace(" ", " ")):
            raise PermError(f"bad cycle notation: {text!r}")
        for grp in re.findall(r"\(([^)]*)\)", body):
            lits = []
            for tok in grp.split():
                mt = re.fullmatch(r"(~?)x(\d+)", tok)
                if not mt or int(mt.group(2)) == 0:
                    raise PermError(f"bad literal {tok!r}")
                v = int(mt.group(2))
                lits.append(-v if mt.group(1) else v)
            for a, b in zip(lits, lits[1:] + lits[:1]):
                for src, dst in ((a, b), (-a, -b)):
                    if m.get(src, dst) != dst:
                        raise PermError(f"literal {_fmt(src)} mapped twice")
                    m[src] = dst
        return cls(m)

    def inverse(self) -> "PermGenerator":
        return PermGenerator({b: a for a, b in self.mapping.items()})


def format_generators(gens: Iterable[PermGenerator]) -> str:
    return "".join(g.format() + "\n" for g in gens)


def parse_generators(text: str) -> list[PermGenerator]:
    return [PermGenerator.parse(line) for line in text.splitlines() if line.strip()]


# --- group order ------------------------------------------------------------
# sympy builds a base and strong generating set with deterministic
# Schreier-Sims; the order is the product of the basic transversal sizes.

def group_order(gens: Sequence[PermGenerator]) -> int:
    """Exact order of the group generated by ``gens`` (1 for the empty list)."""
    gens = [g for g in gens if g]
    if not gens:
        return 1
    points = sorted({l for g in gens for l in g.mapping}, key=lambda l: (abs(l), l < 0))
    idx = {l: i for i, l in enumerate(points)}
    return permutation_group_order([[idx[g(l)] for l in points] for g in gens])


def permutation_group_order(perms: Sequence[Sequence[int]]) -> int:
    """Same, for permutations of ``0..d-1`` given as image lists."""
    perms = [list(p) for p in perms if any(x != i for i, x in enumerate(p))]
    if not perms:
        return 1
    return int(PermutationGroup([Permutation(p) for p in perms]).order())
