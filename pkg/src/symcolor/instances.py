"""Benchmark instance names, known chromatic numbers and local generation.

Only the ``myciel`` and ``queen`` families can be rebuilt from their
definitions; the other DIMACS graphs must be supplied as ``.col`` files
(see :func:`locate`).
"""

from __future__ import annotations

import os
from pathlib import Path

from .graph import Graph, mycielski_graph, queen_graph, read_col

# chromatic numbers (None: above the K = 20 bound)
CHROMATIC = {
    "anna": 11, "david": 11, "DSJC125.1": 5, "DSJC125.9": None, "games120": 9,
    "huck": 11, "jean": 10, "miles250": 8, "mulsol.i.2": None, "mulsol.i.4": None,
    "myciel3": 4, "myciel4": 5, "myciel5": 6, "queen5_5": 5, "queen6_6": 7,
    "queen7_7": 7, "queen8_12": 12, "zeroin.i.1": None, "zeroin.i.2": None,
    "zeroin.i.3": None,
}

# (vertices, edges as declared in the DIMACS header)
SIZES = {
    "anna": (138, 986), "david": (87, 812), "DSJC125.1": (125, 1472),
    "DSJC125.9": (125, 13922), "games120": (120, 1276), "huck": (74, 602),
    "jean": (80, 508), "miles250": (128, 774), "mulsol.i.2": (188, 3885),
    "mulsol.i.4": (185, 3946), "myciel3": (11, 20), "myciel4": (23, 71),
    "myciel5": (47, 236), "queen5_5": (25, 320), "queen6_6": (36, 580),
    "queen7_7": (49, 952), "queen8_12": (96, 2736), "zeroin.i.1": (211, 4100),
    "zeroin.i.2": (211, 3541), "zeroin.i.3": (206, 3540),
}

SUITE = tuple(SIZES)

GENERATORS = {
    "myciel3": lambda: mycielski_graph(3),
    "myciel4": lambda: mycielski_graph(4),
    "myciel5": lambda: mycielski_graph(5),
    "queen5_5": lambda: queen_graph(5, 5),
    "queen6_6": lambda: queen_graph(6, 6),
    "queen7_7": lambda: queen_graph(7, 7),
    "queen8_12": lambda: queen_graph(8, 12),
}

ENV_DIR = "SYMCOLOR_BENCH_DIR"


def generated_col_text(name: str) -> str:
    """DIMACS text for a generated instance, in the published files' style.

    The published queen files list every edge in both directions, so their
    headers count each edge twice; this keeps that convention.
    """
    g = GENERATORS[name]()
    both = name.startswith("queen")
    lines = [f"c {name} (generated from its definition)"]
    lines.append(f"p edge {g.n} {2 * g.m if both else g.m}")
    for u, v in g.edges:
        lines.append(f"e {u + 1} {v + 1}")
        if both:
            lines.append(f"e {v + 1} {u + 1}")
    return "\n".join(lines) + "\n"


def write_generated(directory) -> list[Path]:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    out = []
    for name in GENERATORS:
        p = d / f"{name}.col"
        p.write_text(generated_col_text(name))
        out.append(p)
    return out


def search_dirs(extra=()) -> list[Path]:
    dirs = [Path(x) for x in extra]
    if os.environ.get(ENV_DIR):
        dirs.append(Path(os.environ[ENV_DIR]))
    dirs.append(Path(__file__).resolve().parents[2] / "benchmarks")
    return dirs


def locate(name: str, extra_dirs=()) -> Path | None:
    for d in search_dirs(extra_dirs):
        p = d / f"{name}.col"
        if p.is_file():
            return p
    return None


def load(name: str, extra_dirs=(), generate: bool = True) -> Graph | None:
    """File from the search path, else the generated graph, else None."""
    p = locate(name, extra_dirs)
    if p is not None:
        return read_col(p)
    if generate and name in GENERATORS:
        return GENERATORS[name]()
    return None
