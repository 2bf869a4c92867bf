"""Experiment driver: bound selection, the SBP grid, CSV and Markdown reports."""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .encoder import emit_opb, encode_opt
from .graph import Graph, read_col
from .sbp import GRID_CONFIGS, SbpConfig, apply_sbps
from .solver import OPTIMAL, Budget, minimize
from .symmetry import GroupSummary, find_generators, format_generators, lex_leader_sbp

log = logging.getLogger(__name__)

DEFAULT_K = 20
TIME_COLUMNS = ("detect_time", "solve_time")


def dsatur(g: Graph) -> list[int]:
    """Greedy coloring by saturation degree; 0-based colors per vertex.

    Ties on saturation go to the higher degree in the uncolored subgraph,
    then to the lower vertex index.
    """
    n = g.n
    color = [-1] * n
    sat: list[set[int]] = [set() for _ in range(n)]
    deg = [len(a) for a in g.adjacency]
    for _ in range(n):
        v = max((u for u in range(n) if color[u] < 0), key=lambda u: (len(sat[u]), deg[u], -u))
        c = 0
        while c in sat[v]:
            c += 1
        color[v] = c
        for w in g.adjacency[v]:
            sat[w].add(c)
            if color[w] < 0:
                deg[w] -= 1
    return color


def choose_k(g: Graph, cap: int = DEFAULT_K) -> int:
    """``min(DSATUR color count, cap)``.

    With ``cap`` below the chromatic number the result is infeasible by
    construction; the caller asked for it.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    if g.n == 0:
        return 1
    return min(max(dsatur(g)) + 1, cap)


@dataclass
class BenchRecord:
    instance: str
    n: int
    m: int
    K: int
    sbp_config: str
    instance_dependent: bool
    num_vars: int = 0
    num_clauses: int = 0
    num_pb: int = 0
    num_generators: int = 0
    group_order: int = 1
    detect_time: float = 0.0
    solve_status: str = ""
    best_value: int | None = None
    solve_time: float = 0.0
    error: str = ""

    def row(self) -> dict:
        d = asdict(self)
        d["instance_dependent"] = "yes" if self.instance_dependent else "no"
        d["best_value"] = "" if self.best_value is None else self.best_value
        d["detect_time"] = f"{self.detect_time:.3f}"
        d["solve_time"] = f"{self.solve_time:.3f}"
        return d


FIELDS = [f.name for f in fields(BenchRecord)]


def _instance_name(path) -> str:
    return Path(path).stem


@dataclass
class _Cell:
    path: str
    config: SbpConfig
    inst_dep: bool
    K: int | None
    timeout: float | None
    max_conflicts: int | None
    seed: int
    keep_dir: str | None
    gens_dir: str | None


def run_cell(cell: _Cell, graph: Graph | None = None) -> BenchRecord:
    """Parse, encode, add SBPs, optionally detect and break symmetries, solve."""
    name = _instance_name(cell.path)
    rec = BenchRecord(name, 0, 0, cell.K or 0, cell.config.name, cell.inst_dep)
    try:
        g = graph if graph is not None else read_col(cell.path)
        rec.n, rec.m = g.n, g.m
        K = cell.K if cell.K is not None else choose_k(g)
        rec.K = K
        f = apply_sbps(encode_opt(g, K), g, K, cell.config)
        tag = f"{name}.{cell.config.name.replace('+', '_')}.{'dep' if cell.inst_dep else 'nodep'}"
        if cell.inst_dep:
            gens = find_generators(f)
            summary = GroupSummary.of(gens)
            rec.num_generators = summary.num_generators
            rec.group_order = summary.group_order
            rec.detect_time = summary.detection_time
            if gens.capped:
                log.warning("%s: symmetry search capped after %d nodes", tag, gens.nodes)
            if cell.gens_dir:
                Path(cell.gens_dir, tag + ".gens").write_text(format_generators(gens))
            f = lex_leader_sbp(gens, f)
        rec.num_vars = f.num_vars
        rec.num_clauses = len(f.clauses)
        rec.num_pb = len(f.pb_constraints)
        if cell.keep_dir:
            Path(cell.keep_dir, tag + ".opb").write_text(emit_opb(f))
        res = minimize(f, Budget(cell.timeout, cell.max_conflicts), seed=cell.seed)
        rec.solve_status = res.status
        rec.best_value = res.best_value
        rec.solve_time = res.stats.get("elapsed", 0.0)
    except Exception as e:  # one bad cell must not stop the grid
        log.exception("cell %s / %s failed", name, cell.config.name)
        rec.solve_status = "ERROR"
        rec.error = f"{type(e).__name__}: {e}"
    return rec


def _run_cell_star(cell):
    return run_cell(cell)


def grid_cells(instances: Sequence, configs: Sequence[SbpConfig], with_instance_dep: str,
               K: int | None, budget: Budget, seed: int,
               keep_dir=None, gens_dir=None) -> list[_Cell]:
    flags = {"no": (False,), "yes": (True,), "both": (False, True)}.get(with_instance_dep)
    if flags is None:
        raise ValueError("with_instance_dep must be 'yes', 'no' or 'both'")
    return [_Cell(str(p), c, d, K, budget.timeout, budget.max_conflicts, seed,
                  str(keep_dir) if keep_dir else None, str(gens_dir) if gens_dir else None)
            for p in instances for c in configs for d in flags]


class CsvAppender:
    """Single writer; every record is flushed as soon as it is added."""

    def __init__(self, path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = self.path.open("w", newline="")
        self._w = csv.DictWriter(self._fh, fieldnames=FIELDS)
        self._w.writeheader()
        self._fh.flush()

    def add(self, rec: BenchRecord):
        self._w.writerow(rec.row())
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def run_grid(instances: Sequence, configs: Sequence[SbpConfig] = GRID_CONFIGS,
             with_instance_dep: str = "both", K: int | None = DEFAULT_K,
             budget: Budget | None = None, seed: int = 0, out_csv=None,
             keep_encodings=None, emit_generators=None, jobs: int = 1,
             progress: Callable[[BenchRecord], None] | None = None) -> list[BenchRecord]:
    """One record per (instance, config, instance-dependent flag), in that order.

    ``K=None`` picks the bound per instance with :func:`choose_k`.  Records
    are appended to ``out_csv`` as they complete, in grid order.
    """
    budget = budget or Budget()
    for d in (keep_encodings, emit_generators):
        if d:
            Path(d).mkdir(parents=True, exist_ok=True)
    cells = grid_cells(instances, configs, with_instance_dep, K, budget, seed,
                       keep_encodings, emit_generators)
    out = []
    app = CsvAppender(out_csv) if out_csv else None
    try:
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as ex:
                results: Iterable[BenchRecord] = ex.map(_run_cell_star, cells)
                for rec in results:
                    out.append(rec)
                    if app:
                        app.add(rec)
                    if progress:
                        progress(rec)
        else:
            graphs: dict[str, Graph | None] = {}
            for cell in cells:
                if cell.path not in graphs:
                    try:
                        graphs[cell.path] = read_col(cell.path)
                    except Exception:
                        graphs[cell.path] = None  # run_cell records the error
                rec = run_cell(cell, graphs[cell.path])
                out.append(rec)
                if app:
                    app.add(rec)
                if progress:
                    progress(rec)
    finally:
        if app:
            app.close()
    return out


def records_csv(records: Sequence[BenchRecord], drop_time: bool = False) -> str:
    cols = [c for c in FIELDS if not (drop_time and c in TIME_COLUMNS)]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def summarize(records: Sequence[BenchRecord], timeout: float | None = None) -> list[dict]:
    """Per (config, instance-dependent) totals: solved count and summed solve time.

    Unsolved cells contribute the timeout (when given) to the time sum.
    """
    groups: dict[tuple[str, bool], dict] = {}
    for r in records:
        key = (r.sbp_config, r.instance_dependent)
        s = groups.setdefault(key, dict(config=r.sbp_config, instance_dependent=r.instance_dependent,
                                        instances=0, solved=0, time=0.0,
                                        num_vars=0, num_clauses=0, num_pb=0,
                                        num_generators=0, group_order=0, detect_time=0.0))
        s["instances"] += 1
        solved = r.solve_status == OPTIMAL
        s["solved"] += solved
        s["time"] += r.solve_time if solved or timeout is None else max(r.solve_time, timeout)
        for k in ("num_vars", "num_clauses", "num_pb", "num_generators", "group_order",
                  "detect_time"):
            s[k] += getattr(r, k)
    return list(groups.values())


def sci(n: int) -> str:
    """Big integers as ``1.1e+168``; small ones verbatim."""
    if n < 10 ** 6:
        return str(n)
    d = str(n)
    mant = round(int(d[:3]) / 10)
    exp = len(d) - 1
    if mant >= 100:
        mant //= 10
        exp += 1
    return f"{mant // 10}.{mant % 10}e+{exp:02d}"


def _fmt_time(t: float) -> str:
    return f"{t / 1000:.1f}K" if t >= 1000 else f"{t:.1f}"


def report(records: Sequence[BenchRecord], timeout: float | None = None) -> tuple[str, str]:
    """``(csv_text, markdown_text)``; the Markdown has one row per SBP config."""
    csv_text = records_csv(records)
    summ = summarize(records, timeout)
    configs = list(dict.fromkeys(s["config"] for s in summ))
    by = {(s["config"], s["instance_dependent"]): s for s in summ}
    lines = ["| SBP config | no inst-dep: time | solved | with inst-dep: time | solved |",
             "|---|---|---|---|---|"]
    for c in configs:
        cells = []
        for dep in (False, True):
            s = by.get((c, dep))
            cells.extend([_fmt_time(s["time"]), f"{s['solved']}/{s['instances']}"]
                         if s else ["-", "-"])
        lines.append(f"| {c} | " + " | ".join(cells) + " |")
    lines.append("")
    lines.append("| SBP config | inst-dep | #V | #CL | #PB | #G | group order sum | detect time |")
    lines.append("|---|---|---|---|---|---|---|---|")
    for s in summ:
        lines.append(f"| {s['config']} | {'yes' if s['instance_dependent'] else 'no'} | "
                     f"{s['num_vars']} | {s['num_clauses']} | {s['num_pb']} | "
                     f"{s['num_generators']} | {sci(s['group_order'])} | {s['detect_time']:.2f} |")
    if not records:
        lines = ["(no records)"]
    return csv_text, "\n".join(lines) + "\n"


def read_records(path) -> list[BenchRecord]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(BenchRecord(
                row["instance"], int(row["n"]), int(row["m"]), int(row["K"]), row["sbp_config"],
                row["instance_dependent"] == "yes", int(row["num_vars"]), int(row["num_clauses"]),
                int(row["num_pb"]), int(row["num_generators"]), int(row["group_order"]),
                float(row["detect_time"]), row["solve_status"],
                int(row["best_value"]) if row["best_value"] else None,
                float(row["solve_time"]), row.get("error", "")))
    return out
