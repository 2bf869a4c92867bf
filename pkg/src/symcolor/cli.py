"""Command line: encode, sbp, detect-sym, solve, bench."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .encoder import decode_coloring, emit_dimacs_cnf, emit_opb, encode_decision_cnf, encode_opt, parse_opb
from .formula import Formula, FormulaError
from .graph import DimacsError, Graph, read_col
from .harness import DEFAULT_K, choose_k, report, run_grid
from .instances import write_generated
from .sbp import GRID_CONFIGS, SbpConfig, apply_sbps
from .solver import DEFAULT_TIMEOUT, Budget, decide, minimize
from .symmetry import GroupSummary, circular_chains, find_generators, format_generators, lex_leader_sbp

log = logging.getLogger("symcolor")


class SetupError(Exception):
    pass


def _k_arg(text):
    if text == "auto":
        return None
    k = int(text)
    if k < 1:
        raise argparse.ArgumentTypeError("K must be positive")
    return k


def _graph(path) -> Graph:
    try:
        return read_col(path)
    except OSError as e:
        raise SetupError(f"cannot read {path}: {e}") from e
    except DimacsError as e:
        raise SetupError(f"{path}: {e}") from e


def _build(args) -> tuple[Formula, Graph | None]:
    """Formula from a ``.col`` graph (encoded, SBPs applied) or an ``.opb`` file."""
    path = Path(args.input)
    if path.suffix == ".opb":
        try:
            f = parse_opb(path.read_text())
        except OSError as e:
            raise SetupError(f"cannot read {path}: {e}") from e
        except FormulaError as e:
            raise SetupError(f"{path}: {e}") from e
        if SbpConfig.parse(getattr(args, "sbp", "")).flags:
            raise SetupError("--sbp needs a graph input (.col), not an encoded formula")
        return f, None
    g = _graph(path)
    K = args.k if args.k is not None else choose_k(g)
    f = encode_opt(g, K)
    f = apply_sbps(f, g, K, SbpConfig.parse(getattr(args, "sbp", "")))
    return f, g


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _add_inst_dep(f: Formula, args):
    gens = find_generators(f, time_budget=args.detect_timeout)
    if args.emit_generators:
        Path(args.emit_generators).write_text(format_generators(gens))
    s = GroupSummary.of(gens)
    log.info("%d generator(s), group order %d, %.2fs%s", s.num_generators, s.group_order,
             s.detection_time, " (capped)" if s.capped else "")
    return lex_leader_sbp(gens, f)


def cmd_encode(args):
    g = _graph(args.input)
    K = args.k if args.k is not None else choose_k(g)
    if args.decision:
        f = encode_decision_cnf(g, K)
        _write(emit_opb(f) if args.format == "opb" else emit_dimacs_cnf(f), args.out)
    else:
        if args.format == "cnf":
            raise SetupError("the optimization encoding has PB constraints; use --format opb")
        _write(emit_opb(encode_opt(g, K)), args.out)
    return 0


def cmd_sbp(args):
    f, _ = _build(args)
    if args.inst_dep:
        f = _add_inst_dep(f, args)
    _write(emit_opb(f), args.out)
    return 0


def cmd_detect(args):
    f, _ = _build(args)
    chains = circular_chains(f)
    gens = find_generators(f, time_budget=args.detect_timeout)
    s = GroupSummary.of(gens)
    if args.emit_generators:
        Path(args.emit_generators).write_text(format_generators(gens))
    info = {"num_generators": s.num_generators, "group_order": str(s.group_order),
            "detection_time": round(s.detection_time, 3), "capped": s.capped,
            "search_nodes": gens.nodes, "spurious_dropped": gens.spurious,
            "circular_chains": len(chains)}
    _write(json.dumps(info, indent=2) + "\n", args.out)
    if not args.emit_generators and args.verbose:
        sys.stderr.write(format_generators(gens))
    return 0


def cmd_solve(args):
    f, g = _build(args)
    if args.inst_dep:
        f = _add_inst_dep(f, args)
    budget = Budget(args.timeout, args.max_conflicts)
    if f.objective is None:
        res = decide(f, budget, seed=args.seed)
    else:
        res = minimize(f, budget, seed=args.seed)
    d = res.to_dict(with_model=args.model)
    if g is not None and res.model is not None:
        d["coloring"] = {str(v): c for v, c in sorted(decode_coloring(f, res.model).items())}
    _write(json.dumps(d, indent=2) + "\n", args.out)
    return 0


def cmd_bench(args):
    paths = []
    for item in args.instances:
        p = Path(item)
        if p.is_dir():
            paths.extend(sorted(p.glob("*.col")))
        elif p.is_file():
            paths.append(p)
        else:
            raise SetupError(f"no such instance file or directory: {item}")
    if not paths:
        raise SetupError("no .col instances given")
    configs = [SbpConfig.parse(c) for c in args.configs] if args.configs else list(GRID_CONFIGS)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "results.csv"

    def progress(rec):
        log.info("%s %s inst-dep=%s: %s %s (%.1fs)", rec.instance, rec.sbp_config,
                 "yes" if rec.instance_dependent else "no", rec.solve_status,
                 rec.best_value, rec.solve_time)

    recs = run_grid(paths, configs, args.inst_dep, args.k, Budget(args.timeout, args.max_conflicts),
                    seed=args.seed, out_csv=csv_path,
                    keep_encodings=out / "encodings" if args.keep_encodings else None,
                    emit_generators=out / "generators" if args.emit_generators else None,
                    jobs=args.jobs, progress=progress)
    _, md = report(recs, args.timeout)
    (out / "summary.md").write_text(md)
    sys.stdout.write(md)
    return 0


def cmd_gen(args):
    for p in write_generated(args.dir):
        print(p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="symcolor", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p, graph_only=False, sbp=True):
        p.add_argument("input", help=".col graph" + ("" if graph_only else " or .opb formula"))
        p.add_argument("--k", type=_k_arg, default=DEFAULT_K,
                       help="color bound, or 'auto' for the DSATUR bound (default 20)")
        if sbp:
            p.add_argument("--sbp", default="", help="instance-independent SBPs, e.g. nu,sc")
        p.add_argument("--out", default=None, help="output file (default stdout)")

    def symm(p):
        p.add_argument("--emit-generators", metavar="PATH", help="write generators in cycle notation")
        p.add_argument("--detect-timeout", type=float, default=None)

    p = sub.add_parser("encode", help="graph -> OPB (or DIMACS CNF for --decision)")
    common(p, graph_only=True, sbp=False)
    p.add_argument("--decision", action="store_true", help="pure CNF K-colorability")
    p.add_argument("--format", choices=("opb", "cnf"), default="opb")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("sbp", help="encode and add symmetry-breaking predicates")
    common(p)
    p.add_argument("--inst-dep", action="store_true", help="add lex-leader SBPs from detected symmetries")
    symm(p)
    p.set_defaults(func=cmd_sbp)

    p = sub.add_parser("detect-sym", help="symmetry generators and group order")
    common(p)
    symm(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("solve", help="minimize colors (or decide an objective-free formula)")
    common(p)
    p.add_argument("--inst-dep", action="store_true")
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT)
    p.add_argument("--max-conflicts", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model", action="store_true", help="include the full model in the JSON")
    symm(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run the SBP grid and write results.csv + summary.md")
    p.add_argument("instances", nargs="+", help=".col files or directories")
    p.add_argument("--configs", nargs="*", default=None,
                   help="SBP configs (default: none NU CA LI SC NU+SC)")
    p.add_argument("--inst-dep", choices=("yes", "no", "both"), default="both")
    p.add_argument("--k", type=_k_arg, default=DEFAULT_K, help="color bound (30 for the wider rerun)")
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT)
    p.add_argument("--max-conflicts", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="results")
    p.add_argument("--keep-encodings", action="store_true")
    p.add_argument("--emit-generators", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen-instances", help="write the generated myciel/queen .col files")
    p.add_argument("dir")
    p.set_defaults(func=cmd_gen)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except SetupError as e:
        print(f"symcolor: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
