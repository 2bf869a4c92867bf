import csv
import json
import math

import pytest

from symcolor.cli import main
from symcolor.encoder import parse_opb
from symcolor.graph import Graph, is_proper_coloring, to_dimacs_col
from symcolor.harness import (FIELDS, TIME_COLUMNS, BenchRecord, choose_k, dsatur, read_records,
                              records_csv, report, run_grid, sci, summarize)
from symcolor.instances import CHROMATIC, GENERATORS, SIZES, generated_col_text, locate
from symcolor.sbp import GRID_CONFIGS, SbpConfig, li_clause_count
from symcolor.solver import OPTIMAL, Budget


def clique(n):
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


@pytest.fixture
def small_dir(tmp_path):
    d = tmp_path / "inst"
    d.mkdir()
    (d / "myciel3.col").write_text(generated_col_text("myciel3"))
    (d / "c4.col").write_text(to_dimacs_col(Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])))
    return d


# --- bound selection --------------------------------------------------------

def test_choose_k_examples():
    assert choose_k(clique(5)) == 5
    bip = Graph.from_edges(6, [(a, b) for a in range(3) for b in range(3, 6) if (a + b) % 2])
    assert choose_k(bip) == 2
    assert choose_k(clique(5), cap=3) == 3
    with pytest.raises(ValueError):
        choose_k(clique(3), cap=0)


@pytest.mark.parametrize("name", ["myciel4", "queen6_6", "queen8_12"])
def test_dsatur_is_proper_and_bounded_below(name):
    g = GENERATORS[name]()
    col = dsatur(g)
    assert is_proper_coloring(g, col)
    assert max(col) + 1 >= CHROMATIC[name]


# --- grid -------------------------------------------------------------------

def test_grid_shape_and_sizes(small_dir, tmp_path):
    paths = sorted(small_dir.glob("*.col"))
    out = tmp_path / "r.csv"
    recs = run_grid(paths, GRID_CONFIGS, "both", K=5, budget=Budget(30, 2000), out_csv=out)
    assert len(recs) == len(paths) * 6 * 2
    assert [(r.instance, r.sbp_config, r.instance_dependent) for r in recs[:3]] == \
        [("c4", "none", False), ("c4", "none", True), ("c4", "NU", False)]
    with open(out) as fh:
        assert len(list(csv.DictReader(fh))) == len(recs)
    base = {r.instance: r for r in recs if r.sbp_config == "none" and not r.instance_dependent}
    for r in recs:
        b = base[r.instance]
        assert b.num_vars == r.n * r.K + r.K
        assert b.num_clauses == r.K * (r.m + r.n + 1) and b.num_pb == r.n
        if r.instance_dependent:
            continue
        dv, dc, dp = r.num_vars - b.num_vars, r.num_clauses - b.num_clauses, r.num_pb - b.num_pb
        expect = {"none": (0, 0, 0), "NU": (0, r.K - 1, 0), "CA": (0, 0, r.K - 1),
                  "LI": (r.n * r.K, li_clause_count(r.n, r.K), 0), "SC": (0, 2, 0),
                  "NU+SC": (0, r.K + 1, 0)}[r.sbp_config]
        assert (dv, dc, dp) == expect
    for r in recs:
        assert r.error == ""
        if r.best_value is None:
            assert r.solve_status in ("UNSAT", "TIMEOUT")
        else:
            assert r.solve_status in ("OPTIMAL", "TIMEOUT")
        if r.solve_status == OPTIMAL:
            assert r.best_value == {"myciel3": 4, "c4": 2}[r.instance]
        if r.sbp_config == "LI":
            assert r.num_generators == 0
        if r.instance_dependent:
            assert (r.group_order == 1) == (r.num_generators == 0)


def test_error_rows_do_not_stop_the_grid(tmp_path):
    bad = tmp_path / "bad.col"
    bad.write_text("p edge 2 1\ne 1 5\n")
    good = tmp_path / "good.col"
    good.write_text(to_dimacs_col(clique(3)))
    recs = run_grid([bad, good], [SbpConfig.parse("")], "no", K=3, budget=Budget(10))
    assert recs[0].solve_status == "ERROR" and "DimacsError" in recs[0].error
    assert (recs[1].solve_status, recs[1].best_value) == (OPTIMAL, 3)


def test_auto_k(small_dir):
    recs = run_grid([small_dir / "myciel3.col"], [SbpConfig.parse("")], "no", K=None, budget=Budget(60))
    assert recs[0].K >= 4 and recs[0].best_value == 4


def test_grid_is_deterministic_modulo_time(small_dir):
    paths = sorted(small_dir.glob("*.col"))
    kw = dict(configs=[SbpConfig.parse(c) for c in ("", "nu,sc", "li")], with_instance_dep="both",
              K=6, budget=Budget(None, 300), seed=11)
    a = records_csv(run_grid(paths, **kw), drop_time=True)
    b = records_csv(run_grid(paths, **kw), drop_time=True)
    assert a == b
    assert not any(c in a.splitlines()[0].split(",") for c in TIME_COLUMNS)


def test_parallel_grid_matches_serial(small_dir):
    paths = sorted(small_dir.glob("*.col"))
    kw = dict(configs=[SbpConfig.parse("nu")], with_instance_dep="both", K=5,
              budget=Budget(None, 300), seed=2)
    assert records_csv(run_grid(paths, jobs=2, **kw), True) == records_csv(run_grid(paths, **kw), True)


def test_keep_encodings_and_generators(small_dir, tmp_path):
    enc, gens = tmp_path / "enc", tmp_path / "gens"
    run_grid([small_dir / "c4.col"], [SbpConfig.parse("nu")], "yes", K=3, budget=Budget(10),
             keep_encodings=enc, emit_generators=gens)
    opb = (enc / "c4.NU.dep.opb").read_text()
    f = parse_opb(opb)
    assert f.num_vars > 4 * 3 + 3
    assert (gens / "c4.NU.dep.gens").exists()


# --- reporting --------------------------------------------------------------

def test_empty_report_is_header_only():
    text, md = report([])
    assert text == ",".join(FIELDS) + "\n"
    assert md.strip() == "(no records)"


def _rec(name, cfg, dep, status, value, t):
    return BenchRecord(name, 5, 5, 20, cfg, dep, 120, 200, 5, 0, 1, 0.0, status, value, t)


def test_summary_counts():
    recs = [_rec("a", "none", False, "OPTIMAL", 3, 1.0), _rec("b", "none", False, "TIMEOUT", 4, 9.0),
            _rec("a", "NU", False, "OPTIMAL", 3, 0.5), _rec("b", "NU", False, "OPTIMAL", 3, 0.5)]
    s = {x["config"]: x for x in summarize(recs, timeout=1000)}
    assert s["none"]["solved"] == 1 and s["none"]["time"] == 1001.0
    assert s["NU"]["solved"] == 2 <= s["NU"]["instances"]
    _, md = report(recs, 1000)
    assert "| none | 1.0K | 1/2 |" in md and "| NU | 1.0 | 2/2 |" in md


def test_csv_round_trip(tmp_path):
    recs = [_rec("a", "NU+SC", True, "OPTIMAL", 3, 1.25), _rec("b", "none", False, "TIMEOUT", None, 9.0)]
    p = tmp_path / "x.csv"
    p.write_text(records_csv(recs))
    back = read_records(p)
    assert [(r.instance, r.instance_dependent, r.best_value, r.solve_time) for r in back] == \
        [("a", True, 3, 1.25), ("b", False, None, 9.0)]


def test_sci():
    assert sci(36) == "36"
    assert sci(11 * 10 ** 167) == "1.1e+168"
    assert sci(math.factorial(20)) == "2.4e+18"
    assert sci(9_960_000) == "1.0e+07"


# --- instances --------------------------------------------------------------

def test_generated_instances_match_published_headers(tmp_path, monkeypatch):
    from symcolor.graph import parse_dimacs_col
    for name in GENERATORS:
        text = generated_col_text(name)
        header = next(l for l in text.splitlines() if l.startswith("p "))
        assert tuple(map(int, header.split()[2:])) == SIZES[name]
        parse_dimacs_col(text, name)
    monkeypatch.setenv("SYMCOLOR_BENCH_DIR", str(tmp_path))
    (tmp_path / "huck.col").write_text("p edge 2 1\ne 1 2\n")
    assert locate("huck") == tmp_path / "huck.col"


# --- CLI --------------------------------------------------------------------

def test_cli_encode_and_sbp(small_dir, tmp_path, capsys):
    out = tmp_path / "e.opb"
    assert main(["encode", str(small_dir / "c4.col"), "--k", "3", "--out", str(out)]) == 0
    f = parse_opb(out.read_text())
    assert f.num_vars == 15
    assert main(["encode", str(small_dir / "c4.col"), "--k", "2", "--decision", "--format", "cnf"]) == 0
    assert "p cnf 8 " in capsys.readouterr().out
    assert main(["sbp", str(small_dir / "c4.col"), "--k", "3", "--sbp", "nu,sc", "--inst-dep",
                 "--out", str(out), "--emit-generators", str(tmp_path / "g.txt")]) == 0
    assert parse_opb(out.read_text()).num_vars >= 15


def test_cli_detect_and_solve(small_dir, capsys):
    assert main(["detect-sym", str(small_dir / "myciel3.col"), "--k", "4"]) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["group_order"] == str(24 * 10) and not info["capped"]
    assert main(["solve", str(small_dir / "myciel3.col"), "--k", "6", "--sbp", "nu,sc"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["status"] == "OPTIMAL" and res["value"] == 4
    assert len(set(res["coloring"].values())) == 4


def test_cli_bench(small_dir, tmp_path, capsys):
    out = tmp_path / "res"
    rc = main(["bench", str(small_dir), "--configs", "none", "nu,sc", "--inst-dep", "no",
               "--k", "5", "--timeout", "30", "--out", str(out)])
    assert rc == 0
    assert len(read_records(out / "results.csv")) == 4
    assert "| NU+SC |" in (out / "summary.md").read_text()


def test_cli_setup_errors(tmp_path, capsys):
    assert main(["solve", str(tmp_path / "missing.col")]) == 2
    assert main(["bench", str(tmp_path / "missing")]) == 2
    opb = tmp_path / "f.opb"
    opb.write_text("+1 x1 >= 1 ;\n")
    assert main(["sbp", str(opb), "--sbp", "nu"]) == 2
    assert "error" in capsys.readouterr().err
