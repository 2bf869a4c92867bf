import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_force_optimum, closure_order, count_colored_automorphisms
from symcolor.encoder import encode_opt
from symcolor.formula import LE, Formula, PbConstraint, constraint_multiset, is_formula_symmetry
from symcolor.graph import Graph, brute_force_automorphisms, brute_force_chromatic, mycielski_graph, random_graph
from symcolor.sbp import SbpConfig, apply_sbps
from symcolor.symmetry import (GroupSummary, NotASymmetry, PermError, PermGenerator,
                               build_colored_graph, circular_chains, find_generators,
                               format_generators, group_order, lex_leader_sbp,
                               parse_generators)
from symcolor.symmetry.colored import lit_node, node_lit
from symcolor.symmetry.lexleader import lex_leader_clauses
from symcolor.symmetry.perm import permutation_group_order

TRIANGLE = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


def vp(m):
    """Generator from a map on positive literals, mirrored onto negations."""
    full = dict(m)
    full.update({-a: -b for a, b in m.items()})
    return PermGenerator(full)


# --- colored graph ----------------------------------------------------------

def test_literal_node_numbering():
    assert [lit_node(l) for l in (1, -1, 2, -2)] == [0, 1, 2, 3]
    assert all(node_lit(lit_node(l)) == l for l in (1, -1, 7, -7))


def test_one_variable_graph():
    cg = build_colored_graph(Formula(1))
    assert cg.num_nodes == 2 and cg.edges == {(0, 1)} and cg.num_colors == 1


def test_binary_and_ternary_clauses():
    cg = build_colored_graph(Formula(3, clauses=((1, 2),)))
    assert (lit_node(1), lit_node(2)) in cg.edges and cg.num_nodes == 6
    cg = build_colored_graph(Formula(3, clauses=((1, 2, -3),)))
    assert cg.num_nodes == 7
    clause_edges = {e for e in cg.edges if 6 in e}
    assert clause_edges == {(lit_node(1), 6), (lit_node(2), 6), (lit_node(-3), 6)}


def test_unit_clause_gets_a_clause_node():
    cg = build_colored_graph(Formula(2, clauses=((1,),)))
    assert cg.num_nodes == 5
    assert (lit_node(1), 4) in cg.edges


def test_exactly_one_nodes_share_a_color():
    cg = build_colored_graph(encode_opt(TRIANGLE, 3))
    pb_nodes = [k for k, o in enumerate(cg.node_origin) if o[0] == "pb"]
    assert len(pb_nodes) == 3
    assert len({cg.node_color[k] for k in pb_nodes}) == 1
    obj = [k for k, o in enumerate(cg.node_origin) if o[0] == "objective"]
    assert len(obj) == 1
    assert cg.node_color[obj[0]] not in {cg.node_color[k] for k in pb_nodes}


def test_pb_signatures_separate_shapes():
    f = Formula(4, pb_constraints=(PbConstraint(((1, 1), (1, 2)), LE, 1),
                                   PbConstraint(((1, 3), (1, 4)), LE, 2)))
    cg = build_colored_graph(f)
    pb = [cg.node_color[k] for k, o in enumerate(cg.node_origin) if o[0] == "pb"]
    assert pb[0] != pb[1]


def test_circular_chain_detector():
    assert circular_chains(Formula(2, clauses=((-1, 2), (-2, 1)))) == [[-2, -1], [1, 2]]
    assert circular_chains(encode_opt(TRIANGLE, 3)) == []


def test_chain_warning(caplog):
    build_colored_graph(Formula(2, clauses=((-1, 2), (-2, 1))))
    assert "circular implication" in caplog.text


# --- permutations and group order ------------------------------------------

def test_perm_validation():
    with pytest.raises(PermError):
        PermGenerator({1: 2, 2: 2})
    with pytest.raises(PermError):
        PermGenerator({1: 2, 2: 1})   # negations left fixed: not Boolean-consistent
    assert not PermGenerator({})


def test_perm_format_and_phase_shift():
    g = vp({3: 7, 7: 3, 4: 8, 8: 4})
    assert g.format() == "(x3 x7)(x4 x8)"
    assert g(-3) == -7
    flip = vp({2: -2})
    assert flip.format() == "(x2 ~x2)"
    assert PermGenerator.parse("(x2 ~x2)") == flip


@st.composite
def signed_perms(draw, max_vars=8):
    n = draw(st.integers(1, max_vars))
    images = draw(st.permutations(list(range(1, n + 1))))
    signs = draw(st.lists(st.sampled_from((1, -1)), min_size=n, max_size=n))
    return vp({v: s * w for v, w, s in zip(range(1, n + 1), images, signs)})


@settings(max_examples=200, deadline=None)
@given(st.lists(signed_perms(), max_size=4))
def test_cycle_notation_round_trip(gens):
    gens = [g for g in gens if g]
    text = format_generators(gens)
    assert parse_generators(text) == gens
    for g in gens:
        inv = g.inverse()
        assert all(inv(g(l)) == l for l in range(-9, 10) if l)


def test_group_order_small_cases():
    assert group_order([]) == 1
    assert group_order([vp({1: 2, 2: 1})]) == 2
    s4 = [vp({1: 2, 2: 1}), vp({1: 2, 2: 3, 3: 4, 4: 1})]
    assert group_order(s4) == 24
    assert group_order([vp({1: -1})]) == 2


@settings(max_examples=60, deadline=None)
@given(st.lists(signed_perms(max_vars=4), min_size=1, max_size=3))
def test_group_order_matches_closure(gens):
    # at most 2^4 * 4! elements, small enough for plain closure
    n = 4
    arrays = []
    for g in gens:
        # act on the 2n literal points 0..2n-1
        arrays.append([lit_node(g(node_lit(k))) if abs(node_lit(k)) <= n else k for k in range(2 * n)])
    assert group_order(gens) == closure_order(arrays, 2 * n)
    assert permutation_group_order(arrays) == closure_order(arrays, 2 * n)


def test_group_order_of_symmetric_group_s20_on_colors():
    # a color swap and a color rotation, applied to 2 vertices: order 20!
    K, n = 20, 2
    swap = {i * K + j: i * K + (3 - j) for i in range(n) for j in (1, 2)}
    rot = {i * K + j: i * K + j % K + 1 for i in range(n) for j in range(1, K + 1)}
    assert group_order([vp(swap), vp(rot)]) == math.factorial(20)


# --- search -----------------------------------------------------------------

def test_triangle_k3_group_order():
    f = encode_opt(TRIANGLE, 3)
    gens = find_generators(f)
    assert not gens.capped and gens.spurious == 0
    assert group_order(gens) == 36
    cg = build_colored_graph(f)
    assert count_colored_automorphisms(cg.num_nodes, cg.node_color, cg.edges) == 36
    s = GroupSummary.of(gens)
    assert s.group_order == 36 and s.num_generators == len(gens) > 0


def _rigid_graph():
    rng = random.Random(5)
    while True:
        g = random_graph(6, 0.5, rng)
        if len(brute_force_automorphisms(g)) == 1:
            return g


def test_rigid_graph_k1_has_no_generators():
    gens = find_generators(encode_opt(_rigid_graph(), 1))
    assert list(gens) == [] and not gens.capped
    assert GroupSummary.of(gens).group_order == 1


def test_generators_are_formula_symmetries():
    f = encode_opt(mycielski_graph(3), 4)
    ref = constraint_multiset(f)
    gens = find_generators(f)
    assert gens and all(is_formula_symmetry(f, g.mapping, ref) for g in gens)
    assert group_order(gens) == math.factorial(4) * 10


def test_post_li_myciel3_has_no_symmetry():
    g = mycielski_graph(3)
    f = apply_sbps(encode_opt(g, 6), g, 6, SbpConfig.parse("li"))
    gens = find_generators(f)
    assert not gens.capped and len(gens) == 0


def test_node_budget_caps():
    gens = find_generators(encode_opt(mycielski_graph(3), 6), node_budget=3)
    assert gens.capped


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.floats(0, 1), st.sampled_from([2, 3]), st.integers(0, 10 ** 6))
def test_group_order_identity(n, p, K, seed):
    g = random_graph(n, p, random.Random(seed))
    f = encode_opt(g, K)
    gens = find_generators(f)
    if circular_chains(f):
        return
    assert group_order(gens) == math.factorial(K) * len(brute_force_automorphisms(g))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 10), st.integers(0, 10 ** 6))
def test_search_order_matches_backtracking_count(n, seed):
    # plain colored graphs, no formula: the orbit-product order is exact
    from symcolor.symmetry.search import automorphism_generators
    rng = random.Random(seed)
    colors = [rng.randint(0, 1) for _ in range(n)]
    edges = {(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < 0.4}
    adj = [set() for _ in range(n)]
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    res = automorphism_generators(n, colors, [sorted(s) for s in adj], edges)
    want = count_colored_automorphisms(n, colors, edges)
    assert res.order == want
    assert permutation_group_order(res.generators) == want


# --- lex-leader -------------------------------------------------------------

def test_two_variable_swap_keeps_lex_smaller():
    # (a | b) with a <-> b: models 10, 01, 11; lex-leader drops a=1, b=0
    f = Formula(2, clauses=((1, 2),))
    swap = vp({1: 2, 2: 1})
    out = lex_leader_sbp([swap], f)
    models = set()
    for bits in itertools.product((False, True), repeat=out.num_vars):
        m = (False,) + bits
        if not out.violations(m):
            models.add(m[1:3])
    assert models == {(False, True), (True, True)}


def test_identity_gives_no_clauses():
    assert lex_leader_clauses(PermGenerator({}), 5) == ([], 0)
    f = Formula(2)
    assert lex_leader_sbp([PermGenerator({})], f) is f


def test_lex_leader_clause_count_is_linear():
    g = vp({1: 2, 2: 1, 3: 4, 4: 3})
    cl, used = lex_leader_clauses(g, 10)
    assert used == 4
    assert cl[0] == (10,)
    assert len(cl) <= 1 + 4 + 5 * 3


def test_rejects_non_symmetry():
    f = Formula(2, clauses=((1,),))
    with pytest.raises(NotASymmetry):
        lex_leader_sbp([vp({1: 2, 2: 1})], f)
    with pytest.raises(NotASymmetry):
        lex_leader_sbp([vp({3: 4, 4: 3})], f)


def test_prefix_variables_have_roles():
    f = encode_opt(TRIANGLE, 3)
    gens = find_generators(f)
    out = lex_leader_sbp(gens, f)
    pre = out.vars_with_role("lexpre")
    assert len(pre) == out.num_vars - f.num_vars > 0


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.floats(0, 1), st.integers(0, 10 ** 6))
def test_lex_leader_preserves_optimum(n, p, seed):
    g = random_graph(n, p, random.Random(seed))
    K = 2
    f = encode_opt(g, K)
    out = lex_leader_sbp(find_generators(f), f)
    if out.num_vars > 16:
        return
    chi = brute_force_chromatic(g)
    sat, best = brute_force_optimum(out, max_vars=16)
    assert sat == (chi <= K)
    assert best == (chi if sat else None)
