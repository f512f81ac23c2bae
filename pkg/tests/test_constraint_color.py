from __future__ import annotations

import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minorverify import oracle
from minorverify import constraint_color as cc
from minorverify.coloring import InfeasibleError, PreconditionError, is_proper
from minorverify.corpus import maximal_planar, random_wing1
from minorverify.graph_core import Graph
from minorverify.wing import WingEmbedding, build_wing1, is_wing1

# v1..v6 = 0..5 on a line with outer vertices v1, v3, v6
LINE = Graph.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 2), (2, 5)])
LINE_W = WingEmbedding(tuple(range(6)), LINE)
# eight clusters over the outer vertices; the third and fifth are the two-vertex ones
EIGHT = cc.ConstraintSystem.build("p3a2", [[0], [0], [0, 2], [2], [2, 5], [5], [5], [5]], [], [[0, 1, 2, 3, 4], [4, 5, 6, 7]])


def C(colors, palette=3, arity=2):
    return cc.Collection.of(colors, palette, arity)


def test_expand_examples():
    assert cc.expand_collection(C({1, 2}, 4, 3)) == {frozenset({1, 2, 3}), frozenset({1, 2, 4})}
    assert cc.expand_collection(C({1, 2, 4}, 4, 3)) == {frozenset({1, 2, 4})}
    assert len(cc.expand_collection(C(set(), 4, 3))) == 4
    with pytest.raises(cc.ConstraintError):
        C({1, 2, 3}, 4, 2)


def test_expansion_counts():
    for m in range(1, 5):
        for n in range(0, m + 1):
            for l in range(0, n + 1):
                for L in itertools.combinations(range(1, m + 1), l):
                    assert len(cc.expand_collection(C(L, m, n))) == math.comb(m - l, n - l)


def test_consistent_examples():
    assert cc.consistent(C({1, 2}), [C({1, 2}), C({1, 3})])
    assert not cc.consistent(C({1, 2}), [C({1, 3}), C({2, 3})])
    assert cc.consistent(C({2, 3}), C({2, 3}))
    with pytest.raises(cc.ConstraintError):
        cc.consistent(C({1, 2}), C({1, 2}, 4, 3))


collections3 = st.lists(st.sets(st.integers(1, 3), max_size=2).map(lambda s: C(s)), min_size=1, max_size=3)


@settings(max_examples=100, deadline=None)
@given(collections3, collections3)
def test_consistent_is_symmetric(a, b):
    assert cc.consistent(a, b) == cc.consistent(b, a)
    assert cc.consistent(a, a)


def test_validate_examples():
    assert cc.validate_system(EIGHT, LINE, [0, 2, 5]) == []
    crossing = cc.ConstraintSystem.build("p4a3", [[0], [1], [2], [3], [4]], [(1, 3, "neq"), (2, 4, "neq")])
    assert any("cross" in v for v in cc.validate_system(crossing))
    assert cc.validate_system(cc.ConstraintSystem.build("p3a2", [])) == []
    four = cc.ConstraintSystem.build("p4a3", [[0], [1], [2], [3]], [(a, b, "neq") for a, b in itertools.combinations(range(4), 2)])
    assert any("pairwise" in v for v in cc.validate_system(four))


def test_constraint_graph_examples():
    cs = cc.ConstraintSystem.build("p3a2", EIGHT.clusters, [(5, 6, "neq"), (6, 7, "neq")], EIGHT.divisions)
    cg = cc.build_constraint_graph(LINE, LINE_W, cs)
    g5, g6, g7 = cg.gamma[5:8]
    assert cg.graph.has_edge(g5, g6) and cg.graph.has_edge(g6, g7) and not cg.graph.has_edge(g5, g7)
    merged = cc.ConstraintSystem.build("p3a2", cs.clusters, list(cs.relations) + [(0, 1, "eq")], cs.divisions)
    cg2 = cc.build_constraint_graph(LINE, LINE_W, merged)
    assert cg2.gamma[0] == cg2.gamma[1] and cg2.graph.n == cg.graph.n - 1
    plain = cc.build_constraint_graph(LINE, LINE_W, EIGHT)
    assert plain.graph.n == 6 + 8
    assert all(plain.graph.neighbors(gv) <= set(range(6)) for gv in plain.gamma_vertices())
    # neq on the first division makes it K2, and the edge 0-2 then lies inside it
    inside = cc.ConstraintSystem.build("p3a2", EIGHT.clusters, [(0, 1, "neq")], EIGHT.divisions)
    with pytest.raises(cc.ConstraintSystemError):
        cc.build_constraint_graph(LINE, LINE_W, inside)
    far = cc.ConstraintSystem.build("p3a2", [[0], [0], [2], [5]], [(0, 2, "neq")])
    with pytest.raises(cc.ConstraintSystemError):
        cc.build_constraint_graph(LINE, LINE_W, far)


def test_constraint_graph_stays_wing1(rng):
    for item in random_wing1((1, 9), None, seed=21, count=120):
        w = item.wing()
        cs = cc.random_system(w, rng)
        cg = cc.build_constraint_graph(w.graph, w, cs)
        layout = list(w.order) + list(range(cg.graph.n - 1, w.graph.n - 1, -1))
        assert is_wing1(layout, cg.graph)


def test_planar_constraint_graph():
    item = next(maximal_planar(6, seed=4))
    cs = cc.ConstraintSystem.build("p4a3", [sorted(set(item.side["boundary"]))])
    cg = cc.build_constraint_graph(item.graph, item.side["boundary"], cs)
    assert oracle.is_planar(cg.graph)


def test_single_vertex_base_case():
    w = WingEmbedding((0,), Graph.complete(1))
    for cs in (cc.ConstraintSystem.build("p3a2", []), cc.ConstraintSystem.build("p3a2", [[0], [0]], [(0, 1, "neq")])):
        sol = cc.solve_wing1_constraints(w, cs)
        assert sol.by_induction and sol.coloring[0] == 1
        assert all(sol.coloring[gv] in (2, 3) for gv in range(1, 1 + len(cs.groups())))


def test_outer_vertices_on_two_colors():
    sol = cc.outer_two_color(LINE_W)
    assert sol.by_induction and is_proper(LINE, sol.coloring)
    assert len({sol.coloring[v] for v in (0, 2, 5)}) <= 2


def test_eight_cluster_system_solves():
    sol = cc.solve_wing1_constraints(LINE_W, EIGHT)
    assert sol.coloring is not None and cc.check_solution(LINE, EIGHT, sol.coloring) == []
    assert cc.brute_force_solution(LINE, EIGHT) is not None


def test_checker_catches_bad_colorings():
    sol = cc.solve_wing1_constraints(LINE_W, EIGHT)
    col = sol.coloring.mapping
    col[1] = col[0]
    assert cc.check_solution(LINE, EIGHT, cc.ColorAssignment.of(col, 3))
    col = sol.coloring.mapping
    col[6] = col[0]  # first cluster-vertex takes the color of its own cluster
    assert cc.check_solution(LINE, EIGHT, cc.ColorAssignment.of(col, 3))


def test_wrong_mode_rejected():
    with pytest.raises(cc.ConstraintError):
        cc.solve_wing1_constraints(LINE_W, cc.ConstraintSystem.build("p4a3", [[0]]))


def test_system_json_round_trip():
    assert cc.ConstraintSystem.from_json(EIGHT.to_json()) == EIGHT


def test_solver_output_always_checks_out(rng):
    blocked = 0
    for item in random_wing1((1, 10), None, seed=22, count=150):
        w = item.wing()
        cs = cc.random_system(w, rng)
        sol = cc.solve_wing1_constraints(w, cs)
        blocked += sol.blocked is not None
        if sol.coloring is not None:
            assert cc.check_solution(w.graph, cs, sol.coloring) == []
        elif w.graph.n <= cc.BRUTE_FORCE_CAP:
            # no coloring is only acceptable when none exists
            assert cc.brute_force_solution(w.graph, cs) is None
    assert blocked < 150


def test_gamma_coloring_matches_cluster_constraints(rng):
    for item in random_wing1((1, 7), None, seed=23, count=150):
        w = item.wing()
        cs = cc.random_system(w, rng)
        cg = cc.build_constraint_graph(w.graph, w, cs)
        by_graph = oracle.chromatic_number(cg.graph) <= 3
        by_clusters = cc.brute_force_solution(w.graph, cs, with_divisions=False) is not None
        assert by_graph == by_clusters


def test_singleton_rewrite_is_equisatisfiable(rng):
    checked = 0
    for item in random_wing1((2, 7), None, seed=24, count=200):
        w = item.wing()
        outer = list(w.outer().outer)
        if len(outer) < 2:
            continue
        v = rng.choice(outer)
        cs = cc.ConstraintSystem.build("p4a3", [outer, [v]], [(0, 1, "neq")])
        new = cc.rewrite_singleton_neq(cs, 0, 1)
        assert len(new.clusters) == 3
        before = cc.brute_force_solution(w.graph, cs, with_divisions=False) is not None
        after = cc.brute_force_solution(w.graph, new, with_divisions=False) is not None
        assert before == after
        checked += 1
    assert checked > 50
    with pytest.raises(cc.ConstraintError):
        cc.rewrite_singleton_neq(cc.ConstraintSystem.build("p4a3", [[0, 1], [1, 2]], [(0, 1, "neq")]), 0, 1)


def test_division_coloring_examples():
    tri = WingEmbedding((0, 1, 2), Graph.complete(3))
    cl = cc.solve_division_coloring(tri, (0, 1, 2), 3, (0,))
    assert is_proper(tri.graph, cl) and cl.used() == {1, 2, 3}
    k2 = WingEmbedding((0, 1), Graph.complete(2))
    assert is_proper(k2.graph, cc.solve_division_coloring(k2, (0, 1), 2))
    c4 = WingEmbedding(tuple(range(4)), Graph.cycle(4))
    cl = cc.solve_division_coloring(c4, range(4), 3)
    assert is_proper(c4.graph, cl) and len(cl.used()) == 2
    with pytest.raises(InfeasibleError):
        cc.solve_division_coloring(tri, (0, 1, 2), 3)
    with pytest.raises(PreconditionError):
        cc.solve_division_coloring(tri, (0, 1, 2), 3, (0, 1))


def test_division_coloring_on_related_sets(rng):
    for item in random_wing1((3, 9), None, seed=25, count=120):
        w = item.wing()
        g = w.graph
        for R in cc.vertex_related_sets(w):
            seq = sorted(R, key=w.position.__getitem__)
            if len(seq) < 2 or not all(g.has_edge(a, b) for a, b in zip(seq, seq[1:])):
                continue
            x = 3 if len(seq) > 2 and g.has_edge(seq[0], seq[-1]) else 2
            I = [seq[0]] if x == 3 and len(seq) % 2 else []
            sub, where = g.induced(seq)
            try:
                cl = cc.solve_division_coloring(w, seq, x, I)
            except PreconditionError:
                continue
            cols = {v: cl[v] for v in seq}
            assert all(cols[a] != cols[b] for a, b in itertools.combinations(seq, 2) if g.has_edge(a, b))
            if I:
                others = {cols[v] for v in seq if v not in I}
                assert cols[I[0]] not in others and len(others) <= 2


def test_planar_examples():
    att = cc.planar_4color_attempt(Graph.complete(1), [0])
    assert att.succeeded and att.coloring[0] == 1
    k4 = Graph.complete(4)
    assert cc.boundary_coloring_exists(k4, [0, 1, 2]) is not None
    att = cc.planar_4color_attempt(k4, [0, 1, 2])
    if att.succeeded:
        assert cc.planar_coloring_problems(k4, [0, 1, 2], att.coloring) == []
    else:
        assert att.failures
    with pytest.raises(PreconditionError):
        cc.planar_4color_attempt(Graph.complete(5), [0, 1, 2])


def test_planar_engine_output_validates():
    made = 0
    for item in maximal_planar((3, 9), seed=26, count=40):
        walk = item.side["boundary"]
        assert cc.boundary_coloring_exists(item.graph, walk) is not None
        att = cc.planar_4color_attempt(item.graph, walk)
        if att.succeeded:
            made += 1
            assert cc.planar_coloring_problems(item.graph, walk, att.coloring) == []
        else:
            assert att.failures and all(f.rule for f in att.failures)
    assert made > 0


def test_random_systems_are_rule_conformant(rng):
    for item in random_wing1((1, 12), None, seed=27, count=100):
        w = item.wing()
        cs = cc.random_system(w, random.Random(rng.random()))
        assert cc.validate_system(cs, w.graph, list(w.outer().outer)) == []
