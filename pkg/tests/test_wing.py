from __future__ import annotations

import itertools
import time

import networkx as nx
import pytest

from minorverify import oracle, wing
from minorverify.corpus import maximal_planar, random_wing1
from minorverify.graph_core import Graph, GraphError, to_networkx
from minorverify.witness import validate_witness

from conftest import random_graph

# v1..v6 = 0..5 on a line
LINE_EXAMPLE = Graph.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (2, 5), (0, 2), (3, 5)])
# two 4-cycles v1 v2 v3 v7 and v3 v4 v5 v6 sharing v3; v1..v7 = 0..6
TWO_BLOCKS = Graph.from_edges(7, [(0, 1), (1, 2), (2, 6), (6, 0), (2, 3), (3, 4), (4, 5), (5, 2)])


def test_is_wing1_examples():
    assert wing.is_wing1(range(6), LINE_EXAMPLE)
    crossed = Graph.path(6).add_edges([(1, 4), (2, 5)])
    assert not wing.is_wing1(range(6), crossed)
    assert wing.is_wing1([1, 0], Graph.complete(2))
    with pytest.raises(wing.NotPermutation):
        wing.is_wing1([0, 0, 1], Graph.path(3))


def test_build_examples():
    w = wing.build_wing1(LINE_EXAMPLE)
    assert isinstance(w, wing.WingEmbedding) and w.is_valid() and w.graph == LINE_EXAMPLE
    bad = wing.build_wing1(Graph.complete(4))
    assert isinstance(bad, wing.NotOuterplanar)
    name, cert = bad.certificate
    assert name == "K4" and validate_witness(Graph.complete(4), cert, pattern=Graph.complete(4))
    assert wing.build_wing1(Graph.complete(1)).order == (0,)
    assert wing.build_wing1(Graph.empty(0)).order == ()


def test_build_with_trace_keeps_it_outer():
    g = Graph.cycle(6).add_edges([(0, 3)])
    w = wing.build_wing1(g, trace=[1, 2])
    outer = w.outer().outer
    assert w.is_valid() and {1, 2} <= set(outer)


def test_perimeter_trace_examples():
    assert wing.find_perimeter_trace(Graph.cycle(5)).walk == (0, 1)
    assert wing.find_perimeter_trace(Graph.path(3)).walk == (0, 1, 2)
    assert wing.find_perimeter_trace(Graph.complete(1)).walk == (0,)
    with pytest.raises(wing.TraceError):
        wing.find_perimeter_trace(Graph.complete(4))
    with pytest.raises(wing.TraceError):
        wing.find_perimeter_trace(Graph.empty(2))


def test_trace_check_examples():
    assert not wing.trace_check(Graph.cycle(4), wing.Trace((0, 2)))
    assert wing.trace_check(Graph.cycle(4), wing.Trace((0, 1)))
    walk = wing.Trace((0, 1, 2, 3, 4, 5, 2, 6, 0), wing.PLANAR_WALK)
    assert wing.trace_check(TWO_BLOCKS, walk)
    assert wing.trace_check(Graph.complete(1), wing.Trace((0,), wing.PLANAR_WALK))
    # a wheel walked rim-hub-rim crosses itself
    w5 = Graph.wheel(5)
    hub = next(v for v in w5.vertices if w5.degree(v) == 5)
    rim = [v for v in w5.vertices if v != hub]
    assert wing.trace_check(w5, wing.Trace(tuple(rim), wing.PLANAR_WALK))
    assert not wing.trace_check(w5, wing.Trace((rim[0], hub, rim[2], rim[1], rim[3]), wing.PLANAR_WALK))


def _walk_check_by_paths(g, walk):
    """Enumerate every simple path pair directly."""
    w = list(walk)
    if len(w) > 1 and w[0] == w[-1]:
        w = w[:-1]
    h = to_networkx(g)
    h.add_edges_from((a, b) for a, b in zip(w, w[1:] + w[:1]) if a != b)
    for i, j, k, l in itertools.combinations(range(len(w)), 4):
        a, b, c, d = w[i], w[j], w[k], w[l]
        if {a, c} & {b, d}:
            continue
        ac = [set(p) for p in nx.all_simple_paths(h, a, c)]
        for p in nx.all_simple_paths(h, b, d):
            if any(not q & set(p) for q in ac):
                return False
    return True


def test_walk_check_matches_path_enumeration(rng):
    for _ in range(60):
        g = random_graph(rng, rng.randint(4, 7), rng.uniform(0.3, 0.7))
        walk = rng.sample(range(g.n), rng.randint(4, g.n))
        assert wing.trace_check(g, wing.Trace(tuple(walk), wing.PLANAR_WALK)) == _walk_check_by_paths(g, walk)


def test_vertex_related_examples():
    sets = wing.vertex_related_sets(wing.WingEmbedding(tuple(range(6)), LINE_EXAMPLE))
    assert (0, 1, 2) in sets and (2, 3, 5) in sets
    assert wing.vertex_related_sets(wing.WingEmbedding(tuple(range(5)), Graph.path(5))) == [tuple(range(5))]
    assert wing.vertex_related_sets(wing.WingEmbedding((0, 1), Graph.complete(2))) == [(0, 1)]


def test_low_degree_examples():
    rep = wing.find_low_degree(wing.WingEmbedding(tuple(range(6)), LINE_EXAMPLE))
    assert rep.vertex in (1, 4) and rep.degree == 2 and rep.count_ok
    rep = wing.find_low_degree(wing.WingEmbedding((0,), Graph.complete(1)))
    assert rep.vertex == 0 and rep.degree == 0
    with pytest.raises(GraphError):
        wing.find_low_degree(wing.WingEmbedding((), Graph.empty(0)))


def test_embedding_json_round_trip():
    w = wing.WingEmbedding(tuple(range(6)), LINE_EXAMPLE)
    assert wing.WingEmbedding.from_json(w.to_json()) == w


def test_build_agrees_with_oracle(rng):
    for _ in range(300):
        g = random_graph(rng, rng.randint(1, 9), rng.uniform(0.1, 0.6))
        w = wing.build_wing1(g)
        assert isinstance(w, wing.WingEmbedding) == oracle.is_outerplanar(g)
        if isinstance(w, wing.WingEmbedding):
            assert w.is_valid()


def test_outer_vertices_form_a_trace():
    for item in random_wing1((2, 9), None, seed=5, count=80, connected=True):
        w = wing.build_wing1(item.graph)
        assert wing.trace_check(item.graph, wing.Trace(w.outer().outer))


def test_peeling_outer_set_keeps_trace():
    for item in random_wing1((2, 9), None, seed=6, count=60, connected=True):
        g = item.graph
        U = item.wing().outer().outer
        for u in U:
            h, new = wing.peel_outerplanar_trace(g, U, u)
            assert wing.trace_check(h, wing.Trace(tuple(sorted(new))))


def test_low_degree_on_random_wings():
    for item in random_wing1((1, 10), None, seed=7, count=150):
        rep = wing.find_low_degree(item.wing())
        assert rep.degree <= 2 and item.graph.degree(rep.vertex) == rep.degree and rep.count_ok


def test_boundary_walks_of_triangulations():
    for item in maximal_planar((4, 8), seed=3, count=30):
        assert wing.trace_check(item.graph, wing.Trace(tuple(item.side["boundary"]), wing.PLANAR_WALK))


def test_build_time_grows_linearly():
    def cost(n):
        items = list(random_wing1(n, 0.5, seed=n, count=3, connected=True))
        runs = []
        for _ in range(3):
            start = time.perf_counter()
            for it in items:
                wing.build_wing1(it.graph)
            runs.append(time.perf_counter() - start)
        return min(runs)

    small, large = cost(200), cost(800)
    # four times the size, so about four times the cost; a factor of two either way is allowed
    assert large / small < 8


def test_bridge_vertex_trace_can_fail_the_definition():
    # 0 and 3 share neighbors 1 and 2, and 3 is the only way to reach 4:
    # the bridge construction picks 0, 3, 4, yet {0, 3} carries a K2,2
    g = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (1, 3), (2, 3), (3, 4)])
    t = wing.find_perimeter_trace(g)
    assert t.walk == (0, 3, 4)
    assert not wing.trace_check(g, t)
    # the outer vertices of the built embedding are fine
    assert wing.trace_check(g, wing.Trace(wing.build_wing1(g).outer().outer))
