from __future__ import annotations

import itertools

import networkx as nx
import pytest

from minorverify import oracle
from minorverify import reduction as R
from minorverify.coloring import is_proper, min_frequency_coloring
from minorverify.graph_core import Graph, apply_minor_action, find_cut_sets, from_networkx, vertex_connectivity
from minorverify.minor_lab import admissive_relations, is_consistent_cut_set
from minorverify.witness import validate_witness

from conftest import random_graph

BOWTIE = Graph.from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])
MOSER = Graph.from_edges(7, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (0, 4), (0, 5), (4, 5), (4, 6), (5, 6), (3, 6)])
ICOSAHEDRON = from_networkx(nx.icosahedral_graph())[0]
K4 = Graph.complete(4)


def _replay(g, out):
    h = g
    for a in out.actions:
        h, _ = apply_minor_action(h, a)
    return h


def test_bowtie_reduces_through_cut_vertex():
    out = R.reduce_step(BOWTIE, 3)
    assert out.kind == "reduced" and out.report["via"] == "cut_set" and out.report["cut_set"] == [2]
    assert out.graph == Graph.complete(3) and _replay(BOWTIE, out) == out.graph
    assert oracle.chromatic_number(out.graph) == 3


def test_k4_is_its_own_clique_minor():
    out = R.reduce_step(K4, 4)
    assert out.kind == "clique_minor" and sorted(map(sorted, out.witness.branch_sets)) == [[0], [1], [2], [3]]


def test_degree_three_vertex_merges_its_rim_neighbors():
    w5 = Graph.wheel(5)
    out = R.reduce_step(w5, 4)
    assert out.kind == "reduced" and out.report["via"] == "low_degree" and out.report["degree"] == 3
    u1, u2 = out.report["merged"]
    assert not w5.has_edge(u1, u2) and out.origin[u1] == out.origin[u2]
    assert oracle.chromatic_number(out.graph) >= 4 and out.graph.n < w5.n
    assert _replay(w5, out) == out.graph


def test_wrong_chromatic_number_rejected():
    with pytest.raises(R.ReductionError):
        R.reduce_step(Graph.cycle(5), 4)
    with pytest.raises(R.ReductionError):
        R.reduce_step(K4, 5)


def test_irreducible_core():
    out = R.reduce_step(ICOSAHEDRON, 4)
    assert out.kind == "irreducible"
    assert min(ICOSAHEDRON.degree(v) for v in ICOSAHEDRON.vertices) >= 4 and vertex_connectivity(ICOSAHEDRON) >= 3


def test_chain_ends_and_shrinks():
    chain, last = R.reduce_chain(Graph.wheel(7), 4)
    assert last.kind == "clique_minor"
    sizes = [Graph.wheel(7).n] + [c.graph.n for c in chain]
    assert sizes == sorted(sizes, reverse=True) and len(set(sizes)) == len(sizes)


@pytest.mark.parametrize("g", [K4, Graph.wheel(5), MOSER, ICOSAHEDRON])
def test_dirac_examples(g):
    w = R.dirac_k4_witness(g)
    assert validate_witness(g, w, pattern=K4)
    assert oracle.has_minor(g, K4) is not None


def test_dirac_on_k4_is_identity():
    assert sorted(map(sorted, R.dirac_k4_witness(K4).branch_sets)) == [[0], [1], [2], [3]]


def test_dirac_on_odd_wheel_uses_the_hub():
    w5 = Graph.wheel(5)
    hub = next(v for v in w5.vertices if w5.degree(v) == 5)
    assert frozenset({hub}) in R.dirac_k4_witness(w5).branch_sets


def test_dirac_needs_chromatic_four():
    with pytest.raises(R.ReductionError):
        R.dirac_k4_witness(Graph.cycle(5))


def test_five_wheel_examples():
    out = R.five_wheel_check(ICOSAHEDRON, 0)
    assert out.kind == "pentagon"
    cyc = out.cycle
    assert set(cyc) == ICOSAHEDRON.neighbors(0)
    assert all(ICOSAHEDRON.has_edge(cyc[i], cyc[(i + 1) % 5]) for i in range(5))
    out = R.five_wheel_check(Graph.complete(6), 0)
    assert out.kind == "k5_minor" and validate_witness(Graph.complete(6), out.witness, pattern=Graph.complete(5))
    nb = sorted(ICOSAHEDRON.neighbors(0))
    a = nb[0]
    c = next(x for x in nb if x != a and not ICOSAHEDRON.has_edge(a, x))
    chord = ICOSAHEDRON.add_edges([(a, c)])
    out = R.five_wheel_check(chord, 0)
    assert out.kind == "k5_minor" and validate_witness(chord, out.witness, pattern=Graph.complete(5))


def test_five_wheel_preconditions():
    with pytest.raises(R.ReductionError):
        R.five_wheel_check(Graph.complete(5), 0)
    with pytest.raises(R.ReductionError):
        R.five_wheel_check(Graph.wheel(5), next(v for v in Graph.wheel(5).vertices if Graph.wheel(5).degree(v) == 5))


def test_five_wheel_trichotomy(rng):
    seen = set()
    graphs = 0
    while graphs < 120:
        g = random_graph(rng, rng.randint(6, 10), rng.uniform(0.45, 0.9))
        if vertex_connectivity(g) < 4:
            continue
        graphs += 1
        for v in g.vertices:
            if g.degree(v) != 5:
                continue
            out = R.five_wheel_check(g, v)
            nb = sorted(g.neighbors(v))
            tri = any(g.has_edge(x, y) and g.has_edge(y, z) and g.has_edge(x, z) for x, y, z in itertools.combinations(nb, 3))
            ind = any(not any(g.has_edge(x, y) for x, y in itertools.combinations(t, 2)) for t in itertools.combinations(nb, 3))
            expected = "k5_minor" if tri else "reducible" if ind else "pentagon"
            assert out.kind == expected
            if out.kind == "k5_minor":
                assert validate_witness(g, out.witness, pattern=Graph.complete(5))
            seen.add(out.kind)
    assert "k5_minor" in seen


def test_reductions_keep_chromatic_number(rng):
    done = 0
    while done < 60:
        g = random_graph(rng, rng.randint(4, 8), rng.uniform(0.3, 0.8))
        k = oracle.chromatic_number(g)
        if k not in R.KS:
            continue
        done += 1
        out = R.reduce_step(g, k)
        if out.kind == "reduced":
            assert out.graph.n < g.n and oracle.chromatic_number(out.graph) >= k
            assert _replay(g, out) == out.graph
        elif out.kind == "clique_minor":
            assert validate_witness(g, out.witness, pattern=Graph.complete(k))


def test_cut_recombination_gives_proper_coloring(rng):
    done = 0
    while done < 40:
        g = random_graph(rng, rng.randint(4, 8), rng.uniform(0.3, 0.7))
        if not g.is_connected():
            continue
        k = max(3, oracle.chromatic_number(g))
        for W in find_cut_sets(g, 2):
            for rel in admissive_relations(g, W):
                if not is_consistent_cut_set(g, W, rel):
                    continue
                h, relabel, cut, sides = R.abs_side_graphs(g, W, rel)
                cls = []
                for side in sides:
                    part, where = h.induced(sorted(set(side) | set(cut)))
                    if oracle.chromatic_number(part) > k:
                        break
                    cl = min_frequency_coloring(part, k)
                    back = {i: v for v, i in where.items()}
                    cls.append(type(cl).of({back[i]: c for i, c in cl.colors}, k))
                else:
                    out = R.recombine_cut_colorings(g, W, rel, *cls)
                    assert is_proper(g, out) and len(out.used()) <= k
                    done += 1


def test_outcome_json():
    data = R.reduce_step(BOWTIE, 3).to_json()
    assert data["format"] == 1 and data["kind"] == "reduced" and data["graph"]["n"] == 3
