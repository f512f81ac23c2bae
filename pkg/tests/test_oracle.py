from __future__ import annotations

import itertools

import networkx as nx
import pytest

from minorverify import oracle
from minorverify.graph_core import Graph, from_networkx, to_networkx
from minorverify.witness import BudgetExceeded, MinorWitness, SearchBudget, validate_witness, witness_problems

from conftest import random_graph

PETERSEN = from_networkx(nx.petersen_graph())[0]


@pytest.mark.parametrize("g,chi", [(Graph.complete(4), 4), (Graph.cycle(5), 3), (PETERSEN, 3), (Graph.empty(0), 0), (Graph.empty(3), 1)])
def test_chromatic_examples(g, chi):
    assert oracle.chromatic_number(g) == chi


@pytest.mark.parametrize("g,k,count", [(Graph.complete(1), 2, 2), (Graph.complete(3), 3, 6), (Graph.cycle(4), 2, 2)])
def test_enumeration_counts(g, k, count):
    assert len(list(oracle.enumerate_colorings(g, k))) == count


def test_has_minor_examples():
    w = oracle.has_minor(Graph.complete(5), Graph.complete(5))
    assert w is not None and sorted(len(s) for s in w.branch_sets) == [1] * 5
    w = oracle.has_minor(Graph.cycle(6), Graph.complete(3))
    assert w is not None and validate_witness(Graph.cycle(6), w, pattern=Graph.complete(3))
    assert oracle.has_minor(Graph.complete(4), Graph.complete(5)) is None


def test_class_examples():
    assert not oracle.class_membership(Graph.complete(4), "outerplanar")
    assert oracle.class_membership(Graph.complete(4), "planar")
    assert not oracle.class_membership(Graph.complete_bipartite(2, 3), "outerplanar")
    assert oracle.class_membership(Graph.cycle(6), "outerplanar")
    assert oracle.class_membership(Graph.cycle(6), "planar")
    assert not oracle.is_planar(PETERSEN)
    with pytest.raises(ValueError):
        oracle.class_membership(Graph.cycle(3), "toroidal")


def test_forbidden_witness_names():
    name, w = oracle.forbidden_minor_witness(Graph.complete_bipartite(2, 3), "outerplanar")
    assert name == "K2,3" and validate_witness(Graph.complete_bipartite(2, 3), w, pattern=Graph.complete_bipartite(2, 3))
    assert oracle.forbidden_minor_witness(Graph.cycle(5), "outerplanar") is None


def test_budget_signal():
    with pytest.raises(BudgetExceeded):
        # answers are memoized across calls, so use a host no other test touches
        host = Graph.from_edges(10, [(u, v) for u in range(10) for v in range(u + 1, 10) if v != u + 5])
        oracle.has_minor(host, Graph.complete(5), SearchBudget(node_cap=1))
    with pytest.raises(BudgetExceeded):
        oracle.chromatic_number(Graph.empty(13))


def test_chromatic_matches_enumeration(rng):
    for _ in range(80):
        g = random_graph(rng, rng.randint(1, 8), rng.random())
        chi = oracle.chromatic_number(g)
        assert next(oracle.enumerate_colorings(g, chi), None) is not None
        assert chi == 1 or next(oracle.enumerate_colorings(g, chi - 1), None) is None


def test_planarity_matches_networkx(rng):
    # networkx's embedding test is a separate route to the same answer
    for _ in range(120):
        g = random_graph(rng, rng.randint(1, 9), rng.uniform(0.2, 0.8))
        assert oracle.is_planar(g) == nx.check_planarity(to_networkx(g))[0]


def test_outerplanarity_matches_apex_planarity(rng):
    # g is outerplanar iff g plus a universal vertex is planar
    for _ in range(120):
        g = random_graph(rng, rng.randint(1, 8), rng.uniform(0.2, 0.8))
        apex = to_networkx(g)
        apex.add_edges_from((g.n, v) for v in g.vertices)
        assert oracle.is_outerplanar(g) == nx.check_planarity(apex)[0]


def test_minor_monotone_under_edge_addition(rng):
    for _ in range(40):
        g = random_graph(rng, rng.randint(4, 7), rng.uniform(0.3, 0.7))
        missing = [e for e in itertools.combinations(g.vertices, 2) if not g.has_edge(*e)]
        if not missing:
            continue
        bigger = g.add_edges([rng.choice(missing)])
        for h in (Graph.complete(4), Graph.complete_bipartite(2, 3)):
            if oracle.has_minor(g, h):
                assert oracle.has_minor(bigger, h)


def test_witnesses_from_search_validate(rng):
    for _ in range(60):
        g = random_graph(rng, rng.randint(4, 8), rng.uniform(0.3, 0.8))
        for h in (Graph.complete(4), Graph.complete_bipartite(2, 3), Graph.complete(5)):
            w = oracle.has_minor(g, h)
            if w is not None:
                assert witness_problems(g, w, pattern=h) == []


def test_checker_rejects_bad_witnesses():
    g = Graph.path(4)
    assert witness_problems(g, MinorWitness.complete([{0, 2}, {1}]))  # {0,2} disconnected
    assert witness_problems(g, MinorWitness.complete([{0}, {2}]))  # no edge between
    assert witness_problems(g, MinorWitness.complete([{0, 1}, {1, 2}]))  # overlap
    assert witness_problems(g, MinorWitness.complete([{0}, {1}]), on=[0])
    assert not witness_problems(g, MinorWitness.complete([{0, 1}, {2, 3}]))
