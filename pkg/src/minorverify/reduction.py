"""Reduction pipeline for chromatic-k graphs, parametric in k.

A reduction step either shrinks the graph to a proper minor whose chromatic
number is still at least k (re-checked by the oracle, never assumed), hands
back a K_k clique minor, or reports that the graph is irreducible: minimum
degree at least k and connectivity at least k-1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx

from . import oracle
from .coloring import ColorAssignment, combine_colorings
from .graph_core import (
    Graph,
    GraphError,
    MinorAction,
    apply_minor_action,
    components_without,
    find_cut_sets,
    to_networkx,
    vertex_connectivity,
)
from .minor_lab import EquivRelation, abs_contract, admissive_relations, consistent_cut_models
from .witness import DEFAULT_BUDGET, MinorWitness, SearchBudget, witness_problems

__all__ = [
    "ReductionError",
    "ReductionOutcome",
    "WheelOutcome",
    "reduce_step",
    "reduce_chain",
    "dirac_k4_witness",
    "five_wheel_check",
    "recombine_cut_colorings",
    "abs_side_graphs",
]

KS = (3, 4)


class ReductionError(GraphError):
    """A precondition of a reduction operation does not hold."""


@dataclass(frozen=True)
class ReductionOutcome:
    kind: str  # "reduced" | "clique_minor" | "irreducible"
    graph: Graph | None = None
    actions: tuple[MinorAction, ...] = ()
    origin: dict[int, int] = field(default_factory=dict)  # input id -> reduced id
    witness: MinorWitness | None = None
    report: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out: dict = {"format": 1, "kind": self.kind, "report": self.report}
        if self.graph is not None:
            out["graph"] = self.graph.to_json()
            out["actions"] = [a.to_json() for a in self.actions]
            out["origin"] = {str(v): w for v, w in sorted(self.origin.items())}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


def _require_k(k: int) -> None:
    if k not in KS:
        raise ReductionError(f"k must be one of {KS}")


def _apply_all(g: Graph, actions: Sequence[tuple]) -> tuple[Graph, list[MinorAction], dict[int, int]]:
    """Apply actions written in input ids, translating them to current ids.

    Each action is ("delete", v) or ("contract", u, v). Returns the minor, the
    actions as actually applied and where each surviving input vertex went.
    """
    where = {v: v for v in range(g.n)}
    applied = []
    h = g
    for act in actions:
        if act[0] == "delete":
            a = MinorAction.delete_vertex(where[act[1]])
        else:
            a = MinorAction.contract_edge(where[act[1]], where[act[2]])
        h, relabel = apply_minor_action(h, a)
        applied.append(a)
        where = {v: relabel[w] for v, w in where.items() if w in relabel}
    return h, applied, where


def _tree_contractions(g: Graph, s: Iterable[int]) -> list[tuple]:
    """Contractions of a BFS tree that merge the connected set s into its least vertex."""
    s = set(s)
    root = min(s)
    seen = {root}
    frontier = [root]
    out = []
    while frontier:
        nxt = []
        for x in frontier:
            for y in sorted(g.adj[x] & s):
                if y not in seen:
                    seen.add(y)
                    out.append(("contract", root, y))
                    nxt.append(y)
        frontier = nxt
    if seen != s:
        raise ReductionError("branch set is not connected")
    return out


def _chi_at_least(g: Graph, k: int, budget: SearchBudget) -> bool:
    return oracle.chromatic_number(g, budget) >= k


def _cut_candidates(g: Graph, k: int, budget: SearchBudget):
    """Minors keeping one side of a small cut set, with the cut realized as a
    clique through the other side. Cut sets by size then lexicographically,
    relations fewest blocks first."""
    for W in find_cut_sets(g, k - 2):
        W = sorted(W)
        for R in admissive_relations(g, W):
            models = consistent_cut_models(g, W, R, budget)
            if models is None:
                continue
            comps = components_without(g, W)
            sides = [comps[0], sorted(v for c in comps[1:] for v in c)]
            for keep, other, sets in ((0, 1, models[1]), (1, 0, models[0])):
                # realize abs_R(W) with the other side's branch sets, drop the rest of it
                used = set().union(*sets)
                acts = [("delete", v) for v in sides[other] if v not in used]
                for s in sets:
                    acts += _tree_contractions(g, s)
                yield {"cut_set": W, "relation": [sorted(b) for b in R.blocks], "kept_side": sides[keep]}, acts


def _degree_candidates(g: Graph, k: int):
    for v in range(g.n):
        d = g.degree(v)
        if d < k - 1:
            yield {"vertex": v, "degree": d}, [("delete", v)]
        elif d == k - 1:
            for u1, u2 in itertools.combinations(sorted(g.adj[v]), 2):
                if not g.has_edge(u1, u2):
                    yield {"vertex": v, "degree": d, "merged": [u1, u2]}, [("contract", v, u1), ("contract", v, u2)]


def _clique_in_closed_nbhd(g: Graph, k: int) -> MinorWitness | None:
    for v in range(g.n):
        if g.degree(v) != k - 1:
            continue
        nb = sorted(g.adj[v])
        if all(g.has_edge(a, b) for a, b in itertools.combinations(nb, 2)):
            return MinorWitness.complete([[x] for x in [v] + nb])
    return None


def _reduce(g: Graph, k: int, budget: SearchBudget) -> ReductionOutcome:
    if g.n == k and g.edge_count == k * (k - 1) // 2:
        return ReductionOutcome("clique_minor", witness=MinorWitness.complete([[v] for v in range(k)]))
    tried = 0
    for source, cands in (("cut_set", _cut_candidates(g, k, budget)), ("low_degree", _degree_candidates(g, k))):
        for report, acts in cands:
            tried += 1
            h, applied, where = _apply_all(g, acts)
            if h.n < g.n and _chi_at_least(h, k, budget):
                return ReductionOutcome("reduced", h, tuple(applied), where, report={"via": source, **report})
    w = _clique_in_closed_nbhd(g, k)
    if w is not None:
        return ReductionOutcome("clique_minor", witness=w, report={"via": "closed_neighborhood"})
    mindeg = min(g.degree(v) for v in range(g.n))
    conn = vertex_connectivity(g)
    facts = {"min_degree": mindeg, "connectivity": conn, "rejected_candidates": tried}
    if mindeg >= k and conn >= k - 1:
        return ReductionOutcome("irreducible", report=facts)
    # every candidate lost chromatic number; fall back to a searched clique minor
    w = oracle.has_minor(g, Graph.complete(k), budget)
    if w is None:
        raise ReductionError(f"no K{k} minor in a graph with chromatic number >= {k}")
    return ReductionOutcome("clique_minor", witness=w, report={"via": "minor_search", **facts})


def reduce_step(g: Graph, k: int, budget: SearchBudget = DEFAULT_BUDGET) -> ReductionOutcome:
    _require_k(k)
    if g.n == 0 or oracle.chromatic_number(g, budget) != k:
        raise ReductionError(f"graph does not have chromatic number {k}")
    return _reduce(g, k, budget)


def reduce_chain(g: Graph, k: int, budget: SearchBudget = DEFAULT_BUDGET) -> tuple[list[ReductionOutcome], ReductionOutcome]:
    """Iterate reduction steps until a clique minor or an irreducible core.

    Intermediate minors only need chromatic number at least k.
    """
    _require_k(k)
    if g.n == 0 or oracle.chromatic_number(g, budget) < k:
        raise ReductionError(f"graph has chromatic number below {k}")
    chain = []
    h = g
    while True:
        out = _reduce(h, k, budget)
        if out.kind != "reduced":
            return chain, out
        chain.append(out)
        h = out.graph


def _lift(sets: Iterable[Iterable[int]], chain: Sequence[ReductionOutcome]) -> list[frozenset[int]]:
    """Pull branch sets of the last minor back to the first graph."""
    sets = [set(s) for s in sets]
    for step in reversed(chain):
        back: dict[int, set[int]] = {}
        for v, w in step.origin.items():
            back.setdefault(w, set()).add(v)
        sets = [set().union(*(back[x] for x in s)) for s in sets]
    return [frozenset(s) for s in sets]


def _two_paths(h: nx.Graph, src, targets: Iterable[int], count: int) -> list[list[int]]:
    """``count`` paths from src to distinct targets, disjoint apart from src."""
    sink = ("sink",)
    aux = h.copy()
    aux.add_edges_from((t, sink) for t in targets)
    paths = list(nx.node_disjoint_paths(aux, src, sink))
    if len(paths) < count:
        raise ReductionError("graph is not connected enough for the path argument")
    return [p[:-1] for p in paths[:count]]


def _cycle_split(cycle: Sequence[int], marks: Sequence[int]) -> list[frozenset[int]]:
    """Cut a cycle into arcs, each starting at one marked vertex."""
    pos = sorted(cycle.index(m) for m in marks)
    n = len(cycle)
    sets = []
    for i, p in enumerate(pos):
        q = pos[(i + 1) % len(pos)]
        arc = []
        j = p
        while True:
            arc.append(cycle[j])
            j = (j + 1) % n
            if j == q:
                break
        sets.append(frozenset(arc))
    return sets


def _k3_on(h: nx.Graph, a: int, b: int, c: int) -> list[frozenset[int]]:
    """Three disjoint connected sets holding a, b, c, pairwise adjacent, in a
    2-connected graph: a cycle through a and b, then two disjoint paths from c."""
    p, q = list(nx.node_disjoint_paths(h, a, b))[:2]
    cycle = p + q[-2:0:-1]
    if c in cycle:
        return _cycle_split(cycle, [a, b, c])
    # fan from c onto the cycle; truncate each path at its first cycle vertex
    paths = _two_paths(h, c, cycle, 2)
    on = set(cycle)
    cut = []
    for path in paths:
        i = next(i for i, x in enumerate(path) if x in on)
        cut.append(path[: i + 1])
    x, y = cut[0][-1], cut[1][-1]
    ix, iy = cycle.index(x), cycle.index(y)
    n = len(cycle)
    arc1 = [cycle[(ix + t) % n] for t in range((iy - ix) % n + 1)]  # x .. y
    arc2 = [cycle[(iy + t) % n] for t in range((ix - iy) % n + 1)]  # y .. x
    spoke = cut[0][:-1][::-1] + cut[1][1:-1]  # x-side .. c .. y-side, without x, y
    # close either arc into a cycle through c with the spoke, walked back towards its start
    for arc, back in ((arc1, spoke[::-1]), (arc2, spoke)):
        if a in arc and b in arc:
            return _cycle_split(arc + back, [a, b, c])
    # a and b sit strictly inside different arcs
    inner1, inner2 = arc1[1:-1], arc2[1:-1]
    s_c = frozenset(spoke)
    s1 = frozenset([x] + inner1)
    s2 = frozenset([y] + inner2)
    by_member = {}
    for s in (s1, s2):
        for m in (a, b):
            if m in s:
                by_member[m] = s
    return [by_member[a], by_member[b], s_c]


def _k4_in_core(core: Graph) -> list[frozenset[int]]:
    h = to_networkx(core)
    for v in range(core.n):
        nb = sorted(core.adj[v])
        if len(nb) < 3:
            continue
        rest = h.subgraph(set(range(core.n)) - {v}).copy()
        if not nx.is_biconnected(rest):
            continue
        a, b, c = nb[:3]
        return [frozenset([v])] + _k3_on(rest, a, b, c)
    raise ReductionError("core has no vertex with a 2-connected remainder")


def dirac_k4_witness(g: Graph, budget: SearchBudget = DEFAULT_BUDGET) -> MinorWitness:
    """A K4 minor of a 4-chromatic graph, built by reducing to a 3-connected
    core and joining a vertex to a K3 on three of its neighbors."""
    if g.n == 0 or oracle.chromatic_number(g, budget) != 4:
        raise ReductionError("graph does not have chromatic number 4")
    chain, last = reduce_chain(g, 4, budget)
    if last.kind == "clique_minor":
        sets = last.witness.branch_sets
    else:
        core = chain[-1].graph if chain else g
        sets = _k4_in_core(core)
    w = MinorWitness.complete(_lift(sets, chain))
    problems = witness_problems(g, w, pattern=Graph.complete(4))
    if problems:
        raise ReductionError("constructed witness does not validate: " + "; ".join(problems))
    return w


@dataclass(frozen=True)
class WheelOutcome:
    kind: str  # "k5_minor" | "pentagon" | "reducible"
    witness: MinorWitness | None = None
    cycle: tuple[int, ...] = ()
    independent: tuple[int, ...] = ()

    def to_json(self) -> dict:
        out = {"format": 1, "kind": self.kind}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        if self.cycle:
            out["cycle"] = list(self.cycle)
        if self.independent:
            out["independent"] = list(self.independent)
        return out


def five_wheel_check(g: Graph, v: int, check_connectivity: bool = True) -> WheelOutcome:
    if not 0 <= v < g.n or g.degree(v) != 5:
        raise ReductionError("vertex must have degree 5")
    if check_connectivity and vertex_connectivity(g) < 4:
        raise ReductionError("graph must be 4-connected")
    nb = sorted(g.adj[v])
    for a, b, c in itertools.combinations(nb, 3):
        if g.has_edge(a, b) and g.has_edge(b, c) and g.has_edge(a, c):
            d = next(x for x in nb if x not in (a, b, c))
            h = to_networkx(g)
            h.remove_node(v)
            paths = _two_paths(h, d, [a, b, c], 3)
            hub = set()
            for p in paths:
                hub |= set(p[:-1])
            w = MinorWitness.complete([[v], [a], [b], [c], hub])
            return WheelOutcome("k5_minor", witness=w)
    for trio in itertools.combinations(nb, 3):
        if not any(g.has_edge(x, y) for x, y in itertools.combinations(trio, 2)):
            return WheelOutcome("reducible", independent=trio)
    # triangle-free with no independent triple on five vertices: a 5-cycle
    sub, relabel = g.induced(nb)
    back = {i: x for x, i in relabel.items()}
    if any(sub.degree(i) != 2 for i in range(5)) or not sub.is_connected():
        raise ReductionError("neighborhood is neither reducible nor a pentagon")
    cyc = [0]
    while len(cyc) < 5:
        cyc.append(next(y for y in sorted(sub.adj[cyc[-1]]) if y not in cyc))
    return WheelOutcome("pentagon", cycle=tuple(back[i] for i in cyc))


def abs_side_graphs(g: Graph, W: Iterable[int], R: EquivRelation):
    """The graph with R's blocks merged and abs_R(W) completed to a clique,
    the map into it, the merged cut and the two side vertex sets (new ids)."""
    W = sorted(set(W))
    h, relabel = abs_contract(g, W, R)
    cut = sorted({relabel[w] for w in W})
    h = h.add_edges((a, b) for a, b in itertools.combinations(cut, 2) if not h.has_edge(a, b))
    comps = components_without(g, W)
    sides = [comps[0], [v for c in comps[1:] for v in c]]
    return h, relabel, cut, [sorted({relabel[v] for v in s}) for s in sides]


def recombine_cut_colorings(
    g: Graph, W: Iterable[int], R: EquivRelation, cl_l: ColorAssignment, cl_r: ColorAssignment
) -> ColorAssignment:
    """Merge colorings of the two sides (each on side + merged clique cut, in
    the ids of :func:`abs_side_graphs`) into a coloring of g."""
    h, relabel, cut, _ = abs_side_graphs(g, W, R)
    merged = combine_colorings(h, cut, cl_l, cl_r)
    m = merged.mapping
    return ColorAssignment.of({v: m[relabel[v]] for v in range(g.n)}, merged.palette)
