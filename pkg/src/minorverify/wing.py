"""One-page book (wing-1) embeddings of outerplanar graphs, perimeter traces
and the structural facts read off the line order.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from . import oracle
from .graph_core import Graph, GraphError, components_without, separates
from .minor_lab import _adj_masks, _bits, bipartite_minor_on, kx_minor_on
from .witness import DEFAULT_BUDGET, BudgetExceeded, MinorWitness, SearchBudget

__all__ = [
    "WingEmbedding",
    "NotOuterplanar",
    "OuterVertexInfo",
    "Trace",
    "LowDegreeReport",
    "is_wing1",
    "build_wing1",
    "outer_info",
    "find_perimeter_trace",
    "trace_check",
    "peel_outerplanar_trace",
    "vertex_related_sets",
    "find_low_degree",
    "boundary_walk_from_apex",
    "WALK_CHECK_CAP",
]

WALK_CHECK_CAP = 10
OUTERPLANAR_SET = "outerplanar-set"
PLANAR_WALK = "planar-walk"


class NotPermutation(GraphError):
    pass


class TraceError(GraphError):
    pass


# --- embeddings -------------------------------------------------------------

def _arcs(order: Sequence[int], g: Graph) -> list[tuple[int, int]]:
    pos = {v: i for i, v in enumerate(order)}
    return sorted((min(pos[a], pos[b]), max(pos[a], pos[b])) for a, b in g.edges())


def _check_permutation(order: Sequence[int], g: Graph) -> None:
    if sorted(order) != list(range(g.n)):
        raise NotPermutation("order is not a permutation of the vertices")


def is_wing1(order: Sequence[int], g: Graph) -> bool:
    """True when no two edges interleave along ``order``."""
    _check_permutation(order, g)
    ending: dict[int, list[int]] = {}
    starting: dict[int, list[int]] = {}
    for a, b in _arcs(order, g):
        starting.setdefault(a, []).append(b)
        ending.setdefault(b, []).append(a)
    stack: list[tuple[int, int]] = []
    for p in range(g.n):
        for a in sorted(ending.get(p, ()), reverse=True):
            if not stack or stack.pop() != (a, p):
                return False
        for b in sorted(starting.get(p, ()), reverse=True):
            stack.append((p, b))
    return True


@dataclass(frozen=True)
class OuterVertexInfo:
    outer: tuple[int, ...]
    inner: frozenset[int]


def outer_info(order: Sequence[int], g: Graph) -> OuterVertexInfo:
    """Outer vertices are those not strictly under any arc."""
    cover = [0] * (g.n + 1)
    for a, b in _arcs(order, g):
        if b > a + 1:
            cover[a + 1] += 1
            cover[b] -= 1
    outer, inner = [], set()
    depth = 0
    for p, v in enumerate(order):
        depth += cover[p]
        (inner.add(v) if depth else outer.append(v))
    return OuterVertexInfo(tuple(outer), frozenset(inner))


@dataclass(frozen=True)
class WingEmbedding:
    order: tuple[int, ...]
    graph: Graph

    def __post_init__(self):
        _check_permutation(self.order, self.graph)

    @cached_property
    def position(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.order)}

    @property
    def ends(self) -> tuple[int, ...]:
        if not self.order:
            return ()
        return (self.order[0], self.order[-1])

    def arcs(self) -> list[tuple[int, int]]:
        return _arcs(self.order, self.graph)

    def outer(self) -> OuterVertexInfo:
        return outer_info(self.order, self.graph)

    def is_valid(self) -> bool:
        return is_wing1(self.order, self.graph)

    def to_json(self) -> dict:
        return {"order": list(self.order), "graph": self.graph.to_json()}

    @classmethod
    def from_json(cls, data) -> WingEmbedding:
        if isinstance(data, str):
            data = json.loads(data)
        return cls(tuple(data["order"]), Graph.from_json(data["graph"]))


@dataclass(frozen=True)
class NotOuterplanar:
    """Failure of :func:`build_wing1`; the forbidden minor is found on demand."""

    graph: Graph
    reason: str = "peel-and-prepend produced crossing arcs"

    @cached_property
    def certificate(self) -> tuple[str, MinorWitness] | None:
        return oracle.forbidden_minor_witness(self.graph, "outerplanar")


# --- the peel-and-prepend construction ------------------------------------------

def _bfs_until(adj, removed: list[bool], src: int, targets: set[int]) -> dict[int, int]:
    """Distances from ``src`` over live vertices; stops once all targets are seen."""
    dist = {src: 0}
    left = len(targets - {src})
    queue = deque([src])
    while queue and left:
        v = queue.popleft()
        for w in adj[v]:
            if not removed[w] and w not in dist:
                dist[w] = dist[v] + 1
                if w in targets:
                    left -= 1
                queue.append(w)
    return dist


def _ordered_by_distance(adj, removed, vs: Iterable[int], anchor: int) -> tuple[list[int], set[int]]:
    """vs reachable from anchor, farthest first; also the unreachable rest."""
    vs = set(vs)
    dist = _bfs_until(adj, removed, anchor, vs)
    near = sorted((v for v in vs if v in dist), key=lambda v: (-dist[v], v))
    return near, {v for v in vs if v not in dist}


def _start_trace(adj, removed, vs: set[int]) -> tuple[list[int], set[int]]:
    """Order one live component's share of ``vs`` as a trace; return the rest."""
    if len(vs) == 1:
        return list(vs), set()
    best = None
    dists = {}
    for v in sorted(vs):
        d = _bfs_until(adj, removed, v, vs)
        dists[v] = d
    # pick the component holding the smallest vertex
    first = min(vs)
    comp = {v for v in vs if v in dists[first]}
    for p, q in itertools.combinations(sorted(comp), 2):
        key = (-dists[p][q], p, q)
        if best is None or key < best:
            best = key
    if best is None:
        return [first], vs - {first}
    q = best[2]
    order = sorted(comp, key=lambda v: (-dists[q][v], v))
    return order, vs - comp


def _peel_order(g: Graph, trace: list[int]) -> list[int]:
    adj = g.adj
    removed = [False] * g.n
    out: list[int] = []
    stack = [trace]
    while stack:
        t = stack.pop()
        t0 = t[0]
        removed[t0] = True
        out.append(t0)
        rest = t[1:]
        nbrs = {w for w in adj[t0] if not removed[w]}
        tasks = []
        if rest:
            c1 = rest[0]
            fresh, elsewhere = _ordered_by_distance(adj, removed, nbrs - set(rest), c1)
            tasks.append(fresh + rest)
        else:
            elsewhere = nbrs
        side = []
        while elsewhere:
            part, elsewhere = _start_trace(adj, removed, elsewhere)
            side.append(part)
        side.sort(key=min)
        # side pieces go right after t0, the piece holding the old trace goes last
        stack.extend(tasks)
        stack.extend(reversed(side))
    return out


def build_wing1(g: Graph, trace: Sequence[int] | None = None) -> WingEmbedding | NotOuterplanar:
    """Lay ``g`` out on a line with all edges on one side, or report failure.

    Components are laid out one after another, each by peeling the head of
    its trace and recursing on the rest with the head's neighbors prepended.
    With an explicit ``trace`` (for a connected graph) its vertices end up
    as outer vertices in the given order.
    """
    if g.n == 0:
        return WingEmbedding((), g)
    order: list[int] = []
    if trace is not None:
        trace = list(trace)
        if not trace or len(set(trace)) != len(trace) or not g.is_connected():
            raise TraceError("an explicit trace needs a connected graph and distinct vertices")
        order = _peel_order(g, trace)
    else:
        seen = [False] * g.n
        for s in range(g.n):
            if seen[s]:
                continue
            part = _peel_order_component(g, s, seen)
            order.extend(part)
    if len(order) != g.n or not is_wing1(order, g):
        return NotOuterplanar(g)
    if trace is not None:
        pos = {v: i for i, v in enumerate(order)}
        outer = set(outer_info(order, g).outer)
        if not set(trace) <= outer or [pos[v] for v in trace] != sorted(pos[v] for v in trace):
            return NotOuterplanar(g, "trace vertices were not kept outer and in order")
    return WingEmbedding(tuple(order), g)


def _peel_order_component(g: Graph, s: int, seen: list[bool]) -> list[int]:
    comp = [s]
    seen[s] = True
    stack = [s]
    while stack:
        v = stack.pop()
        for w in g.adj[v]:
            if not seen[w]:
                seen[w] = True
                comp.append(w)
                stack.append(w)
    if len(comp) == g.n:
        return _peel_order(g, [s])
    sub, relabel = g.induced(comp)
    back = {i: v for v, i in relabel.items()}
    return [back[i] for i in _peel_order(sub, [relabel[s]])]


# --- perimeter traces --------------------------------------------------------------

@dataclass(frozen=True)
class Trace:
    walk: tuple[int, ...]
    kind: str = OUTERPLANAR_SET

    def __post_init__(self):
        if self.kind not in (OUTERPLANAR_SET, PLANAR_WALK):
            raise TraceError(f"unknown trace kind {self.kind!r}")

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(self.walk)

    def to_json(self) -> dict:
        return {"walk": list(self.walk), "kind": self.kind}

    @classmethod
    def from_json(cls, data) -> Trace:
        return cls(tuple(data["walk"]), data["kind"])


def _bridge_path(g: Graph, u1: int, u2: int) -> list[int] | None:
    """u1, the cut vertices separating u1 from u2 in path order, u2 -- if they form a path."""
    if g.has_edge(u1, u2):
        return None if separates(g, [u1, u2]) else [u1, u2]
    cuts = [w for w in range(g.n) if w not in (u1, u2) and _splits(g, w, u1, u2)]
    if not cuts:
        return None
    # order the separating vertices by distance from u1; they must chain up
    dist = _distances(g, u1)
    chain = [u1] + sorted(cuts, key=lambda w: dist[w]) + [u2]
    if all(g.has_edge(a, b) for a, b in zip(chain, chain[1:])):
        return chain
    return None


def _splits(g: Graph, w: int, a: int, b: int) -> bool:
    dist = _distances(g, a, banned=w)
    return b not in dist


def _distances(g: Graph, s: int, banned: int | None = None) -> dict[int, int]:
    dist = {s: 0}
    queue = deque([s])
    while queue:
        v = queue.popleft()
        for w in g.adj[v]:
            if w != banned and w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def find_perimeter_trace(g: Graph, budget: SearchBudget = DEFAULT_BUDGET) -> Trace:
    """A perimeter trace u1, bridge vertices, u2 of a connected outerplanar graph.

    Among admissible pairs the longest trace wins, then the lexicographically
    smallest pair.
    """
    if g.n == 0 or not g.is_connected():
        raise TraceError("graph must be nonempty and connected")
    if not oracle.is_outerplanar(g, budget):
        raise TraceError("graph is not outerplanar")
    if g.n == 1:
        return Trace((0,))
    best = None
    for u1, u2 in itertools.combinations(range(g.n), 2):
        path = _bridge_path(g, u1, u2)
        if path is not None and (best is None or len(path) > len(best)):
            best = path
    assert best is not None
    return Trace(tuple(best))


def _walk_positions(walk: Sequence[int]) -> list[int]:
    w = list(walk)
    if len(w) > 1 and w[0] == w[-1]:
        w = w[:-1]
    return w


def _disjoint_paths_exist(adjm: list[int], a: int, c: int, b: int, d: int, full: int) -> bool:
    """Vertex-disjoint a-c and b-d paths? Only chordless a-c paths are tried."""

    def connected(src: int, dst: int, region: int) -> bool:
        seen = 1 << src
        frontier = seen
        while frontier:
            nxt = 0
            for v in _bits(frontier):
                nxt |= adjm[v]
            nxt &= region & ~seen
            if nxt >> dst & 1:
                return True
            seen |= nxt
            frontier = nxt
        return False

    if not connected(b, d, full & ~((1 << a) | (1 << c))):
        return False

    def walk(v: int, path: int, prev_nbrs: int) -> bool:
        for w in _bits(adjm[v] & ~path):
            if w in (b, d):
                continue
            if adjm[w] & prev_nbrs & ~(1 << v):
                continue  # a chord: some shorter path would do
            if w == c:
                if connected(b, d, full & ~(path | (1 << c))):
                    return True
                continue
            new_path = path | (1 << w)
            if not connected(b, d, full & ~new_path & ~(1 << c)):
                continue
            if walk(w, new_path, prev_nbrs | (1 << v)):
                return True
        return False

    # prev_nbrs tracks path vertices before the current tip
    return walk(a, 1 << a, 0)


def _walk_check(g: Graph, walk: Sequence[int], budget: SearchBudget) -> bool:
    if g.n > WALK_CHECK_CAP:
        raise BudgetExceeded(f"planar-walk checking is capped at n <= {WALK_CHECK_CAP}")
    w = _walk_positions(walk)
    if len(w) < 4:
        return True
    extra = [(a, b) for a, b in zip(w, w[1:] + w[:1]) if a != b and not g.has_edge(a, b)]
    h = g.add_edges(extra) if extra else g
    adjm = _adj_masks(h)
    full = (1 << h.n) - 1
    meter = budget.meter()
    cache: dict[tuple[int, int, int, int], bool] = {}
    for i, j, k, l in itertools.combinations(range(len(w)), 4):
        a, b, c, d = w[i], w[j], w[k], w[l]
        if len({a, c} & {b, d}):
            continue
        key = (min(a, c), max(a, c), min(b, d), max(b, d))
        if key not in cache:
            meter.tick()
            cache[key] = _disjoint_paths_exist(adjm, a, c, b, d, full)
        if cache[key]:
            return False
    return True


def trace_check(g: Graph, t: Trace, budget: SearchBudget = DEFAULT_BUDGET) -> bool:
    if any(not 0 <= v < g.n for v in t.walk):
        raise TraceError("trace mentions a vertex outside the graph")
    if t.kind == PLANAR_WALK:
        return _walk_check(g, t.walk, budget)
    U = set(t.walk)
    if not U:
        return True
    return kx_minor_on(g, U, 3, budget) is None and bipartite_minor_on(g, U, (), 2, 2, budget) is None


def peel_outerplanar_trace(g: Graph, U: Iterable[int], u: int) -> tuple[Graph, frozenset[int]]:
    """Delete ``u``; the new set is (U - u) together with u's neighbors, in new ids."""
    U = set(U)
    if u not in U:
        raise TraceError("peeled vertex must belong to the trace")
    h, relabel = g.remove_vertices([u])
    new = (U - {u}) | set(g.adj[u])
    return h, frozenset(relabel[v] for v in new)


def boundary_walk_from_apex(g: Graph, boundary: Iterable[int]) -> list[int] | None:
    """A face walk of ``g`` through exactly the given vertices, from a planar
    embedding of g plus an apex joined to them. None when that graph is not planar.
    """
    import networkx as nx

    from .graph_core import to_networkx

    marks = sorted(set(boundary))
    h = to_networkx(g)
    apex = ("apex",)
    h.add_node(apex)
    h.add_edges_from((apex, v) for v in marks)
    ok, emb = nx.check_planarity(h)
    if not ok:
        return None
    if len(marks) == 1:
        return marks
    walk: list[int] = []
    for x in emb.neighbors_cw_order(apex):
        face = emb.traverse_face(apex, x)
        walk.extend(face[1:-1])
    return walk


# --- reading the line -----------------------------------------------------------

def vertex_related_sets(w: WingEmbedding) -> list[tuple[int, ...]]:
    """Maximal vertex sets any two of which enclose no edge leaving their span.

    Each set is listed in line order; the list is sorted by positions.
    """
    import networkx as nx

    g, pos, order = w.graph, w.position, w.order
    n = g.n
    # leak[i][j]: some vertex strictly between positions i and j has an edge out of [i, j]
    lo = [min([pos[x] for x in g.adj[v]], default=pos[v]) for v in order]
    hi = [max([pos[x] for x in g.adj[v]], default=pos[v]) for v in order]
    compat = nx.Graph()
    compat.add_nodes_from(range(n))
    for i in range(n):
        reach_lo, reach_hi = i, i
        for j in range(i + 1, n):
            if j - 1 > i:
                reach_lo = min(reach_lo, lo[j - 1])
                reach_hi = max(reach_hi, hi[j - 1])
            if reach_lo >= i and reach_hi <= j:
                compat.add_edge(i, j)
    sets = [tuple(order[p] for p in sorted(c)) for c in nx.find_cliques(compat)]
    sets.sort(key=lambda s: [pos[v] for v in s])
    return sets


@dataclass(frozen=True)
class LowDegreeReport:
    vertex: int
    degree: int
    low_vertices: tuple[int, ...]
    outer_count: int

    @property
    def count_ok(self) -> bool:
        return len(self.low_vertices) >= self.outer_count - 1


def find_low_degree(w: WingEmbedding) -> LowDegreeReport:
    """Locate a vertex of degree <= 2 by descending into nested arcs."""
    g, order, pos = w.graph, w.order, w.position
    if g.n == 0:
        raise GraphError("empty graph has no vertices")
    at = list(order)
    edges = {(min(pos[a], pos[b]), max(pos[a], pos[b])) for a, b in g.edges()}

    def descend(i: int, j: int) -> int:
        while True:
            if j - i == 2:
                return i + 1
            p = next((p for p in range(i + 2, j) if (i, p) in edges), None)
            if p is not None:
                j = p
                continue
            p = next((p for p in range(i + 1, j - 1) if (p, j) in edges), None)
            if p is not None:
                i = p
                continue
            if g.degree(at[i + 1]) <= 2:
                return i + 1
            p = next(p for p in range(i + 3, j) if (i + 1, p) in edges)
            i, j = i + 1, p

    long_arc = next(((a, b) for a, b in sorted(edges) if b > a + 1), None)
    spot = 0 if long_arc is None else descend(*long_arc)
    v = at[spot]
    low = tuple(u for u in order if g.degree(u) <= 2)
    return LowDegreeReport(v, g.degree(v), low, len(w.outer().outer))
