"""Minors on designated vertex sets and the cycle tools built around them.

All searches here are exhaustive over branch sets (with dominance and
connectivity pruning) and run under a :class:`SearchBudget`. Absence is
reported only when the search space was fully explored; otherwise
:class:`BudgetExceeded` propagates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from . import oracle
from .graph_core import Graph, GraphError, MinorAction, apply_minor_action, components_without, separates
from .witness import DEFAULT_BUDGET, BudgetExceeded, MinorWitness, SearchBudget, validate_witness, witness_problems

__all__ = [
    "MinorWitness",
    "validate_witness",
    "witness_problems",
    "TwinCycle",
    "EquivRelation",
    "TrackedSet",
    "AdmissivityError",
    "NoProgress",
    "StructureError",
    "extend_set",
    "kx_minor_on",
    "bipartite_minor_on",
    "find_twin_cycle",
    "twin_cycle_problems",
    "reform_cycle",
    "cycle_through",
    "abs_contract",
    "admissive_relations",
    "is_consistent_cut_set",
    "is_formal",
]

PATH_SEARCH_CAP = 10


class AdmissivityError(GraphError):
    pass


class NoProgress(GraphError):
    """Reforming could not enlarge the cycle's intersection with U."""


class StructureError(GraphError):
    pass


# --- bitmask helpers ---------------------------------------------------------

def _adj_masks(g: Graph) -> list[int]:
    return [sum(1 << w for w in g.adj[v]) for v in range(g.n)]


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _mask(vs: Iterable[int]) -> int:
    m = 0
    for v in vs:
        m |= 1 << v
    return m


def _nbr_union(adjm: Sequence[int], s: int) -> int:
    nb = 0
    for v in _bits(s):
        nb |= adjm[v]
    return nb


def _component_masks(adjm: Sequence[int], region: int) -> Iterator[int]:
    left = region
    while left:
        low = left & -left
        comp = low
        frontier = low
        while frontier:
            nxt = 0
            for v in _bits(frontier):
                nxt |= adjm[v]
            nxt &= region & ~comp
            comp |= nxt
            frontier = nxt
        yield comp
        left &= ~comp


def _connected_sets(adjm, root: int, allowed: int, done=None):
    """Connected vertex sets containing ``root`` inside ``allowed``, each once.

    Yields (set mask, neighbor union). When ``done(set, nbrs)`` holds, the
    set is yielded and none of its supersets on that branch are explored.
    """

    def rec(s: int, nb: int, ext: int, excl: int):
        yield s, nb
        if done is not None and done(s, nb):
            return
        while ext:
            low = ext & -ext
            v = low.bit_length() - 1
            ext ^= low
            grown = s | low
            child_ext = (ext | (adjm[v] & allowed)) & ~grown & ~excl
            yield from rec(grown, nb | adjm[v], child_ext, excl)
            excl |= low

    start = 1 << root
    yield from rec(start, adjm[root], adjm[root] & allowed & ~start, start)


def _model_search(g: Graph, pools: list[int], sides: list[int], needs: list[int], budget: SearchBudget):
    """Disjoint connected sets S_i meeting pools[i], with S_i adjacent to S_j
    for every j in needs[i] (j < i). Sets on one side are ordered by their
    least pool vertex. The final set is taken as a whole component.
    """
    k = len(pools)
    adjm = _adj_masks(g)
    full = (1 << g.n) - 1
    meter = budget.meter()
    later = [any(i in _bits(needs[j]) for j in range(i + 1, k)) for i in range(k)]

    def fits(i: int, nb: int, sets: list[int]) -> bool:
        return all(nb & sets[j] for j in _bits(needs[i]))

    def place(i: int, sets: list[int], used: int, last: dict[int, int]):
        if i == k - 1:
            for comp in _component_masks(adjm, full & ~used):
                meter.tick()
                if comp & pools[i] and fits(i, _nbr_union(adjm, comp), sets):
                    return sets + [comp]
            return None
        side = sides[i]
        lo = last.get(side, -1)
        for a in _bits(pools[i] & ~used & ~((1 << (lo + 1)) - 1)):
            allowed = full & ~used & ~(pools[i] & ((1 << a) - 1))
            done = None if later[i] else (lambda s, nb, i=i: fits(i, nb, sets))
            for s, nb in _connected_sets(adjm, a, allowed, done):
                meter.tick()
                if not fits(i, nb, sets):
                    continue
                found = place(i + 1, sets + [s], used | s, {**last, side: a})
                if found is not None:
                    return found
        return None

    if k == 0:
        return []
    return place(0, [], 0, {})


def _to_sets(masks: list[int]) -> list[frozenset[int]]:
    return [frozenset(_bits(m)) for m in masks]


# --- minors on vertex sets -------------------------------------------------

def kx_minor_on(g: Graph, U: Iterable[int], x: int, budget: SearchBudget = DEFAULT_BUDGET) -> MinorWitness | None:
    """A K_x minor every branch set of which meets U, or None if none exists."""
    U = sorted(set(U))
    if x < 1 or not U:
        raise ValueError("need x >= 1 and a nonempty U")
    if len(U) < x:
        return None
    if x == 1:
        return MinorWitness.complete([[U[0]]])
    pool = _mask(U)
    needs = [(1 << i) - 1 for i in range(x)]
    found = _model_search(g, [pool] * x, [0] * x, needs, budget)
    return None if found is None else MinorWitness.complete(_to_sets(found))


def bipartite_minor_on(
    g: Graph,
    uppers: Iterable[int],
    lowers: Iterable[int],
    x: int,
    y: int,
    budget: SearchBudget = DEFAULT_BUDGET,
) -> MinorWitness | None:
    """A K_{x,y} minor whose upper sets meet ``uppers`` and lower sets meet
    ``lowers``. An empty side constraint means any vertex will do.

    Branch sets 0..x-1 of the witness are the upper ones.
    """
    if x < 1 or y < 1:
        raise ValueError("both sides need at least one vertex")
    everything = (1 << g.n) - 1
    up = _mask(uppers) or everything
    lo = _mask(lowers) or everything
    upper_bits = (1 << x) - 1
    pools = [up] * x + [lo] * y
    sides = [0] * x + [1] * y
    needs = [0] * x + [upper_bits] * y
    found = _model_search(g, pools, sides, needs, budget)
    if found is None:
        return None
    sets = _to_sets(found)
    return MinorWitness.bipartite(sets[:x], sets[x:])


# --- extensions ----------------------------------------------------------------

@dataclass(frozen=True)
class TrackedSet:
    current: frozenset[int]
    history: tuple = field(default=())  # (MinorAction, relabel map) pairs

    @classmethod
    def of(cls, vs: Iterable[int]) -> TrackedSet:
        return cls(frozenset(vs))


def extend_set(ts: TrackedSet, g: Graph, a: MinorAction) -> tuple[TrackedSet, Graph]:
    """Apply ``a`` to ``g`` and carry the tracked set along by the extension rules.

    Returns the new tracked set and the reduced graph.
    """
    h, relabel = apply_minor_action(g, a)
    cur = set(ts.current)
    if a.kind == "delete-vertex" and a.u in cur:
        cur = (cur - {a.u}) | set(g.adj[a.u])
    moved = frozenset(relabel[v] for v in cur if v in relabel)
    return TrackedSet(moved, ts.history + ((a, relabel),)), h


# --- twin-cycles ---------------------------------------------------------------

@dataclass(frozen=True)
class TwinCycle:
    """Two cycles sharing the path ``shared`` between the crossing vertices.

    ``halves`` holds the other two crossing-to-crossing paths.
    """

    shared: tuple[int, ...]
    halves: tuple[tuple[int, ...], tuple[int, ...]]

    @property
    def crossing(self) -> tuple[int, int]:
        return (self.shared[0], self.shared[-1])

    @property
    def cycles(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        p = self.shared
        return tuple(p + tuple(reversed(h[1:-1])) for h in self.halves)

    def vertices(self) -> frozenset[int]:
        return frozenset(self.shared) | frozenset(self.halves[0]) | frozenset(self.halves[1])


def twin_cycle_problems(g: Graph, tc: TwinCycle, U: Iterable[int]) -> list[str]:
    U = set(U)
    problems = []
    paths = [tc.shared, *tc.halves]
    ends = {tc.shared[0], tc.shared[-1]}
    if len(ends) != 2:
        return ["crossing vertices coincide"]
    for p in paths:
        if {p[0], p[-1]} != ends:
            problems.append(f"path {p} does not join the crossing vertices")
        if len(p) < 3:
            problems.append(f"path {p} has no interior")
        for a, b in zip(p, p[1:]):
            if not g.has_edge(a, b):
                problems.append(f"missing edge {a}-{b}")
        if len(set(p)) != len(p):
            problems.append(f"path {p} repeats a vertex")
    interiors = [set(p[1:-1]) for p in paths]
    for i, j in itertools.combinations(range(3), 2):
        if interiors[i] & interiors[j]:
            problems.append("half-cycles share interior vertices")
    for p, inner in zip(paths, interiors):
        if not inner & U:
            problems.append(f"interior of {p} misses U")
    if not U <= tc.vertices():
        problems.append("U is not contained in the twin-cycle")
    return problems


def _paths_between(adjm, s: int, t: int, blocked: int) -> Iterator[tuple[int, ...]]:
    """Simple s-t paths with at least one interior vertex avoiding ``blocked``."""
    path = [s]

    def walk(v: int, seen: int):
        for w in _bits(adjm[v] & ~seen & ~blocked):
            if w == t:
                if len(path) > 1:
                    yield tuple(path) + (t,)
                continue
            path.append(w)
            yield from walk(w, seen | (1 << w))
            path.pop()

    yield from walk(s, (1 << s) | blocked)


def find_twin_cycle(g: Graph, U: Iterable[int], budget: SearchBudget = DEFAULT_BUDGET) -> TwinCycle | None:
    """A twin-cycle containing U with U in each half-cycle's interior, or None."""
    if g.n > PATH_SEARCH_CAP:
        raise BudgetExceeded(f"twin-cycle search is capped at n <= {PATH_SEARCH_CAP}")
    U = set(U)
    umask = _mask(U)
    adjm = _adj_masks(g)
    meter = budget.meter()
    for v1, v2 in itertools.combinations(range(g.n), 2):
        ends = (1 << v1) | (1 << v2)

        def pick(k: int, chosen: list[tuple[int, ...]], used: int, first: int):
            if k == 3:
                if umask & ~(used | ends):
                    return None
                return list(chosen)
            for p in _paths_between(adjm, v1, v2, used):
                meter.tick()
                if p[1] <= first:
                    continue
                inner = _mask(p[1:-1])
                if not inner & umask:
                    continue
                chosen.append(p)
                found = pick(k + 1, chosen, used | inner, p[1])
                chosen.pop()
                if found is not None:
                    return found
            return None

        found = pick(0, [], 0, -1)
        if found is not None:
            return TwinCycle(found[0], (found[1], found[2]))
    return None


# --- cycles ----------------------------------------------------------------------

def _cycle_arc(cy: Sequence[int], i: int, j: int) -> list[int]:
    """Positions i..j walking forward around the cycle, inclusive."""
    n = len(cy)
    out = [cy[i]]
    k = i
    while k != j:
        k = (k + 1) % n
        out.append(cy[k])
    return out


def reform_cycle(g: Graph, cy: Sequence[int], U: Iterable[int]) -> list[int]:
    """Grow the cycle's share of U by rerouting one U-free arc through a new U vertex.

    The lowest admissible u is used. Among its attachment pairs the longest
    U-free arc is replaced (ties: lexicographic on the new cycle). The result
    starts at u and heads to the smaller attachment first.
    """
    cy = list(cy)
    U = set(U)
    if len(set(cy)) != len(cy) or len(cy) < 3:
        raise StructureError("not a simple cycle")
    for a, b in zip(cy, cy[1:] + cy[:1]):
        if not g.has_edge(a, b):
            raise StructureError(f"cycle edge {a}-{b} missing")
    on = set(cy)
    adjm = _adj_masks(g)
    cmask = _mask(cy)
    pos = {v: i for i, v in enumerate(cy)}
    for u in sorted(U - on):
        best = None
        # two disjoint paths from u to distinct cycle vertices, interiors off the cycle
        reach: dict[int, list[tuple[int, ...]]] = {}

        def walk(path: list[int], seen: int):
            v = path[-1]
            for w in _bits(adjm[v] & ~seen):
                if cmask >> w & 1:
                    reach.setdefault(w, []).append(tuple(path) + (w,))
                else:
                    path.append(w)
                    walk(path, seen | (1 << w))
                    path.pop()

        walk([u], (1 << u))
        for p, q in itertools.combinations(sorted(reach), 2):
            for i, j in ((pos[p], pos[q]), (pos[q], pos[p])):
                arc = _cycle_arc(cy, i, j)
                if set(arc[1:-1]) & U:
                    continue
                keep = _cycle_arc(cy, j, i)
                for pp in reach[p]:
                    for qq in reach[q]:
                        if set(pp[1:]) & set(qq[1:]):
                            continue
                        # u -> arc end, kept arc back to arc start, then home to u
                        start, end = arc[0], arc[-1]
                        to_start = pp if start == p else qq
                        to_end = qq if start == p else pp
                        new = list(to_end) + keep[1:-1] + list(reversed(to_start))[:-1]
                        new = min(new, [new[0]] + new[:0:-1])
                        if len(set(new)) != len(new):
                            continue
                        key = (-(len(arc) - 2), new)
                        if best is None or key < best[0]:
                            best = (key, new)
        if best is not None:
            return best[1]
    raise NoProgress("no vertex of U can be brought onto the cycle")


def cycle_through(g: Graph, U: Iterable[int], budget: SearchBudget = DEFAULT_BUDGET) -> list[int] | None:
    """A simple cycle (as an open vertex list) containing every vertex of U."""
    U = set(U)
    if not U:
        raise ValueError("U must be nonempty")
    if g.n > PATH_SEARCH_CAP:
        raise BudgetExceeded(f"cycle search is capped at n <= {PATH_SEARCH_CAP}")
    adjm = _adj_masks(g)
    umask = _mask(U)
    s = min(U)
    meter = budget.meter()
    path = [s]

    def walk(v: int, seen: int):
        meter.tick()
        if len(path) >= 3 and adjm[v] >> s & 1 and umask & ~seen == 0:
            return list(path)
        for w in _bits(adjm[v] & ~seen):
            path.append(w)
            found = walk(w, seen | (1 << w))
            path.pop()
            if found is not None:
                return found
        return None

    return walk(s, 1 << s)


# --- admissive contraction -------------------------------------------------------

@dataclass(frozen=True)
class EquivRelation:
    blocks: tuple[frozenset[int], ...]

    @classmethod
    def of(cls, blocks: Iterable[Iterable[int]]) -> EquivRelation:
        bs = [frozenset(b) for b in blocks]
        if any(not b for b in bs):
            raise ValueError("empty block")
        for a, b in itertools.combinations(bs, 2):
            if a & b:
                raise ValueError("blocks overlap")
        return cls(tuple(sorted(bs, key=min)))

    @classmethod
    def identity(cls, S: Iterable[int]) -> EquivRelation:
        return cls.of([v] for v in S)

    @property
    def support(self) -> frozenset[int]:
        return frozenset().union(*self.blocks) if self.blocks else frozenset()

    def is_admissive(self, g: Graph) -> bool:
        return not any(g.has_edge(a, b) for blk in self.blocks for a, b in itertools.combinations(sorted(blk), 2))


def abs_contract(g: Graph, S: Iterable[int], R: EquivRelation) -> tuple[Graph, dict[int, int]]:
    """Contract each block of R to one super-vertex.

    Returns the graph and a map from old ids to new ids.
    """
    S = frozenset(S)
    if R.support != S:
        raise ValueError("relation does not partition S")
    if not R.is_admissive(g):
        raise AdmissivityError("equivalent vertices are adjacent")
    rep = {v: v for v in range(g.n)}
    for blk in R.blocks:
        r = min(blk)
        for v in blk:
            rep[v] = r
    survivors = sorted(set(rep.values()))
    index = {v: i for i, v in enumerate(survivors)}
    relabel = {v: index[rep[v]] for v in range(g.n)}
    edges = {(min(relabel[a], relabel[b]), max(relabel[a], relabel[b])) for a, b in g.edges()}
    return Graph.from_edges(len(survivors), [e for e in edges if e[0] != e[1]]), relabel


def _set_partitions(items: list[int]) -> Iterator[list[list[int]]]:
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[head]] + part
        for i in range(len(part)):
            yield part[:i] + [[head] + part[i]] + part[i + 1:]


def admissive_relations(g: Graph, W: Iterable[int]) -> list[EquivRelation]:
    """All admissive relations on W, fewest blocks first, then lexicographic."""
    W = sorted(set(W))
    if len(W) > 6:
        raise BudgetExceeded("relation enumeration is capped at |W| <= 6")
    out = []
    for part in _set_partitions(W):
        r = EquivRelation.of(part)
        if r.is_admissive(g):
            out.append(r)
    out.sort(key=lambda r: (len(r.blocks), [sorted(b) for b in r.blocks]))
    return out


def _rooted_clique_on_side(g: Graph, side: list[int], W: list[int], R: EquivRelation, meter) -> list[frozenset[int]] | None:
    blocks = list(R.blocks)
    k = len(blocks)
    region = set(side) | set(W)
    sub_adj = {v: g.adj[v] & region for v in region}
    order = list(side)
    owner: dict[int, int] = {}
    for i, blk in enumerate(blocks):
        for v in blk:
            owner[v] = i

    def check() -> list[frozenset[int]] | None:
        sets = [set() for _ in range(k)]
        for v, i in owner.items():
            sets[i].add(v)
        for s in sets:
            start = next(iter(s))
            seen = {start}
            stack = [start]
            while stack:
                x = stack.pop()
                for y in sub_adj[x]:
                    if y in s and y not in seen:
                        seen.add(y)
                        stack.append(y)
            if seen != s:
                return None
        for i, j in itertools.combinations(range(k), 2):
            if not any(sub_adj[x] & sets[j] for x in sets[i]):
                return None
        return [frozenset(s) for s in sets]

    def assign(idx: int):
        meter.tick()
        if idx == len(order):
            return check()
        v = order[idx]
        for i in range(-1, k):
            if i >= 0:
                owner[v] = i
            found = assign(idx + 1)
            if i >= 0:
                del owner[v]
            if found is not None:
                return found
        return None

    return assign(0)


def is_consistent_cut_set(g: Graph, W: Iterable[int], R: EquivRelation, budget: SearchBudget = DEFAULT_BUDGET) -> bool:
    """Whether both chosen sides of the cut can realize abs_R(W) as a clique.

    The first side is the component of g - W holding the smallest vertex;
    the second is the union of the remaining components.
    """
    W = sorted(set(W))
    if R.support != frozenset(W):
        raise ValueError("relation does not partition W")
    if not R.is_admissive(g):
        raise AdmissivityError("equivalent vertices are adjacent")
    comps = components_without(g, W)
    if len(comps) < 2:
        raise StructureError("W is not a cut set")
    sides = [comps[0], sorted(v for c in comps[1:] for v in c)]
    meter = budget.meter()
    return all(_rooted_clique_on_side(g, side, W, R, meter) is not None for side in sides)


def consistent_cut_models(g: Graph, W: Iterable[int], R: EquivRelation, budget: SearchBudget = DEFAULT_BUDGET):
    """The branch sets realizing abs_R(W) on each side, or None."""
    W = sorted(set(W))
    comps = components_without(g, W)
    if len(comps) < 2:
        raise StructureError("W is not a cut set")
    sides = [comps[0], sorted(v for c in comps[1:] for v in c)]
    meter = budget.meter()
    out = []
    for side in sides:
        found = _rooted_clique_on_side(g, side, W, R, meter)
        if found is None:
            return None
        out.append(found)
    return out


def is_formal(g: Graph, U: Iterable[int], budget: SearchBudget = DEFAULT_BUDGET) -> bool:
    """No K5 and no K3,3 minor after adding an apex joined to exactly U."""
    U = sorted(set(U))
    if not U:
        raise ValueError("U must be nonempty")
    h = g.add_vertex(U)
    return not (oracle.minor_exists(h, oracle.K5, budget) or oracle.minor_exists(h, oracle.K33, budget))
