"""Brute-force ground truth: chromatic numbers, coloring enumeration,
arbitrary minor search and forbidden-minor class membership.

Nothing here is shared with the branch-set searches in ``minor_lab``.
The minor search works on graphs encoded as tuples of neighbor bitmasks
and recurses through single deletions and contractions, with a memo
shared across calls for the same pattern.
"""

from __future__ import annotations

from typing import Iterator

from .graph_core import Graph
from .witness import DEFAULT_BUDGET, BudgetExceeded, BudgetMeter, MinorWitness, SearchBudget

__all__ = [
    "BudgetExceeded",
    "SearchBudget",
    "chromatic_number",
    "enumerate_colorings",
    "has_minor",
    "minor_exists",
    "class_membership",
    "forbidden_minor_witness",
    "is_outerplanar",
    "is_planar",
    "K4",
    "K5",
    "K23",
    "K33",
]

COLORING_CAP = 12
ENUMERATION_CAP = 10

K4 = Graph.complete(4)
K5 = Graph.complete(5)
K23 = Graph.complete_bipartite(2, 3)
K33 = Graph.complete_bipartite(3, 3)


# --- coloring -------------------------------------------------------------

def _colorable(adj: tuple[frozenset[int], ...], k: int, meter: BudgetMeter) -> bool:
    n = len(adj)
    color = [0] * n

    def place(v: int, used: int) -> bool:
        if v == n:
            return True
        meter.tick()
        taken = {color[w] for w in adj[v] if w < v}
        # colors above used+1 are symmetric to used+1
        for c in range(1, min(k, used + 1) + 1):
            if c not in taken:
                color[v] = c
                if place(v + 1, max(used, c)):
                    return True
        color[v] = 0
        return False

    return place(0, 0)


def chromatic_number(g: Graph, budget: SearchBudget = DEFAULT_BUDGET) -> int:
    if g.n > COLORING_CAP:
        raise BudgetExceeded(f"chromatic_number is capped at n <= {COLORING_CAP}")
    if g.n == 0:
        return 0
    meter = budget.meter()
    k = 1
    while not _colorable(g.adj, k, meter):
        k += 1
    return k


def enumerate_colorings(g: Graph, k: int, budget: SearchBudget = DEFAULT_BUDGET) -> Iterator[dict[int, int]]:
    """All proper colorings with colors from 1..k, lexicographic by vertex id."""
    if g.n > ENUMERATION_CAP:
        raise BudgetExceeded(f"enumerate_colorings is capped at n <= {ENUMERATION_CAP}")
    meter = budget.meter()
    n = g.n
    color = [0] * n

    def walk(v: int):
        if v == n:
            yield dict(enumerate(color))
            return
        meter.tick()
        taken = {color[w] for w in g.adj[v] if w < v}
        for c in range(1, k + 1):
            if c not in taken:
                color[v] = c
                yield from walk(v + 1)
        color[v] = 0

    yield from walk(0)


# --- minor search -----------------------------------------------------------

def _masks(g: Graph) -> tuple[int, ...]:
    return tuple(sum(1 << w for w in g.adj[v]) for v in range(g.n))


def _drop_bit(mask: int, v: int) -> int:
    low = mask & ((1 << v) - 1)
    return low | ((mask >> (v + 1)) << v)


def _delete(adj: tuple[int, ...], v: int) -> tuple[int, ...]:
    return tuple(_drop_bit(m, v) for i, m in enumerate(adj) if i != v)


def _contract(adj: tuple[int, ...], u: int, v: int) -> tuple[int, ...]:
    # u < v; the merged vertex keeps position u
    merged = (adj[u] | adj[v]) & ~((1 << u) | (1 << v))
    out = list(adj)
    out[u] = merged
    bit_u = 1 << u
    m = merged
    while m:
        low = m & -m
        w = low.bit_length() - 1
        out[w] |= bit_u
        m ^= low
    return _delete(tuple(out), v)


def _edge_total(adj: tuple[int, ...]) -> int:
    return sum(m.bit_count() for m in adj) // 2


class _PatternSearch:
    """Deletion/contraction recursion for one fixed pattern graph."""

    MEMO_LIMIT = 3_000_000

    def __init__(self, h: Graph):
        self.h = h
        self.hn = h.n
        self.hm = h.edge_count
        self.h_nbrs = [sorted(h.adj[i]) for i in range(h.n)]
        self.h_deg = sorted((h.degree(i) for i in range(h.n)), reverse=True)
        # place high-degree pattern vertices first
        self.h_order = sorted(range(h.n), key=lambda i: (-h.degree(i), i))
        self.memo: dict[tuple[int, ...], bool] = {}

    def spanning_map(self, adj: tuple[int, ...]) -> list[int] | None:
        """Bijection pattern -> host preserving pattern edges, if any."""
        n = len(adj)
        deg = [m.bit_count() for m in adj]
        if any(a < b for a, b in zip(sorted(deg, reverse=True), self.h_deg)):
            return None
        image = [-1] * self.hn
        used = 0
        order = self.h_order

        def place(idx: int) -> bool:
            nonlocal used
            if idx == self.hn:
                return True
            i = order[idx]
            need = 0
            for j in self.h_nbrs[i]:
                if image[j] >= 0:
                    need |= 1 << image[j]
            di = len(self.h_nbrs[i])
            for x in range(n):
                if used >> x & 1 or deg[x] < di or (adj[x] & need) != need:
                    continue
                image[i] = x
                used |= 1 << x
                if place(idx + 1):
                    return True
                used &= ~(1 << x)
                image[i] = -1
            return False

        return image if place(0) else None

    def exists(self, adj: tuple[int, ...], meter: BudgetMeter, top: bool = False) -> bool:
        n = len(adj)
        if n < self.hn or _edge_total(adj) < self.hm:
            return False
        if n == self.hn:
            hit = self.memo.get(adj)
            if hit is None:
                hit = self.spanning_map(adj) is not None
                self._store(adj, hit)
            return hit
        if not top:
            hit = self.memo.get(adj)
            if hit is not None:
                return hit
        meter.tick()
        found = any(self.exists(child, meter) for child, _ in self.children(adj))
        if not top:
            self._store(adj, found)
        return found

    def _store(self, key, value):
        if len(self.memo) > self.MEMO_LIMIT:
            self.memo.clear()
        self.memo[key] = value

    @staticmethod
    def children(adj: tuple[int, ...]):
        n = len(adj)
        for v in range(n):
            yield _delete(adj, v), ("d", v)
        for u in range(n):
            m = adj[u] >> (u + 1)
            v = u + 1
            while m:
                if m & 1:
                    yield _contract(adj, u, v), ("c", u, v)
                m >>= 1
                v += 1

    def witness(self, adj: tuple[int, ...], meter: BudgetMeter) -> MinorWitness | None:
        if not self.exists(adj, meter, top=True):
            return None
        branch: list[frozenset[int]] = [frozenset([v]) for v in range(len(adj))]
        while len(adj) > self.hn:
            for child, step in self.children(adj):
                if self.exists(child, meter):
                    if step[0] == "d":
                        del branch[step[1]]
                    else:
                        _, u, v = step
                        branch[u] = branch[u] | branch[v]
                        del branch[v]
                    adj = child
                    break
            else:  # pragma: no cover - exists() said yes
                raise AssertionError("minor search lost its witness")
        image = self.spanning_map(adj)
        assert image is not None
        return MinorWitness.build([branch[image[i]] for i in range(self.hn)], self.h.edges())


_SEARCHES: dict[tuple, _PatternSearch] = {}


def _search_for(h: Graph) -> _PatternSearch:
    key = (h.n, tuple(h.edges()))
    s = _SEARCHES.get(key)
    if s is None:
        s = _SEARCHES[key] = _PatternSearch(h)
    return s


def has_minor(g: Graph, h: Graph, budget: SearchBudget = DEFAULT_BUDGET) -> MinorWitness | None:
    """A witness that ``h`` is a minor of ``g``, or None when exhaustively absent."""
    return _search_for(h).witness(_masks(g), budget.meter())


def minor_exists(g: Graph, h: Graph, budget: SearchBudget = DEFAULT_BUDGET) -> bool:
    return _search_for(h).exists(_masks(g), budget.meter(), top=True)


CLASS_CAP = 10

_FORBIDDEN = {"outerplanar": (K4, K23), "planar": (K5, K33)}


def class_membership(g: Graph, cls: str, budget: SearchBudget = DEFAULT_BUDGET) -> bool:
    """Wagner-style membership test by forbidden-minor search."""
    if cls not in _FORBIDDEN:
        raise ValueError(f"unknown class {cls!r}")
    if g.n > CLASS_CAP:
        raise BudgetExceeded(f"class_membership is capped at n <= {CLASS_CAP}")
    return not any(minor_exists(g, h, budget) for h in _FORBIDDEN[cls])


def forbidden_minor_witness(g: Graph, cls: str, budget: SearchBudget = DEFAULT_BUDGET):
    """(pattern name, witness) for the first forbidden minor found, else None."""
    names = {"outerplanar": ("K4", "K2,3"), "planar": ("K5", "K3,3")}[cls]
    for name, h in zip(names, _FORBIDDEN[cls]):
        w = has_minor(g, h, budget)
        if w is not None:
            return name, w
    return None


def is_outerplanar(g: Graph, budget: SearchBudget = DEFAULT_BUDGET) -> bool:
    return class_membership(g, "outerplanar", budget)


def is_planar(g: Graph, budget: SearchBudget = DEFAULT_BUDGET) -> bool:
    return class_membership(g, "planar", budget)
