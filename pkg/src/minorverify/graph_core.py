"""Immutable labeled simple graphs, minor actions and connectivity queries."""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping


class GraphError(ValueError):
    """Base error for malformed graphs or invalid operations on them."""


class InvalidActionError(GraphError):
    pass


class UndefinedInputError(GraphError):
    pass


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on the dense vertex ids ``0..n-1``."""

    n: int
    adj: tuple[frozenset[int], ...]

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise GraphError("adjacency length does not match vertex count")
        for v, nbrs in enumerate(self.adj):
            for w in nbrs:
                if w == v:
                    raise GraphError(f"self-loop at {v}")
                if not 0 <= w < self.n:
                    raise GraphError(f"neighbor {w} of {v} out of range")
                if v not in self.adj[w]:
                    raise GraphError(f"asymmetric edge {v}-{w}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {u}-{v} out of range")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(frozenset(s) for s in nbrs))

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, tuple(frozenset() for _ in range(n)))

    @classmethod
    def complete(cls, n: int) -> Graph:
        return cls.from_edges(n, itertools.combinations(range(n), 2))

    @classmethod
    def cycle(cls, n: int) -> Graph:
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def path(cls, n: int) -> Graph:
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def complete_bipartite(cls, a: int, b: int) -> Graph:
        return cls.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])

    @classmethod
    def wheel(cls, rim: int) -> Graph:
        """Hub 0 joined to the cycle 1..rim."""
        edges = [(0, i) for i in range(1, rim + 1)]
        edges += [(i, i % rim + 1) for i in range(1, rim + 1)]
        return cls.from_edges(rim + 1, edges)

    @property
    def vertices(self) -> range:
        return range(self.n)

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u in range(self.n) for v in self.adj[u] if u < v)

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self.adj) // 2

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return 0 <= u < self.n and v in self.adj[u]

    def induced(self, keep: Iterable[int]) -> tuple[Graph, dict[int, int]]:
        """Subgraph on ``keep`` with ids re-densified in increasing order."""
        kept = sorted(set(keep))
        relabel = {v: i for i, v in enumerate(kept)}
        adj = tuple(frozenset(relabel[w] for w in self.adj[v] if w in relabel) for v in kept)
        return Graph(len(kept), adj), relabel

    def remove_vertices(self, drop: Iterable[int]) -> tuple[Graph, dict[int, int]]:
        dropped = set(drop)
        return self.induced(v for v in range(self.n) if v not in dropped)

    def add_edges(self, edges: Iterable[tuple[int, int]]) -> Graph:
        return Graph.from_edges(self.n, itertools.chain(self.edges(), edges))

    def add_vertex(self, nbrs: Iterable[int]) -> Graph:
        """Append a vertex with id ``n`` adjacent to ``nbrs``."""
        return Graph.from_edges(self.n + 1, itertools.chain(self.edges(), ((v, self.n) for v in nbrs)))

    def is_connected_on(self, verts: Iterable[int]) -> bool:
        vs = set(verts)
        if not vs:
            return True
        start = next(iter(vs))
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in self.adj[v]:
                if w in vs and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(vs)

    def is_connected(self) -> bool:
        return self.is_connected_on(range(self.n))

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges()]}

    @classmethod
    def from_json(cls, data: Mapping | str) -> Graph:
        if isinstance(data, str):
            data = json.loads(data)
        return cls.from_edges(int(data["n"]), (tuple(e) for e in data["edges"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


def read_edge_list(text: str, n: int | None = None) -> Graph:
    """Parse ``u v`` lines; blank lines and ``#`` comments are skipped."""
    edges = []
    top = -1
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) == 1:
            top = max(top, int(parts[0]))
            continue
        u, v = int(parts[0]), int(parts[1])
        edges.append((u, v))
        top = max(top, u, v)
    return Graph.from_edges(top + 1 if n is None else n, edges)


def write_edge_list(g: Graph) -> str:
    lines = [f"{u} {v}" for u, v in g.edges()]
    # isolated vertices would otherwise be lost on re-read
    covered = {x for e in g.edges() for x in e}
    lines += [str(v) for v in range(g.n) if v not in covered]
    return "\n".join(lines) + ("\n" if lines else "")


@dataclass(frozen=True)
class MinorAction:
    kind: str  # "delete-vertex" | "delete-edge" | "contract-edge"
    u: int
    v: int | None = None

    @classmethod
    def delete_vertex(cls, v: int) -> MinorAction:
        return cls("delete-vertex", v)

    @classmethod
    def delete_edge(cls, u: int, v: int) -> MinorAction:
        return cls("delete-edge", min(u, v), max(u, v))

    @classmethod
    def contract_edge(cls, u: int, v: int) -> MinorAction:
        return cls("contract-edge", min(u, v), max(u, v))

    def to_json(self) -> list:
        return [self.kind, self.u] if self.v is None else [self.kind, self.u, self.v]

    @classmethod
    def from_json(cls, data) -> MinorAction:
        return cls(data[0], data[1], data[2] if len(data) > 2 else None)


def apply_minor_action(g: Graph, a: MinorAction) -> tuple[Graph, dict[int, int]]:
    """Apply ``a``; return the new graph and a map from old ids to new ids.

    Deleted vertices are absent from the map. After a contraction both
    endpoints map to the merged vertex.
    """
    if a.kind == "delete-vertex":
        if not 0 <= a.u < g.n:
            raise InvalidActionError(f"no vertex {a.u}")
        return g.remove_vertices([a.u])
    if a.kind not in ("delete-edge", "contract-edge"):
        raise InvalidActionError(f"unknown action {a.kind!r}")
    if a.v is None or not g.has_edge(a.u, a.v):
        raise InvalidActionError(f"no edge {a.u}-{a.v}")
    if a.kind == "delete-edge":
        edges = [e for e in g.edges() if e != (min(a.u, a.v), max(a.u, a.v))]
        return Graph.from_edges(g.n, edges), {v: v for v in range(g.n)}
    keep, gone = min(a.u, a.v), max(a.u, a.v)
    merged_nbrs = (g.adj[keep] | g.adj[gone]) - {keep, gone}
    edges = [(x, y) for x, y in g.edges() if gone not in (x, y) and keep not in (x, y)]
    edges += [(keep, w) for w in merged_nbrs]
    survivors = [v for v in range(g.n) if v != gone]
    relabel = {v: i for i, v in enumerate(survivors)}
    relabel[gone] = relabel[keep]
    return Graph.from_edges(len(survivors), ((relabel[x], relabel[y]) for x, y in edges)), relabel


def components(g: Graph) -> list[list[int]]:
    seen = [False] * g.n
    out = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in g.adj[v]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        out.append(sorted(comp))
    return out


def components_without(g: Graph, removed: Iterable[int]) -> list[list[int]]:
    """Components of ``g - removed`` in original ids."""
    gone = set(removed)
    seen = set(gone)
    out = []
    for s in range(g.n):
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        stack = [s]
        while stack:
            v = stack.pop()
            for w in g.adj[v]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        out.append(sorted(comp))
    return out


def separates(g: Graph, s: Iterable[int]) -> bool:
    return len(components_without(g, s)) > 1


CONNECTIVITY_BRUTE_FORCE_CAP = 16


def vertex_connectivity(g: Graph) -> int:
    """Largest k such that removing any k-1 vertices leaves g connected.

    Complete graphs K_m return m-1.
    """
    if g.n == 0:
        raise UndefinedInputError("connectivity of the empty graph is undefined")
    if not g.is_connected():
        return 0
    if g.n > CONNECTIVITY_BRUTE_FORCE_CAP:
        import networkx as nx

        h = nx.Graph()
        h.add_nodes_from(range(g.n))
        h.add_edges_from(g.edges())
        return nx.node_connectivity(h)
    for size in range(1, g.n - 1):
        for s in itertools.combinations(range(g.n), size):
            if separates(g, s):
                return size
    return g.n - 1


def find_cut_sets(g: Graph, max_size: int) -> list[frozenset[int]]:
    """Inclusion-minimal separating sets of size <= max_size.

    Ordered by size, then lexicographically.
    """
    found: list[frozenset[int]] = []
    for size in range(1, min(max_size, g.n - 2) + 1):
        for s in itertools.combinations(range(g.n), size):
            fs = frozenset(s)
            if any(f < fs for f in found):
                continue
            if separates(g, s):
                found.append(fs)
    return found


def bfs_distances(g: Graph, source: int, allowed: set[int] | None = None) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in g.adj[v]:
            if w not in dist and (allowed is None or w in allowed):
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def to_networkx(g: Graph):
    import networkx as nx

    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def from_networkx(h) -> tuple[Graph, dict]:
    nodes = sorted(h.nodes())
    index = {v: i for i, v in enumerate(nodes)}
    return Graph.from_edges(len(nodes), ((index[a], index[b]) for a, b in h.edges())), index
