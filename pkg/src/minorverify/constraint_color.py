"""Color collections, cluster constraint systems, constraint graphs and the
constrained coloring procedures built on vertex peeling.

Two fixed modes exist. ``p3a2`` (palette 3, collections of 2 colors) works
on wing-1 embeddings; ``p4a3`` (palette 4, collections of 3 colors) works on
planar graphs with a boundary walk. In both modes a collection is the palette
minus one color, so a cluster's collection is read off the color of its
cluster-vertex: the cluster avoids that color.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from . import oracle
from .coloring import ColorAssignment, ColoringError, InfeasibleError, PreconditionError
from .graph_core import Graph, GraphError
from .witness import DEFAULT_BUDGET, BudgetExceeded, SearchBudget
from .wing import (
    WALK_CHECK_CAP,
    NotOuterplanar,
    Trace,
    WingEmbedding,
    build_wing1,
    is_wing1,
    trace_check,
    vertex_related_sets,
)

MODES = {"p3a2": (3, 2), "p4a3": (4, 3)}
BRUTE_FORCE_CAP = 8
READINGS = ("inclusive", "exclusive")


class ConstraintError(ValueError):
    pass


class ConstraintSystemError(ConstraintError):
    """A system broke the structural rules; ``violations`` lists each one."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


# --- collections ------------------------------------------------------------

@dataclass(frozen=True)
class Collection:
    palette: int
    arity: int
    colors: frozenset[int]

    def __post_init__(self):
        if not 0 <= self.arity <= self.palette:
            raise ConstraintError(f"arity {self.arity} outside 0..{self.palette}")
        if any(not 1 <= c <= self.palette for c in self.colors):
            raise ConstraintError(f"colors {sorted(self.colors)} not inside 1..{self.palette}")
        if len(self.colors) > self.arity:
            raise ConstraintError(f"{len(self.colors)} colors exceed arity {self.arity}")

    @classmethod
    def of(cls, colors: Iterable[int], palette: int, arity: int) -> Collection:
        return cls(palette, arity, frozenset(colors))

    @property
    def mode(self) -> tuple[int, int]:
        return (self.palette, self.arity)


def expand_collection(c: Collection) -> set[frozenset[int]]:
    """Every full-arity superset of ``c.colors`` inside the palette."""
    rest = [x for x in range(1, c.palette + 1) if x not in c.colors]
    return {c.colors | frozenset(extra) for extra in itertools.combinations(rest, c.arity - len(c.colors))}


def _expand_all(cs) -> tuple[tuple[int, int], set[frozenset[int]]]:
    if isinstance(cs, Collection):
        cs = [cs]
    cs = list(cs)
    if not cs:
        raise ConstraintError("an empty set of collections has no mode")
    modes = {c.mode for c in cs}
    if len(modes) != 1:
        raise ConstraintError("collections of different modes")
    out: set[frozenset[int]] = set()
    for c in cs:
        out |= expand_collection(c)
    return modes.pop(), out


def consistent(c1, c2) -> bool:
    """False exactly when each side has a full collection the other lacks."""
    m1, e1 = _expand_all(c1)
    m2, e2 = _expand_all(c2)
    if m1 != m2:
        raise ConstraintError(f"mode mismatch {m1} vs {m2}")
    return not (e1 - e2 and e2 - e1)


# --- constraint systems ---------------------------------------------------------

@dataclass(frozen=True)
class ConstraintSystem:
    mode: str
    clusters: tuple[tuple[int, ...], ...]
    relations: tuple[tuple[int, int, str], ...] = ()
    divisions: tuple[tuple[int, ...], ...] = ()

    @classmethod
    def build(cls, mode, clusters, relations=(), divisions=None) -> ConstraintSystem:
        clusters = tuple(tuple(c) for c in clusters)
        rels = tuple((int(i), int(j), str(k)) for i, j, k in relations)
        if divisions is None:
            divisions = [list(range(len(clusters)))] if clusters else []
        return cls(mode, clusters, rels, tuple(tuple(d) for d in divisions))

    @property
    def palette(self) -> int:
        return MODES[self.mode][0]

    @property
    def arity(self) -> int:
        return MODES[self.mode][1]

    def groups(self) -> list[tuple[int, ...]]:
        """Clusters sharing a cluster-vertex through eq relations, by least member."""
        return [tuple(sorted(g)) for g in _eq_groups(range(len(self.clusters)), self.relations)]

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "clusters": [list(c) for c in self.clusters],
            "relations": [[i, j, k] for i, j, k in self.relations],
            "divisions": [list(d) for d in self.divisions],
        }

    @classmethod
    def from_json(cls, data: Mapping | str) -> ConstraintSystem:
        if isinstance(data, str):
            data = json.loads(data)
        return cls.build(data["mode"], data["clusters"], data.get("relations", ()), data.get("divisions"))


def _eq_groups(ids: Iterable[int], relations) -> list[list[int]]:
    ids = list(ids)
    parent = {i: i for i in ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j, k in relations:
        if k == "eq" and i in parent and j in parent:
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    out: dict[int, list[int]] = {}
    for i in ids:
        out.setdefault(find(i), []).append(i)
    return sorted(out.values(), key=min)


def _has_clique(nodes: Sequence[int], edges: set[frozenset[int]], size: int) -> bool:
    if size <= 1:
        return bool(nodes) or size <= 0
    return any(
        all(frozenset(p) in edges for p in itertools.combinations(sub, 2))
        for sub in itertools.combinations(nodes, size)
    )


def _group_graph(cs: ConstraintSystem) -> tuple[dict[int, int], set[frozenset[int]]]:
    root = {}
    for g in cs.groups():
        for c in g:
            root[c] = g[0]
    edges = {
        frozenset((root[i], root[j]))
        for i, j, k in cs.relations
        if k == "neq" and i in root and j in root and root[i] != root[j]
    }
    return root, edges


def division_kind(cs: ConstraintSystem, d: Iterable[int]) -> int:
    """Size of the largest pairwise-neq family of cluster-vertices inside ``d``."""
    root, edges = _group_graph(cs)
    nodes = sorted({root[c] for c in d if c in root})
    x = 1
    while x < len(nodes) and _has_clique(nodes, edges, x + 1):
        x += 1
    return x if nodes else 0


def _clusters_on(cs: ConstraintSystem) -> dict[int, list[int]]:
    on: dict[int, list[int]] = {}
    for i, c in enumerate(cs.clusters):
        for v in c:
            on.setdefault(v, []).append(i)
    return on


def _division_of(cs: ConstraintSystem, members: list[int]) -> int | None:
    want = set(members)
    return next((k for k, d in enumerate(cs.divisions) if want <= set(d)), None)


def _contiguous(seq: Sequence[int], part: Sequence[int], cyclic: bool) -> bool:
    if not part:
        return True
    n = len(seq)
    pos = {v: i for i, v in enumerate(seq)}
    if any(v not in pos for v in part) or len(set(part)) != len(part):
        return False
    idx = [pos[v] for v in part]
    starts = range(n) if cyclic else [idx[0]]
    for s in starts:
        if all(idx[t] == (s + t) % n if cyclic else idx[t] == s + t for t in range(len(idx))):
            return True
    return False


def validate_system(cs: ConstraintSystem, graph: Graph | None = None, trace: Sequence[int] | None = None) -> list[str]:
    """Every structural rule the system breaks; empty when it conforms.

    Checks needing vertex positions use ``trace`` (outer vertices in line
    order for p3a2, a boundary walk for p4a3); the edge rule uses ``graph``.
    """
    out: list[str] = []
    if cs.mode not in MODES:
        return [f"unknown mode {cs.mode!r}"]
    palette, arity = MODES[cs.mode]
    k = len(cs.clusters)
    for i, c in enumerate(cs.clusters):
        if len(set(c)) != len(c):
            out.append(f"cluster {i} repeats a vertex")
        if graph is not None and any(not 0 <= v < graph.n for v in c):
            out.append(f"cluster {i} has vertices outside the graph")
    # consecutive clusters overlap on at most one vertex
    nonempty = [i for i in range(k) if cs.clusters[i]]
    for a, b in zip(nonempty, nonempty[1:]):
        if len(set(cs.clusters[a]) & set(cs.clusters[b])) > 1:
            out.append(f"clusters {a} and {b} overlap on more than one vertex")
    if trace is not None:
        trace = list(trace)
        cyclic = cs.mode == "p4a3"
        seq = trace[:-1] if cyclic and len(trace) > 1 and trace[0] == trace[-1] else trace
        for i in nonempty:
            if not _contiguous(seq, cs.clusters[i], cyclic and len(set(seq)) == len(seq)):
                if not (cyclic and set(cs.clusters[i]) <= set(seq)):
                    out.append(f"cluster {i} is not a continuous segment of the trace")
        if not cyclic:
            pos = {v: p for p, v in enumerate(seq)}
            spans = [(min(pos.get(v, -1) for v in cs.clusters[i]), max(pos.get(v, -1) for v in cs.clusters[i])) for i in nonempty]
            for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
                if s2 < e1:
                    out.append("clusters are not in trace order")
                    break
    # relations
    seen: dict[tuple[int, int], str] = {}
    for i, j, kind in cs.relations:
        if kind not in ("eq", "neq"):
            out.append(f"relation {i}-{j} has unknown kind {kind!r}")
            continue
        if not (0 <= i < k and 0 <= j < k) or i == j:
            out.append(f"relation {i}-{j} does not name two clusters")
            continue
        key = (min(i, j), max(i, j))
        if seen.get(key, kind) != kind:
            out.append(f"clusters {key[0]} and {key[1]} are both eq and neq")
        seen[key] = kind
        if cs.mode == "p3a2" and abs(i - j) != 1:
            out.append(f"relation {i}-{j} joins clusters that are not neighbors")
    pairs = sorted(seen)
    for (i, j), (x, y) in itertools.combinations(pairs, 2):
        if i < x < j < y or x < i < y < j:
            out.append(f"relations {i}-{j} and {x}-{y} cross")
    groups = cs.groups()
    root = {c: g[0] for g in groups for c in g}
    edges = set()
    for i, j, kind in cs.relations:
        if kind == "neq" and i in root and j in root:
            if root[i] == root[j]:
                out.append(f"clusters {i} and {j} are forced equal yet constrained different")
            else:
                edges.add(frozenset((root[i], root[j])))
    if _has_clique(sorted({g[0] for g in groups}), edges, palette):
        out.append(f"{palette} clusters are pairwise constrained different")
    # divisions
    if k and not cs.divisions:
        out.append("clusters are not grouped into divisions")
    covered: set[int] = set()
    for d_i, d in enumerate(cs.divisions):
        if not d:
            out.append(f"division {d_i} is empty")
            continue
        if any(not 0 <= c < k for c in d):
            out.append(f"division {d_i} names unknown clusters")
            continue
        if list(d) != list(range(d[0], d[0] + len(d))):
            out.append(f"division {d_i} is not a run of consecutive clusters")
        covered |= set(d)
        if division_kind(cs, d) > arity:
            out.append(f"division {d_i} needs more than {arity} collections")
    for d_i, (d1, d2) in enumerate(zip(cs.divisions, cs.divisions[1:])):
        if d1 and d2 and not (d2[0] in (d1[-1], d1[-1] + 1) and len(set(d1) & set(d2)) <= 1):
            out.append(f"divisions {d_i} and {d_i + 1} are not neighbors overlapping on at most one cluster")
    root_of = {c: g[0] for g in groups for c in g}
    for d_i, (d1, d2) in enumerate(zip(cs.divisions, cs.divisions[1:])):
        if any(not 0 <= c < k for c in (*d1, *d2)):
            continue
        r1, r2 = {root_of[c] for c in d1}, {root_of[c] for c in d2}
        if r1 <= r2 or r2 <= r1:
            out.append(f"divisions {d_i} and {d_i + 1} do not each own a cluster-vertex")
    if covered != set(range(k)):
        out.append(f"clusters {sorted(set(range(k)) - covered)} belong to no division")
    on = _clusters_on(cs)
    for v, members in sorted(on.items()):
        if cs.divisions and _division_of(cs, members) is None:
            out.append(f"clusters on vertex {v} are split across divisions")
    if graph is not None and cs.divisions:
        top = arity
        for a, b in graph.edges():
            if a not in on or b not in on:
                continue
            da, db = _division_of(cs, on[a]), _division_of(cs, on[b])
            if da is None or db is None:
                continue
            if division_kind(cs, cs.divisions[da]) == top and division_kind(cs, cs.divisions[db]) == top:
                if cs.mode == "p3a2" and abs(da - db) != 1:
                    out.append(f"edge {a}-{b} joins K{top} divisions {da} and {db} that are not neighbors")
                if cs.mode == "p4a3" and da == db:
                    out.append(f"edge {a}-{b} lies inside one K{top} division {da}")
    return out


def rewrite_singleton_neq(cs: ConstraintSystem, i: int, j: int) -> ConstraintSystem:
    """Replace neq(i, j), with cluster j a single vertex inside cluster i, by
    eq(i, j) plus neq(j, j') for a fresh copy j' of cluster j placed right after j."""
    ci, cj = cs.clusters[i], cs.clusters[j]
    if len(cj) != 1 or cj[0] not in ci:
        raise ConstraintError("cluster j must be a single vertex inside cluster i")
    key = {(min(i, j), max(i, j))}
    if not any((min(a, b), max(a, b)) in key and kd == "neq" for a, b, kd in cs.relations):
        raise ConstraintError(f"no neq relation between {i} and {j}")
    shift = lambda x: x + 1 if x > j else x  # noqa: E731
    clusters = list(cs.clusters[: j + 1]) + [cj] + list(cs.clusters[j + 1 :])
    rels = []
    for a, b, kd in cs.relations:
        if (min(a, b), max(a, b)) in key and kd == "neq":
            continue
        rels.append((shift(a), shift(b), kd))
    rels += [(shift(i), j, "eq"), (j, j + 1, "neq")]
    divisions = []
    for d in cs.divisions:
        nd = [shift(x) for x in d]
        if j in d:
            nd = sorted(set(nd) | {j + 1})
        divisions.append(nd)
    return ConstraintSystem.build(cs.mode, clusters, rels, divisions)


# --- constraint graphs --------------------------------------------------------

@dataclass(frozen=True)
class ConstraintGraph:
    graph: Graph
    base_n: int
    gamma: tuple[int, ...]  # cluster index -> cluster-vertex id
    groups: tuple[tuple[int, ...], ...]

    def gamma_vertices(self) -> range:
        return range(self.base_n, self.graph.n)


def _trace_order(trace) -> list[int]:
    if isinstance(trace, WingEmbedding):
        return list(trace.outer().outer)
    if isinstance(trace, Trace):
        return list(trace.walk)
    return list(trace)


def build_constraint_graph(g: Graph, trace, cs: ConstraintSystem) -> ConstraintGraph:
    """Add one cluster-vertex per eq-group, joined to its clusters, with an
    edge between cluster-vertices of neq clusters.

    For p3a2 ``trace`` is the WingEmbedding of ``g``; the result is checked to
    stay wing-1 with the cluster-vertices laid after the line in reverse.
    For p4a3 it is the boundary walk; the result is checked to stay planar
    with an outerplanar cluster-vertex part.
    """
    order = _trace_order(trace)
    problems = validate_system(cs, g, order)
    if problems:
        raise ConstraintSystemError(problems)
    groups = cs.groups()
    gamma = [0] * len(cs.clusters)
    for gi, grp in enumerate(groups):
        for c in grp:
            gamma[c] = g.n + gi
    edges = list(g.edges())
    for c, verts in enumerate(cs.clusters):
        edges.extend((v, gamma[c]) for v in verts)
    for i, j, kind in cs.relations:
        if kind == "neq":
            edges.append((gamma[i], gamma[j]))
    gct = Graph.from_edges(g.n + len(groups), set((min(a, b), max(a, b)) for a, b in edges))
    sub, _ = gct.induced(range(g.n, gct.n))
    if cs.mode == "p3a2":
        if isinstance(trace, WingEmbedding):
            layout = list(trace.order) + list(range(gct.n - 1, g.n - 1, -1))
            if not is_wing1(layout, gct):
                raise ConstraintSystemError(["constraint graph is not wing-1 after laying out cluster-vertices"])
        if _has_clique(list(sub.vertices), {frozenset(e) for e in sub.edges()}, 3):
            raise ConstraintSystemError(["cluster-vertices hold a triangle"])
    else:
        import networkx as nx

        from .graph_core import to_networkx

        if not nx.check_planarity(to_networkx(gct))[0]:
            raise ConstraintSystemError(["constraint graph is not planar"])
        if isinstance(build_wing1(sub), NotOuterplanar):
            raise ConstraintSystemError(["cluster-vertices do not form an outerplanar graph"])
    return ConstraintGraph(gct, g.n, tuple(gamma), tuple(groups))


# --- checking ----------------------------------------------------------------------

def division_violations(
    mode: str,
    divisions: Sequence[Sequence[int]],
    color_of: Mapping[int, int],
) -> list[str]:
    """Rule 1 (collection count per division) and, for p3a2, rule 2
    (neighbor divisions have inconsistent collection sets)."""
    palette, arity = MODES[mode]
    out = []
    sets = []
    for d_i, d in enumerate(divisions):
        used = {color_of[c] for c in d}
        sets.append(used)
        if len(used) > arity:
            out.append(f"division-1: division {d_i} uses {len(used)} collections")
    if mode == "p3a2":
        for d_i, (s1, s2) in enumerate(zip(sets, sets[1:])):
            if s1 <= s2 or s2 <= s1:
                out.append(f"division-2: divisions {d_i} and {d_i + 1} have consistent collection sets")
    return out


def check_solution(g: Graph, cs: ConstraintSystem, cl: ColorAssignment) -> list[str]:
    """Independent satisfaction check of a coloring of the constraint graph.

    Vertex ids ``0..n-1`` are the graph, ``n + k`` is the cluster-vertex of
    the k-th eq-group. Nothing from the solver is reused.
    """
    palette, _ = MODES[cs.mode]
    col = cl.mapping
    out = []
    if cl.palette > palette or any(c > palette for c in col.values()):
        out.append(f"more than {palette} colors")
    for v in range(g.n):
        if v not in col:
            out.append(f"vertex {v} uncolored")
    for a, b in g.edges():
        if a in col and b in col and col[a] == col[b]:
            out.append(f"edge {a}-{b} is monochromatic")
    groups = cs.groups()
    gcol = {}
    for gi, grp in enumerate(groups):
        if g.n + gi not in col:
            out.append(f"cluster-vertex of group {gi} uncolored")
            continue
        for c in grp:
            gcol[c] = col[g.n + gi]
    if out:
        return out
    for c, verts in enumerate(cs.clusters):
        if any(col[v] == gcol[c] for v in verts):
            out.append(f"cluster {c} uses the color its collection leaves out")
    for i, j, kind in cs.relations:
        if kind == "eq" and gcol[i] != gcol[j]:
            out.append(f"eq clusters {i},{j} have different collections")
        if kind == "neq" and gcol[i] == gcol[j]:
            out.append(f"neq clusters {i},{j} share a collection")
    out += division_violations(cs.mode, cs.divisions, gcol)
    return out


def _cluster_colorings(g: Graph, cs: ConstraintSystem, vcol: Mapping[int, int], with_divisions: bool) -> Iterator[dict[int, int]]:
    palette, _ = MODES[cs.mode]
    groups = cs.groups()
    root = {c: gi for gi, grp in enumerate(groups) for c in grp}
    allowed = []
    for grp in groups:
        bad = {vcol[v] for c in grp for v in cs.clusters[c]}
        allowed.append([x for x in range(1, palette + 1) if x not in bad])
    neq = [set() for _ in groups]
    for i, j, kind in cs.relations:
        if kind == "neq":
            neq[root[i]].add(root[j])
            neq[root[j]].add(root[i])
    pick = [0] * len(groups)

    def walk(gi):
        if gi == len(groups):
            gcol = {c: pick[root[c]] for c in range(len(cs.clusters))}
            if not with_divisions or not division_violations(cs.mode, cs.divisions, gcol):
                yield dict(enumerate(pick))
            return
        for x in allowed[gi]:
            if all(pick[o] != x for o in neq[gi] if o < gi):
                pick[gi] = x
                yield from walk(gi + 1)
        pick[gi] = 0

    yield from walk(0)


def brute_force_solution(g: Graph, cs: ConstraintSystem, with_divisions: bool = True) -> ColorAssignment | None:
    """Search every coloring of the graph, then every cluster-vertex choice."""
    if g.n > BRUTE_FORCE_CAP:
        raise oracle.BudgetExceeded(f"brute force is capped at n <= {BRUTE_FORCE_CAP}")
    palette, _ = MODES[cs.mode]
    touched = sorted({v for c in cs.clusters for v in c})
    tried = set()
    for vcol in oracle.enumerate_colorings(g, palette):
        key = tuple(vcol[v] for v in touched)
        if key in tried:
            continue
        tried.add(key)
        for pick in _cluster_colorings(g, cs, vcol, with_divisions):
            full = dict(vcol)
            full.update({g.n + gi: x for gi, x in pick.items()})
            return ColorAssignment.of(full, palette)
    return None


# --- the peeling engine -----------------------------------------------------------

@dataclass(frozen=True)
class FailureTrace:
    mode: str
    rule: str
    detail: str
    peel: tuple[int, ...]
    level: int
    snapshot: dict
    reading: str | None = None

    def to_json(self) -> dict:
        return {
            "format": 1,
            "mode": self.mode,
            "rule": self.rule,
            "detail": self.detail,
            "peel": list(self.peel),
            "level": self.level,
            "reading": self.reading,
            "snapshot": self.snapshot,
        }


@dataclass
class _Level:
    alive: frozenset[int]
    clusters: dict[int, frozenset[int]]
    order: list[int]
    relations: set[tuple[int, int, str]]
    divisions: list[list[int]]
    peeled: int | None = None
    new_id: int | None = None
    vanished: list[int] = field(default_factory=list)
    boundary: frozenset[int] = frozenset()

    def snapshot(self) -> dict:
        return {
            "alive": sorted(self.alive),
            "clusters": {str(c): sorted(self.clusters[c]) for c in self.order},
            "relations": sorted([list(r) for r in self.relations]),
            "divisions": [list(d) for d in self.divisions],
        }


class _Blocked(Exception):
    def __init__(self, rule: str, detail: str):
        super().__init__(detail)
        self.rule = rule
        self.detail = detail


class _Engine:
    """Peel one vertex at a time down to a single vertex, then restore.

    Restoring the peeled vertex v gives it the color of the cluster-vertex of
    the cluster on N(v), then picks colors for the cluster-vertices that
    vanished with v. The first choice meeting every collection and division
    rule at that level wins; there is no backtracking across levels.
    """

    def __init__(self, g: Graph, mode: str, reading: str | None = None):
        self.g = g
        self.mode = mode
        self.palette, self.arity = MODES[mode]
        self.reading = reading

    # going down
    def peel(self, lv: _Level, v: int, fresh: int) -> _Level:
        g = self.g
        alive = lv.alive - {v}
        nv = frozenset(g.adj[v] & alive)
        groups = _eq_groups(lv.order, lv.relations)
        touched = {c for c in lv.order if v in lv.clusters[c]}
        vanished = [c for c in lv.order if lv.clusters[c] == frozenset([v])]
        gone = set(vanished)
        clusters = {c: lv.clusters[c] - {v} for c in lv.order if c not in gone}
        order = [c for c in lv.order if c not in gone] + [fresh]
        clusters[fresh] = nv
        rels = {r for r in lv.relations if r[0] not in gone and r[1] not in gone}
        for grp in groups:
            if touched & set(grp):
                for c in grp:
                    if c not in gone:
                        rels.add((fresh, c, "neq"))
        divisions = [[c for c in d if c not in gone] for d in lv.divisions]
        if not nv:
            # an empty cluster sits nowhere on the trace and joins no division
            divisions = [d for d in divisions if d]
        elif self.mode == "p3a2":
            divisions = self._place_p3a2(lv, divisions, touched, order, fresh)
        else:
            divisions = [d for d in divisions if d]
            extra = []
            for c in vanished:
                partners = sorted(
                    {b if a == c else a for a, b, kd in lv.relations if kd == "neq" and c in (a, b)} - gone
                )
                d = [fresh] + partners
                if d not in extra:
                    extra.append(d)
            divisions += extra or [[fresh]]
        divisions = _merge_split_vertices(divisions, clusters)
        boundary = (lv.boundary - {v}) | nv
        return _Level(alive, clusters, order, rels, divisions, boundary=boundary)

    @staticmethod
    def _place_p3a2(lv, divisions, touched, order, fresh):
        # the division holding the peeled vertex's clusters versus the tail division
        d_v = next((k for k, d in enumerate(lv.divisions) if touched and touched <= set(d)), None)
        placed = {c for d in divisions for c in d}
        survivors = [c for c in order if c != fresh and c in placed]
        tail = None
        if survivors:
            last = survivors[-1]
            tail = max(k for k, d in enumerate(divisions) if last in d)
        kept = [(k, d) for k, d in enumerate(divisions) if d]
        out = [list(d) for _, d in kept]
        if tail is None:
            out.append([fresh])
        elif d_v is not None and d_v == tail:
            out.append([fresh])
        else:
            at = [k for k, _ in kept].index(tail)
            out[at].append(fresh)
        return out

    # coming back up
    def fill(
        self,
        lv: _Level,
        vcol: Mapping[int, int],
        fixed: Mapping[int, int],
        vanished: Sequence[int],
        divisions: bool = True,
    ) -> Iterator[dict[int, int]]:
        """Cluster colors at this level extending ``fixed``, in lexicographic order.

        Raises _Blocked up front when the fixed part already clashes; records
        the first division complaint in ``self.last_division``.
        """
        groups = _eq_groups(lv.order, lv.relations)
        root = {c: min(grp) for grp in groups for c in grp}
        gfix: dict[int, int] = {}
        for c, x in fixed.items():
            if gfix.setdefault(root[c], x) != x:
                raise _Blocked("collection", f"eq-linked clusters came back with different colors at {c}")
        members: dict[int, list[int]] = {}
        for c in lv.order:
            members.setdefault(root[c], []).append(c)
        rank = {c: i for i, c in enumerate(lv.order)}
        free = [r for r in sorted(members, key=rank.__getitem__) if r not in gfix]
        allowed = {}
        for r in members:
            bad = {vcol[x] for c in members[r] for x in lv.clusters[c]}
            allowed[r] = [x for x in range(1, self.palette + 1) if x not in bad]
            if r in gfix and gfix[r] not in allowed[r]:
                raise _Blocked("collection", f"cluster-vertex of group {r} clashes with its cluster")
        neq: dict[int, set[int]] = {r: set() for r in members}
        for a, b, kd in lv.relations:
            if kd == "neq":
                ra, rb = root[a], root[b]
                if ra == rb:
                    raise _Blocked("collection", f"clusters {a},{b} forced equal and different")
                neq[ra].add(rb)
                neq[rb].add(ra)
        for r, x in gfix.items():
            if any(gfix.get(o) == x for o in neq[r]):
                raise _Blocked("collection", f"neq groups around {r} came back equal")
        pick = dict(gfix)
        self.last_division = []

        def walk(i):
            if i == len(free):
                color_of = {c: pick[root[c]] for c in lv.order}
                bad = self.division_check(lv, color_of, vanished) if divisions else []
                if not bad:
                    yield color_of
                elif not self.last_division:
                    self.last_division = bad
                return
            r = free[i]
            for x in allowed[r]:
                if all(pick.get(o) != x for o in neq[r]):
                    pick[r] = x
                    yield from walk(i + 1)
                    del pick[r]

        yield from walk(0)

    def division_check(self, lv: _Level, color_of: Mapping[int, int], vanished: Sequence[int]) -> list[str]:
        out = division_violations(self.mode, lv.divisions, color_of)
        if self.mode == "p4a3" and self.reading is not None:
            pos = {c: i for i, c in enumerate(lv.order)}
            for x, y in itertools.combinations(sorted(vanished, key=pos.get), 2):
                if not any(x in d and y in d for d in lv.divisions):
                    continue
                lo, hi = pos[x], pos[y]
                span = lv.order[lo : hi + 1] if self.reading == "inclusive" else lv.order[lo + 1 : hi]
                used = {color_of[c] for c in span}
                if len(used) > 2:
                    out.append(f"division-5: run {lo}..{hi} ({self.reading}) uses {len(used)} colors")
        return out

    def descend(self, top: _Level, pick_vertex) -> list[_Level]:
        levels = [top]
        fresh = max(top.order, default=-1) + 1
        while len(levels[-1].alive) > 1:
            lv = levels[-1]
            v = pick_vertex(lv)
            nxt = self.peel(lv, v, fresh)
            lv.peeled, lv.new_id = v, fresh
            lv.vanished = [c for c in lv.order if lv.clusters[c] == frozenset([v])]
            fresh += 1
            levels.append(nxt)
        return levels

    def _restore_input(self, lv: _Level, vcol, ccol):
        vcol = dict(vcol)
        vcol[lv.peeled] = ccol[lv.new_id]
        fixed = {c: ccol[c] for c in lv.order if c in ccol and c not in lv.vanished}
        return vcol, fixed

    def run(self, top: _Level, pick_vertex) -> tuple[dict[int, int], dict[int, int]] | FailureTrace:
        """The induction as stated: first valid choice at every level, no going back."""
        levels = self.descend(top, pick_vertex)
        peel = tuple(lv.peeled for lv in levels[:-1])
        vcol = {v: 1 for v in levels[-1].alive}
        ccol: dict[int, int] = {}
        for depth in range(len(levels) - 1, -1, -1):
            lv = levels[depth]
            fixed: dict[int, int] = {}
            if depth < len(levels) - 1:
                vcol, fixed = self._restore_input(lv, vcol, ccol)
            try:
                got = next(self.fill(lv, vcol, fixed, lv.vanished), None)
                if got is None:
                    if self.last_division:
                        raise _Blocked(self.last_division[0].split(":")[0], "; ".join(self.last_division))
                    raise _Blocked("collection", "no colors left for the vanished cluster-vertices")
            except _Blocked as b:
                return FailureTrace(self.mode, b.rule, b.detail, peel, depth, lv.snapshot(), self.reading)
            ccol = got
        return vcol, ccol

    def search(self, top: _Level, pick_vertex, budget: SearchBudget = DEFAULT_BUDGET):
        """Same peel order, but every restoration choice is open to backtracking
        and division rules are only enforced on the input system."""
        levels = self.descend(top, pick_vertex)
        meter = budget.meter()

        def climb(depth, vcol, ccol):
            if depth < 0:
                return vcol, ccol
            lv = levels[depth]
            fixed: dict[int, int] = {}
            if depth < len(levels) - 1:
                vcol, fixed = self._restore_input(lv, vcol, ccol)
            try:
                options = self.fill(lv, vcol, fixed, lv.vanished, divisions=depth == 0)
                for got in options:
                    meter.tick()
                    res = climb(depth - 1, vcol, got)
                    if res is not None:
                        return res
            except _Blocked:
                return None
            return None

        return climb(len(levels) - 1, {v: 1 for v in levels[-1].alive}, {})


def _merge_split_vertices(divisions: list[list[int]], clusters: Mapping[int, frozenset[int]]) -> list[list[int]]:
    # all clusters on one vertex must share a division; that wins over placement
    divisions = [list(d) for d in divisions]
    on: dict[int, set[int]] = {}
    for c, verts in clusters.items():
        for x in verts:
            on.setdefault(x, set()).add(c)
    changed = True
    while changed:
        changed = False
        for x, members in on.items():
            if any(members <= set(d) for d in divisions):
                continue
            hit = [k for k, d in enumerate(divisions) if members & set(d)]
            lo, hi = hit[0], hit[-1]
            merged = []
            for d in divisions[lo : hi + 1]:
                merged += [c for c in d if c not in merged]
            divisions[lo : hi + 1] = [merged]
            changed = True
            break
    return divisions


def _top_level(g: Graph, cs: ConstraintSystem, boundary: Iterable[int] = ()) -> _Level:
    return _Level(
        frozenset(range(g.n)),
        {i: frozenset(c) for i, c in enumerate(cs.clusters)},
        list(range(len(cs.clusters))),
        {(i, j, k) for i, j, k in cs.relations},
        [list(d) for d in cs.divisions],
        boundary=frozenset(boundary),
    )


def _as_assignment(g: Graph, cs: ConstraintSystem, vcol, ccol) -> ColorAssignment:
    full = dict(vcol)
    for gi, grp in enumerate(cs.groups()):
        full[g.n + gi] = ccol[grp[0]]
    return ColorAssignment.of(full, MODES[cs.mode][0])


@dataclass(frozen=True)
class WingSolution:
    """Outcome of :func:`solve_wing1_constraints`.

    ``blocked`` is the induction's FailureTrace when the step-by-step
    restoration got stuck; ``coloring`` then comes from the backtracking
    search over the same peel order, if that finds one.
    """

    coloring: ColorAssignment | None
    blocked: FailureTrace | None = None

    @property
    def by_induction(self) -> bool:
        return self.coloring is not None and self.blocked is None

    def to_json(self) -> dict:
        return {
            "format": 1,
            "coloring": None if self.coloring is None else self.coloring.to_json(),
            "blocked": None if self.blocked is None else self.blocked.to_json(),
        }


def run_wing1_induction(w: WingEmbedding, cs: ConstraintSystem) -> ColorAssignment | FailureTrace:
    """The constrained 3-coloring induction: peel the last vertex, inherit the
    constraints, recurse, restore. A FailureTrace is a blocked restoration or
    a result that fails the independent check; either is a finding."""
    if cs.mode != "p3a2":
        raise ConstraintError("wing-1 solving runs in p3a2 mode")
    g = w.graph
    problems = validate_system(cs, g, list(w.outer().outer))
    if problems:
        raise ConstraintSystemError(problems)
    if g.n == 0:
        if cs.clusters:
            raise ConstraintError("clusters on an empty graph")
        return ColorAssignment(3, ())
    pos = w.position
    got = _Engine(g, "p3a2").run(_top_level(g, cs), lambda lv: max(lv.alive, key=pos.__getitem__))
    if isinstance(got, FailureTrace):
        return got
    cl = _as_assignment(g, cs, *got)
    bad = check_solution(g, cs, cl)
    if bad:
        return FailureTrace("p3a2", "validation", "; ".join(bad), (), 0, {}, None)
    return cl


def solve_wing1_constraints(
    w: WingEmbedding, cs: ConstraintSystem, budget: SearchBudget = DEFAULT_BUDGET
) -> WingSolution:
    """Run the induction; when it blocks, keep the trace and backtrack instead.

    Raises BudgetExceeded if the backtracking search runs out of budget.
    """
    first = run_wing1_induction(w, cs)
    if isinstance(first, ColorAssignment):
        return WingSolution(first)
    g = w.graph
    pos = w.position
    got = _Engine(g, "p3a2").search(_top_level(g, cs), lambda lv: max(lv.alive, key=pos.__getitem__), budget)
    if got is None:
        return WingSolution(None, first)
    cl = _as_assignment(g, cs, *got)
    if check_solution(g, cs, cl):
        return WingSolution(None, first)
    return WingSolution(cl, first)


def outer_two_color(w: WingEmbedding) -> WingSolution:
    """3-coloring of ``w.graph`` with the outer vertices on at most two colors."""
    outer = list(w.outer().outer)
    cs = ConstraintSystem.build("p3a2", [outer] if outer else [])
    sol = solve_wing1_constraints(w, cs)
    if sol.coloring is None:
        return sol
    return WingSolution(sol.coloring.restrict(range(w.graph.n)), sol.blocked)


# --- division coloring ------------------------------------------------------------

def _division_shape(w: WingEmbedding, R: Sequence[int], x: int) -> bool:
    seq = sorted(R, key=w.position.__getitem__)
    g = w.graph
    if not all(g.has_edge(a, b) for a, b in zip(seq, seq[1:])):
        return False
    return x == 2 or len(seq) < 3 or g.has_edge(seq[0], seq[-1])


def solve_division_coloring(w: WingEmbedding, R: Iterable[int], x: int, I: Iterable[int] = ()) -> ColorAssignment:
    """3-coloring with ``I`` on one color and ``R - I`` on the other two.

    ``R`` is a vertex-related set of the embedding laid out as a path (x=2)
    or a cycle (x=3) along the line. The coloring comes from repeatedly
    peeling a vertex of degree at most 2, merging its two neighbors when
    they must share a color.
    """
    g = w.graph
    R = sorted(set(R))
    I = sorted(set(I))
    if x not in (2, 3):
        raise PreconditionError("x must be 2 or 3")
    if not set(I) <= set(R) or any(v not in range(g.n) for v in R):
        raise PreconditionError("I must be a subset of R inside the graph")
    if any(g.has_edge(a, b) for a, b in itertools.combinations(I, 2)):
        raise PreconditionError("I is not independent")
    if tuple(sorted(R, key=w.position.__getitem__)) not in set(vertex_related_sets(w)):
        raise PreconditionError("R is not a vertex-related set of the embedding")
    if not _division_shape(w, R, x):
        raise PreconditionError(f"R does not form a K{x} division along the line")
    if x == 3 and len(R) % 2 == 1 and not I:
        raise InfeasibleError("an odd K3 division needs a nonempty independent set")
    lists = {v: {1, 2, 3} for v in range(g.n)}
    for v in R:
        lists[v] = {1} if v in I else {2, 3}
    adj = {v: set(g.adj[v]) for v in range(g.n)}
    got = _list_peel(adj, lists)
    if got is None:
        raise InfeasibleError("peeling found no coloring with these color classes")
    cl = ColorAssignment.of(got, 3)
    assert all(got[a] != got[b] for a, b in g.edges())
    assert all(got[v] in lists[v] for v in range(g.n))
    return cl


def _list_peel(adj: dict[int, set[int]], lists: dict[int, set[int]]) -> dict[int, int] | None:
    if not adj:
        return {}
    v = min(adj, key=lambda u: (len(adj[u]), u))
    if len(adj[v]) > 2:
        raise GraphError("no vertex of degree at most 2; the graph is not outerplanar")
    nbrs = sorted(adj[v])
    lv = lists[v]

    def without(adj0, lists0, u):
        a = {k: set(s) - {u} for k, s in adj0.items() if k != u}
        l = {k: set(s) for k, s in lists0.items() if k != u}
        return a, l

    def finish(sub, choices):
        if sub is None:
            return None
        free = [c for c in sorted(choices) if all(sub[w] != c for w in nbrs)]
        if not free:
            return None
        sub[v] = free[0]
        return sub

    a, l = without(adj, lists, v)
    if len(nbrs) < 2 or len(lv) == 3:
        if len(lv) == 1 and nbrs:
            for w in nbrs:
                l[w] -= lv
            if any(not l[w] for w in nbrs):
                return None
        return finish(_list_peel(a, l), lv)
    v1, v2 = nbrs
    if len(lv) == 1:
        l[v1] -= lv
        l[v2] -= lv
        if not l[v1] or not l[v2]:
            return None
        return finish(_list_peel(a, l), lv)
    # v needs one of two colors: its neighbors either share a color or one of them takes the third
    third = {1, 2, 3} - lv
    if l[v1] == third or l[v2] == third:
        return finish(_list_peel(a, l), lv)
    if v2 not in a[v1]:
        common = l[v1] & l[v2]
        if common:
            a2 = {k: set(s) for k, s in a.items()}
            l2 = {k: set(s) for k, s in l.items()}
            for w in a2.pop(v2):
                a2[w].discard(v2)
                if w != v1:
                    a2[w].add(v1)
                    a2[v1].add(w)
            l2[v1] = common
            del l2[v2]
            sub = _list_peel(a2, l2)
            if sub is not None:
                sub[v2] = sub[v1]
                got = finish(sub, lv)
                if got is not None:
                    return got
    for w in (v1, v2):
        if third <= l[w]:
            l2 = {k: set(s) for k, s in l.items()}
            l2[w] = set(third)
            got = finish(_list_peel(a, l2), lv)
            if got is not None:
                return got
    return None


# --- the planar procedure ------------------------------------------------------------

@dataclass(frozen=True)
class PlanarAttempt:
    coloring: ColorAssignment | None
    reading: str | None
    failures: tuple[FailureTrace, ...]

    @property
    def succeeded(self) -> bool:
        return self.coloring is not None

    def to_json(self) -> dict:
        return {
            "format": 1,
            "coloring": None if self.coloring is None else self.coloring.to_json(),
            "reading": self.reading,
            "failures": [f.to_json() for f in self.failures],
        }


def planar_coloring_problems(g: Graph, boundary: Iterable[int], cl: ColorAssignment) -> list[str]:
    col = cl.mapping
    out = []
    if any(v not in col for v in range(g.n)):
        return ["some vertices are uncolored"]
    if any(col[a] == col[b] for a, b in g.edges()):
        out.append("coloring is not proper")
    if len(set(col[v] for v in range(g.n))) > 4 or any(not 1 <= c <= 4 for c in col.values()):
        out.append("more than 4 colors")
    if len({col[v] for v in set(boundary)}) > 3:
        out.append("boundary uses more than 3 colors")
    return out


def planar_4color_attempt(g: Graph, boundary: Trace | Sequence[int]) -> PlanarAttempt:
    """Run the peeling procedure in p4a3 mode with the whole boundary as one
    cluster; each reading of the run rule is tried in turn."""
    import networkx as nx

    from .graph_core import to_networkx

    walk = _trace_order(boundary)
    if g.n and not nx.check_planarity(to_networkx(g))[0]:
        raise PreconditionError("graph is not planar")
    if g.n <= WALK_CHECK_CAP and g.n > 1:
        t = boundary if isinstance(boundary, Trace) else Trace(tuple(walk), "planar-walk")
        if not trace_check(g, t):
            raise PreconditionError("boundary is not a planar-walk trace")
    if g.n == 0:
        return PlanarAttempt(ColorAssignment(4, ()), READINGS[0], ())
    U = sorted(set(walk))
    cs = ConstraintSystem.build("p4a3", [U])
    failures = []
    for reading in READINGS:
        eng = _Engine(g, "p4a3", reading)

        def pick(lv: _Level) -> int:
            pool = [v for v in lv.boundary if v in lv.alive] or sorted(lv.alive)
            return min(pool, key=lambda v: (len(g.adj[v] & lv.alive), v))

        got = eng.run(_top_level(g, cs, U), pick)
        if isinstance(got, FailureTrace):
            failures.append(got)
            continue
        cl = ColorAssignment.of(got[0], 4)
        bad = planar_coloring_problems(g, U, cl)
        if bad:
            failures.append(FailureTrace("p4a3", "validation", "; ".join(bad), (), 0, {}, reading))
            continue
        return PlanarAttempt(cl, reading, tuple(failures))
    return PlanarAttempt(None, None, tuple(failures))


def boundary_coloring_exists(g: Graph, boundary: Iterable[int]) -> ColorAssignment | None:
    """Brute force: a proper 4-coloring using at most 3 colors on the boundary."""
    B = sorted(set(boundary))
    for col in oracle.enumerate_colorings(g, 4):
        if len({col[v] for v in B}) <= 3:
            return ColorAssignment.of(col, 4)
    return None


def outer_two_color_exists(g: Graph, outer: Iterable[int]) -> bool:
    outer = sorted(set(outer))
    return any(len({col[v] for v in outer}) <= 2 for col in oracle.enumerate_colorings(g, 3))


# --- random systems -----------------------------------------------------------------

def random_system(w: WingEmbedding, rng: random.Random, max_clusters: int = 8, tries: int = 200) -> ConstraintSystem:
    """A random p3a2 system on the outer vertices that passes validate_system."""
    outer = list(w.outer().outer)
    if not outer:
        return ConstraintSystem.build("p3a2", [])
    for _ in range(tries):
        clusters = []
        end = -1
        k = rng.randint(1, max_clusters)
        for _ in range(k):
            start = end if end >= 0 and rng.random() < 0.5 else end + 1 + (rng.random() < 0.2)
            start = max(start, 0)
            if start >= len(outer):
                break
            stop = min(start + rng.randint(0, 2), len(outer) - 1)
            clusters.append(outer[start : stop + 1])
            end = stop
        if not clusters:
            continue
        rels = []
        for i in range(len(clusters) - 1):
            kind = rng.choice((None, "eq", "neq", "neq"))
            if kind:
                rels.append((i, i + 1, kind))
        for _ in range(20):
            divisions = [[0]]
            for i in range(1, len(clusters)):
                r = rng.random()
                if r < 0.2:
                    divisions.append([i - 1, i])
                elif r < 0.4:
                    divisions.append([i])
                else:
                    divisions[-1].append(i)
            cs = ConstraintSystem.build("p3a2", clusters, rels, divisions)
            if not validate_system(cs, w.graph, outer):
                return cs
    raise ConstraintError("no rule-conformant system found")


__all__ = [
    "Collection",
    "ConstraintSystem",
    "ConstraintGraph",
    "ConstraintError",
    "ConstraintSystemError",
    "FailureTrace",
    "PlanarAttempt",
    "MODES",
    "READINGS",
    "expand_collection",
    "consistent",
    "validate_system",
    "division_kind",
    "division_violations",
    "rewrite_singleton_neq",
    "build_constraint_graph",
    "check_solution",
    "brute_force_solution",
    "solve_wing1_constraints",
    "run_wing1_induction",
    "WingSolution",
    "outer_two_color",
    "solve_division_coloring",
    "planar_4color_attempt",
    "planar_coloring_problems",
    "boundary_coloring_exists",
    "outer_two_color_exists",
    "random_system",
    "ColoringError",
]
