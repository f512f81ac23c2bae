"""Corpus generators with ground-truth side data, and diagram output.

Randomness comes from :class:`CorpusRng`, whose derivation from raw MT19937
words is fixed below so that a corpus can be regenerated in another language.
"""

from __future__ import annotations

import itertools
import json
import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import networkx as nx

from . import oracle
from .graph_core import Graph, GraphError, read_edge_list, to_networkx
from .wing import NotPermutation, WingEmbedding, is_wing1

__all__ = [
    "CorpusRng",
    "CorpusItem",
    "CorpusError",
    "ALL_SMALL_CAP",
    "all_small",
    "graph_classes",
    "random_wing1",
    "random_graphs",
    "maximal_planar",
    "generate",
    "side_problems",
    "peel_boundary",
    "emit_diagram",
    "read_dot",
]

ALL_SMALL_CAP = 7
CLASS_CAP = 8
RNG_NAME = "mt19937-words"


class CorpusError(ValueError):
    pass


class CorpusRng:
    """MT19937 seeded exactly as Python's ``random.Random(seed)`` for a
    nonnegative integer seed (init_by_array over the seed's 32-bit words,
    least significant first). Only whole 32-bit outputs w are consumed:

    - ``below(m)``: draw w until w < floor(2**32 / m) * m, return w % m
    - ``random()``: w / 2**32
    - ``randint(a, b)``: a + below(b - a + 1)
    - ``choice(s)``: s[below(len(s))]
    - ``shuffle(x)``: for i from len(x)-1 down to 1, swap x[i], x[below(i + 1)]
    """

    name = RNG_NAME

    def __init__(self, seed: int):
        if seed < 0:
            raise CorpusError("seeds are nonnegative integers")
        self.seed = seed
        self._mt = random.Random(seed)

    def word(self) -> int:
        return self._mt.getrandbits(32)

    def below(self, m: int) -> int:
        if not 0 < m <= 1 << 32:
            raise CorpusError("below() needs 0 < m <= 2**32")
        limit = ((1 << 32) // m) * m
        while True:
            w = self.word()
            if w < limit:
                return w % m

    def random(self) -> float:
        return self.word() / (1 << 32)

    def randint(self, a: int, b: int) -> int:
        return a + self.below(b - a + 1)

    def choice(self, seq: Sequence):
        return seq[self.below(len(seq))]

    def shuffle(self, x: list) -> None:
        for i in range(len(x) - 1, 0, -1):
            j = self.below(i + 1)
            x[i], x[j] = x[j], x[i]


@dataclass(frozen=True)
class CorpusItem:
    graph: Graph
    generator: str
    params: dict = field(default_factory=dict)
    seed: int | None = None
    index: int = 0
    side: dict = field(default_factory=dict)

    @property
    def key(self) -> str:
        params = json.dumps(self.params, sort_keys=True, separators=(",", ":"))
        return f"{self.generator}{params}/{self.seed if self.seed is not None else '-'}/{self.index}"

    def to_json(self) -> dict:
        return {
            "format": 1,
            "generator": self.generator,
            "params": self.params,
            "seed": self.seed,
            "index": self.index,
            "graph": self.graph.to_json(),
            "side": self.side,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, data) -> CorpusItem:
        if isinstance(data, str):
            data = json.loads(data)
        if data.get("format") != 1:
            raise CorpusError("unsupported corpus item format")
        return cls(
            Graph.from_json(data["graph"]),
            data["generator"],
            dict(data.get("params", {})),
            data.get("seed"),
            int(data.get("index", 0)),
            dict(data.get("side", {})),
        )

    def wing(self) -> WingEmbedding:
        if "order" not in self.side:
            raise CorpusError(f"{self.key} carries no wing order")
        return WingEmbedding(tuple(self.side["order"]), self.graph)

    def embedding(self) -> nx.PlanarEmbedding:
        if "embedding" not in self.side:
            raise CorpusError(f"{self.key} carries no planar embedding")
        return _embedding_from(self.side["embedding"])


# --- generators ------------------------------------------------------------------

def all_small(n: int) -> Iterator[CorpusItem]:
    """Every labeled graph on n vertices; item index is the edge bitmask over
    the lexicographic vertex pairs."""
    if not 0 <= n <= ALL_SMALL_CAP:
        raise CorpusError(f"all_small is capped at n <= {ALL_SMALL_CAP}")
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        g = Graph.from_edges(n, (p for i, p in enumerate(pairs) if mask >> i & 1))
        yield CorpusItem(g, "all_small", {"n": n}, None, mask)


def _atlas(n: int) -> list[Graph]:
    out = []
    for h in nx.graph_atlas_g():
        if h.number_of_nodes() == n:
            out.append(Graph.from_edges(n, h.edges()))
    return out


def graph_classes(n: int, keep=None) -> list[Graph]:
    """One graph per isomorphism class on exactly n vertices (n <= 8),
    optionally only those passing ``keep``.

    Up to seven vertices this is the graph atlas. Eight-vertex classes come
    from joining a new vertex to every neighbor subset of each seven-vertex
    class, then dropping isomorphic duplicates.
    """
    if not 0 <= n <= CLASS_CAP:
        raise CorpusError(f"graph_classes is capped at n <= {CLASS_CAP}")
    if n <= 7:
        return [g for g in _atlas(n) if keep is None or keep(g)]
    buckets: dict[tuple, list[nx.Graph]] = {}
    out = []
    for base in _atlas(n - 1):
        for mask in range(1 << (n - 1)):
            g = base.add_vertex(v for v in range(n - 1) if mask >> v & 1)
            if keep is not None and not keep(g):
                continue
            h = to_networkx(g)
            sig = (tuple(sorted(d for _, d in h.degree())), nx.weisfeiler_lehman_graph_hash(h, iterations=3))
            bucket = buckets.setdefault(sig, [])
            if any(nx.is_isomorphic(h, other) for other in bucket):
                continue
            bucket.append(h)
            out.append(g)
    return out


def _pick_n(n, rng: CorpusRng) -> int:
    if isinstance(n, int):
        return n
    lo, hi = n
    return rng.randint(lo, hi)


def _wing_sample(n: int, density: float, rng: CorpusRng, connected: bool = False) -> tuple[Graph, list[int]]:
    arcs: list[tuple[int, int]] = []
    cand = list(itertools.combinations(range(n), 2))
    rng.shuffle(cand)
    for a, b in cand:
        if rng.random() >= density:
            continue
        if all(not (a < x < b < y or x < a < y < b) for x, y in arcs):
            arcs.append((a, b))
    if connected:
        # arcs between neighboring positions cross nothing, so they can join components
        comp = list(range(n))

        def root(x):
            while comp[x] != x:
                comp[x] = comp[comp[x]]
                x = comp[x]
            return x

        for a, b in arcs:
            comp[root(a)] = root(b)
        for p in range(n - 1):
            if root(p) != root(p + 1):
                comp[root(p)] = root(p + 1)
                arcs.append((p, p + 1))
    order = list(range(n))
    rng.shuffle(order)
    return Graph.from_edges(n, ((order[a], order[b]) for a, b in arcs)), order


def random_wing1(n, density: float | None, seed: int, count: int = 1, connected: bool = False) -> Iterator[CorpusItem]:
    """Random line order plus a random non-crossing arc set.

    ``n`` is a size or an inclusive (lo, hi) range; ``density=None`` draws a
    fresh density per item. With ``connected`` the components are chained
    by arcs between neighboring positions.
    """
    rng = CorpusRng(seed)
    params = {"n": n if isinstance(n, int) else list(n), "density": density, "connected": connected}
    for i in range(count):
        nn = _pick_n(n, rng)
        d = rng.random() if density is None else density
        g, order = _wing_sample(nn, d, rng, connected)
        yield CorpusItem(g, "random_wing1", params, seed, i, {"order": order})


def random_graphs(n, p: float | None, seed: int, count: int = 1, chi: int | None = None) -> Iterator[CorpusItem]:
    """G(n, p) samples; with ``chi`` only graphs of that chromatic number are
    kept (rejected samples still consume the stream)."""
    rng = CorpusRng(seed)
    params = {"n": n if isinstance(n, int) else list(n), "p": p, "chi": chi}
    for i in range(count):
        while True:
            nn = _pick_n(n, rng)
            q = rng.random() if p is None else p
            edges = [e for e in itertools.combinations(range(nn), 2) if rng.random() < q]
            g = Graph.from_edges(nn, edges)
            if chi is None:
                break
            if oracle.chromatic_number(g) == chi:
                break
        side = {} if chi is None else {"chi": chi}
        yield CorpusItem(g, "random_graphs", params, seed, i, side)


def _embedding_from(data) -> nx.PlanarEmbedding:
    emb = nx.PlanarEmbedding()
    emb.set_data({int(v): [int(w) for w in nbrs] for v, nbrs in dict(data).items()})
    return emb


def _embedding_json(emb: nx.PlanarEmbedding) -> dict:
    return {str(v): list(nbrs) for v, nbrs in sorted(emb.get_data().items())}


def _maximal_planar_sample(n: int, rng: CorpusRng) -> tuple[Graph, tuple[int, int, int]]:
    faces = [(0, 1, 2), (0, 1, 2)]
    outer = 0
    edges = [(0, 1), (0, 2), (1, 2)]
    for v in range(3, n):
        i = rng.below(len(faces))
        a, b, c = faces[i]
        new = [(a, b, v), (b, c, v), (a, c, v)]
        faces[i : i + 1] = new
        if i == outer:
            outer = i + rng.below(3)
        elif i < outer:
            outer += 2
        edges += [(a, v), (b, v), (c, v)]
    return Graph.from_edges(n, edges), faces[outer]


def maximal_planar(n, seed: int, count: int = 1) -> Iterator[CorpusItem]:
    """Grow a triangle by inserting each new vertex into a random face.

    Side data: the rotation system (clockwise neighbor lists) and the outer
    face walk, oriented as a face traversal of that rotation system.
    """
    rng = CorpusRng(seed)
    params = {"n": n if isinstance(n, int) else list(n)}
    for i in range(count):
        nn = _pick_n(n, rng)
        if nn < 3:
            raise CorpusError("maximal_planar needs n >= 3")
        g, tri = _maximal_planar_sample(nn, rng)
        ok, emb = nx.check_planarity(to_networkx(g))
        assert ok
        walk = _face_through(emb, tri)
        yield CorpusItem(g, "maximal_planar", params, seed, i, {"boundary": walk, "embedding": _embedding_json(emb)})


def _face_through(emb: nx.PlanarEmbedding, verts: Sequence[int]) -> list[int]:
    target = set(verts)
    a, b = verts[0], verts[1]
    for x, y in ((a, b), (b, a)):
        face = emb.traverse_face(x, y)
        if set(face) == target and len(face) == len(target):
            return [int(v) for v in face]
    raise CorpusError(f"{list(verts)} is not a face of the embedding")


def generate(mode: str, **params) -> Iterator[CorpusItem]:
    gens = {"all_small": all_small, "random_wing1": random_wing1, "maximal_planar": maximal_planar, "random_graphs": random_graphs}
    if mode not in gens:
        raise CorpusError(f"unknown corpus mode {mode!r}")
    return gens[mode](**params)


# --- side data ---------------------------------------------------------------------

def side_problems(item: CorpusItem) -> list[str]:
    """Reasons the item's side data disagrees with its graph; empty when consistent."""
    g, side = item.graph, item.side
    problems = []
    if "order" in side:
        try:
            if not is_wing1(tuple(side["order"]), g):
                problems.append("wing order has crossing arcs")
        except (NotPermutation, GraphError, TypeError) as exc:
            problems.append(f"wing order is malformed: {exc}")
    if "boundary" in side:
        walk = list(side["boundary"])
        if len(set(walk)) != len(walk) or any(not 0 <= v < g.n for v in walk):
            problems.append("boundary walk repeats or leaves the graph")
        elif len(walk) > 1 and any(not g.has_edge(a, b) for a, b in zip(walk, walk[1:] + walk[:1])):
            problems.append("boundary walk uses a missing edge")
        elif "embedding" in side:
            try:
                emb = item.embedding()
                emb.check_structure()
                if sorted(tuple(sorted(e)) for e in emb.to_undirected().edges()) != g.edges():
                    problems.append("embedding edges differ from the graph")
                elif len(walk) >= 2 and _rotate_min(emb.traverse_face(walk[0], walk[1])) != _rotate_min(walk):
                    problems.append("boundary walk is not a face of the embedding")
            except (nx.NetworkXException, KeyError, ValueError) as exc:
                problems.append(f"embedding is malformed: {exc}")
    if "chi" in side:
        if oracle.chromatic_number(g) != side["chi"]:
            problems.append("recorded chromatic number is wrong")
    return problems


def _rotate_min(walk: Sequence[int]) -> list[int]:
    walk = [int(v) for v in walk]
    if not walk:
        return walk
    i = walk.index(min(walk))
    return walk[i:] + walk[:i]


def peel_boundary(item: CorpusItem, u: int) -> tuple[Graph, list[int], dict[int, int]]:
    """Delete boundary vertex u; return the smaller graph, its outer walk read
    off the embedding and the id map."""
    walk = list(item.side["boundary"])
    if u not in walk or len(walk) < 3:
        raise CorpusError("peeled vertex must lie on a boundary of length >= 3")
    data = item.embedding().get_data()
    i = next(i for i in range(len(walk)) if u not in (walk[i], walk[(i + 1) % len(walk)]))
    a, b = walk[i], walk[(i + 1) % len(walk)]
    emb = _embedding_from({v: [w for w in nbrs if w != u] for v, nbrs in data.items() if v != u})
    face = emb.traverse_face(a, b)
    h, relabel = item.graph.remove_vertices([u])
    return h, [relabel[v] for v in face], relabel


# --- diagrams ------------------------------------------------------------------------

def emit_diagram(item: CorpusItem, fmt: str) -> str:
    if fmt == "dot":
        return _dot(item)
    if fmt == "svg-arc":
        return _svg_arc(item)
    raise CorpusError(f"unknown diagram format {fmt!r}")


def _dot(item: CorpusItem) -> str:
    g = item.graph
    lines = [f"// format 1; {item.key}", "graph G {"]
    lines += [f"  {v};" for v in range(g.n)]
    lines += [f"  {u} -- {v};" for u, v in g.edges()]
    lines.append("}")
    return "\n".join(lines) + "\n"


def read_dot(text: str) -> Graph:
    """Read back the DOT subset written by :func:`emit_diagram`."""
    plain = []
    for line in text.splitlines():
        m = re.fullmatch(r"\s*(\d+)\s*(?:--\s*(\d+)\s*)?;\s*", line)
        if m:
            plain.append(m.group(1) if m.group(2) is None else f"{m.group(1)} {m.group(2)}")
    return read_edge_list("\n".join(plain))


SVG_STEP = 40
SVG_MARGIN = 20


def _svg_arc(item: CorpusItem) -> str:
    w = item.wing()
    n = w.graph.n
    pos = w.position
    span = max(n - 1, 0) * SVG_STEP
    height = SVG_MARGIN * 2 + span // 2 + 10
    base = height - SVG_MARGIN
    width = span + 2 * SVG_MARGIN
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" data-format="1">',
        f'  <line x1="{SVG_MARGIN}" y1="{base}" x2="{SVG_MARGIN + span}" y2="{base}" stroke="#bbb"/>',
    ]
    for a, b in sorted((min(pos[x], pos[y]), max(pos[x], pos[y])) for x, y in w.graph.edges()):
        x1, x2 = SVG_MARGIN + a * SVG_STEP, SVG_MARGIN + b * SVG_STEP
        r = (x2 - x1) // 2
        out.append(
            f'  <path class="arc" data-ends="{a} {b}" d="M {x1} {base} A {r} {r} 0 0 1 {x2} {base}" fill="none" stroke="black"/>'
        )
    for i, v in enumerate(w.order):
        x = SVG_MARGIN + i * SVG_STEP
        out.append(f'  <circle class="vertex" cx="{x}" cy="{base}" r="4"/>')
        out.append(f'  <text x="{x}" y="{base + 15}" text-anchor="middle" font-size="10">{v}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
