"""Color assignments, frequency vectors, color exchange, kernel vertices and
clique-cut recombination."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from . import oracle
from .graph_core import Graph, GraphError, components_without

EXHAUSTIVE_CAP = 12


class ColoringError(ValueError):
    pass


class IncompleteAssignmentError(ColoringError):
    pass


class InfeasibleError(ColoringError):
    pass


class PreconditionError(ColoringError):
    pass


class StructureError(ColoringError):
    pass


class ColoringBudgetError(ColoringError):
    pass


@dataclass(frozen=True)
class ColorAssignment:
    palette: int
    colors: tuple[tuple[int, int], ...]  # sorted (vertex, color) pairs

    @classmethod
    def of(cls, colors: Mapping[int, int] | Iterable[int], palette: int | None = None) -> ColorAssignment:
        if not isinstance(colors, Mapping):
            colors = dict(enumerate(colors))
        items = tuple(sorted((int(v), int(c)) for v, c in colors.items()))
        if palette is None:
            palette = max((c for _, c in items), default=0)
        for v, c in items:
            if not 1 <= c <= palette:
                raise ColoringError(f"color {c} of vertex {v} outside palette 1..{palette}")
        return cls(palette, items)

    @property
    def mapping(self) -> dict[int, int]:
        return dict(self.colors)

    def __getitem__(self, v: int) -> int:
        return self.mapping[v]

    def used(self) -> set[int]:
        return {c for _, c in self.colors}

    def restrict(self, verts: Iterable[int]) -> ColorAssignment:
        keep = set(verts)
        return ColorAssignment(self.palette, tuple(p for p in self.colors if p[0] in keep))

    def to_json(self) -> dict:
        return {"palette": self.palette, "colors": {str(v): c for v, c in self.colors}}

    @classmethod
    def from_json(cls, data: Mapping | str) -> ColorAssignment:
        if isinstance(data, str):
            data = json.loads(data)
        return cls.of({int(v): c for v, c in data["colors"].items()}, data["palette"])


def is_proper(g: Graph, cl: ColorAssignment) -> bool:
    m = cl.mapping
    missing = [v for v in g.vertices if v not in m]
    if missing:
        raise IncompleteAssignmentError(f"vertices {missing} have no color")
    return all(m[u] != m[v] for u, v in g.edges())


def frequency_vector(cl: ColorAssignment) -> tuple[int, ...]:
    """Counts <times(l), ..., times(1)> from the highest color down."""
    counts = [0] * (cl.palette + 1)
    for _, c in cl.colors:
        counts[c] += 1
    return tuple(counts[c] for c in range(cl.palette, 0, -1))


def frequency_compare(a: ColorAssignment, b: ColorAssignment) -> int:
    """-1, 0 or 1 as a's frequency vector is below, equal to or above b's."""
    if a.palette != b.palette:
        raise ColoringError(f"palette mismatch {a.palette} vs {b.palette}")
    fa, fb = frequency_vector(a), frequency_vector(b)
    return (fa > fb) - (fa < fb)


def _proper_colorings(g: Graph, k: int) -> Iterator[tuple[int, ...]]:
    # lowest vertex id first, lowest color first, so output is lexicographic
    n = g.n
    color = [0] * n

    def walk(v: int):
        if v == n:
            yield tuple(color)
            return
        blocked = {color[w] for w in g.adj[v] if w < v}
        for c in range(1, k + 1):
            if c not in blocked:
                color[v] = c
                yield from walk(v + 1)
        color[v] = 0

    return walk(0)


def _check_cap(g: Graph) -> None:
    if g.n > EXHAUSTIVE_CAP:
        raise ColoringBudgetError(f"exhaustive coloring is capped at n <= {EXHAUSTIVE_CAP}, got {g.n}")


def min_frequency_coloring(g: Graph, k: int) -> ColorAssignment:
    """The proper <=k-coloring with the least frequency vector.

    Ties go to the lexicographically smallest color tuple over vertex ids.
    """
    _check_cap(g)
    best = None
    best_fv = None
    for cols in _proper_colorings(g, k):
        counts = [0] * (k + 1)
        for c in cols:
            counts[c] += 1
        fv = tuple(counts[c] for c in range(k, 0, -1))
        if best_fv is None or fv < best_fv:
            best, best_fv = cols, fv
    if best is None:
        raise InfeasibleError(f"graph is not {k}-colorable")
    return ColorAssignment.of(best, k)


@dataclass(frozen=True)
class ColorExchange:
    """A composition of two-color swaps, applied left to right."""

    pairs: tuple[tuple[int, int], ...]

    @classmethod
    def swap(cls, c1: int, c2: int) -> ColorExchange:
        return cls(((c1, c2),))

    def then(self, other: ColorExchange) -> ColorExchange:
        return ColorExchange(self.pairs + other.pairs)

    def reversed(self) -> ColorExchange:
        return ColorExchange(tuple(reversed(self.pairs)))

    def permutation(self, palette: int) -> dict[int, int]:
        perm = {c: c for c in range(1, palette + 1)}
        for c1, c2 in self.pairs:
            if c1 == c2:
                raise ColoringError("a color exchange needs two distinct colors")
            if not (1 <= c1 <= palette and 1 <= c2 <= palette):
                raise ColoringError(f"exchange ({c1},{c2}) outside palette 1..{palette}")
            for c, img in perm.items():
                if img == c1:
                    perm[c] = c2
                elif img == c2:
                    perm[c] = c1
        return perm


def color_exchange(cl: ColorAssignment, f: ColorExchange) -> ColorAssignment:
    perm = f.permutation(cl.palette)
    return ColorAssignment(cl.palette, tuple((v, perm[c]) for v, c in cl.colors))


def kernel_check(g: Graph, U: Iterable[int], k: int) -> bool:
    """Whether every proper k-coloring puts all k colors on U."""
    _check_cap(g)
    chi = oracle.chromatic_number(g)
    if chi != k:
        raise PreconditionError(f"chromatic number is {chi}, not {k}")
    U = sorted(set(U))
    if len(U) < k:
        return False
    for cols in _proper_colorings(g, k):
        if len({cols[u] for u in U}) < k:
            return False
    return True


def exchanges_to_align(src: Mapping[int, int], dst: Mapping[int, int], palette: int) -> ColorExchange:
    """Swaps turning each src color into the dst color on the shared keys.

    The keys must carry pairwise distinct colors on both sides.
    """
    target = {src[v]: dst[v] for v in src}
    pairs = []
    current = {c: c for c in range(1, palette + 1)}  # original color -> present color
    for orig in sorted(target):
        want = target[orig]
        have = current[orig]
        if have != want:
            pairs.append((have, want))
            for c, img in current.items():
                if img == have:
                    current[c] = want
                elif img == want:
                    current[c] = have
    return ColorExchange(tuple(pairs))


def combine_colorings(
    g: Graph, W: Iterable[int], cl_l: ColorAssignment, cl_r: ColorAssignment
) -> ColorAssignment:
    """Merge side colorings that meet on the clique cut set W."""
    W = sorted(set(W))
    for a, b in itertools.combinations(W, 2):
        if not g.has_edge(a, b):
            raise StructureError(f"cut set is not a clique: {a} and {b} are not adjacent")
    if len(components_without(g, W)) < 2:
        raise StructureError("W does not separate the graph")
    left, right = cl_l.mapping, cl_r.mapping
    for v in W:
        if v not in left or v not in right:
            raise StructureError(f"cut vertex {v} missing from a side coloring")
    palette = max(cl_l.palette, cl_r.palette)
    swaps = exchanges_to_align({v: right[v] for v in W}, {v: left[v] for v in W}, palette)
    moved = color_exchange(ColorAssignment(palette, cl_r.colors), swaps).mapping
    merged = dict(moved)
    merged.update(left)
    if set(merged) != set(g.vertices):
        raise StructureError("side colorings do not cover the graph")
    out = ColorAssignment.of(merged, palette)
    if not is_proper(g, out):
        raise StructureError("side colorings are not proper on their sides")
    return out


__all__ = [
    "ColorAssignment",
    "ColorExchange",
    "ColoringError",
    "IncompleteAssignmentError",
    "InfeasibleError",
    "PreconditionError",
    "StructureError",
    "ColoringBudgetError",
    "is_proper",
    "frequency_vector",
    "frequency_compare",
    "min_frequency_coloring",
    "color_exchange",
    "kernel_check",
    "combine_colorings",
    "exchanges_to_align",
    "GraphError",
]
