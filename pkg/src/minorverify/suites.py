"""Acceptance and invariant suites, and the runner that turns them into reports.

A suite is a default corpus plus a per-item check. Each check returns a
verdict dict; ``verdict`` is one of

- ``pass``: everything checked out
- ``fail``: a checker rejected an output, or an oracle disagreed
- ``finding``: the product did its job but a procedure taken from the
  literature broke down (or a rule-conformant instance has no solution);
  archived, never counted as a failure of the criterion
- ``unknown``: a budget ran out before a verdict
- ``skip``: the item is outside the suite's scope
- ``invalid``: the item's side data disagrees with its graph
"""

from __future__ import annotations

import io
import itertools
import json
import os
import re
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator

from . import constraint_color as cc
from . import oracle, reduction, wing
from .coloring import ColorAssignment, is_proper
from .corpus import (
    CorpusItem,
    CorpusRng,
    all_small,
    graph_classes,
    maximal_planar,
    peel_boundary,
    random_graphs,
    random_wing1,
    side_problems,
)
from .graph_core import Graph, apply_minor_action, find_cut_sets, vertex_connectivity
from .minor_lab import admissive_relations, cycle_through, find_twin_cycle, is_consistent_cut_set, kx_minor_on, twin_cycle_problems
from .witness import BudgetExceeded, SearchBudget, witness_problems

__all__ = ["SUITES", "Suite", "SuiteReport", "SuiteError", "run_suite", "system_items", "class_items"]

BAD = ("fail", "invalid", "unknown", "finding")
SEEDS = {
    "wing-equivalence": 101,
    "min-degree": 102,
    "trace-stability": 103,
    "constrained-coloring": 104,
    "outer-two-colors": 105,
    "dirac-k4": 107,
    "reduction-soundness": 108,
    "boundary-claim": 109,
}


class SuiteError(ValueError):
    pass


@dataclass(frozen=True)
class Suite:
    name: str
    criterion: int
    check: Callable[[CorpusItem, SearchBudget], dict]
    corpus: Callable[[str], Iterable[CorpusItem]]
    about: str


@dataclass
class SuiteReport:
    suite: str
    counts: Counter = field(default_factory=Counter)
    tags: Counter = field(default_factory=Counter)
    notable: list = field(default_factory=list)  # verdicts other than pass/skip
    archive: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def clean(self) -> bool:
        return not any(self.counts[v] for v in BAD)

    @property
    def failures(self) -> int:
        return self.counts["fail"] + self.counts["invalid"] + self.counts["unknown"]

    def summary(self) -> dict:
        return {
            "format": 1,
            "suite": self.suite,
            "summary": dict(sorted(self.counts.items())),
            "tags": dict(sorted(self.tags.items())),
            "clean": self.clean,
        }


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _bundle_name(key: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", key)


def run_suite(
    name: str,
    corpus: Iterable[CorpusItem] | None = None,
    budget: SearchBudget | None = None,
    scale: str = "full",
    out: io.TextIOBase | None = None,
    archive_dir: str | os.PathLike | None = None,
) -> SuiteReport:
    """Run one suite, writing one JSON verdict per line to ``out``.

    Items whose verdict is not pass or skip are archived under
    ``archive_dir/<suite>/<item>/`` as item.json plus verdict.json.
    """
    if name not in SUITES:
        raise SuiteError(f"unknown suite {name!r}")
    suite = SUITES[name]
    budget = budget or SearchBudget.from_env()
    items = suite.corpus(scale) if corpus is None else corpus
    rep = SuiteReport(name)
    started = time.monotonic()
    for item in items:
        problems = side_problems(item)
        if problems:
            verdict = {"verdict": "invalid", "problems": problems}
        else:
            try:
                verdict = suite.check(item, budget)
            except BudgetExceeded as exc:
                verdict = {"verdict": "unknown", "reason": str(exc)}
        v = verdict["verdict"]
        rep.counts[v] += 1
        for t in verdict.get("tags", ()):
            rep.tags[t] += 1
        line = {"format": 1, "suite": name, "item": item.key, **verdict}
        if out is not None:
            out.write(_dump(line) + "\n")
        if v not in ("pass", "skip"):
            rep.notable.append(line)
            if archive_dir is not None:
                where = Path(archive_dir) / name / _bundle_name(item.key)
                where.mkdir(parents=True, exist_ok=True)
                (where / "item.json").write_text(item.dumps() + "\n")
                (where / "verdict.json").write_text(_dump(line) + "\n")
                rep.archive.append(str(where))
    if out is not None:
        out.write(_dump(rep.summary()) + "\n")
    rep.elapsed = time.monotonic() - started
    return rep


def _verdict(ok: bool, **detail) -> dict:
    return {"verdict": "pass" if ok else "fail", **detail}


# --- corpora -----------------------------------------------------------------------

def class_items(n_max: int, keep=None, n_min: int = 1, with_order: bool = False) -> Iterator[CorpusItem]:
    """Isomorphism-class representatives as corpus items."""
    for n in range(n_min, n_max + 1):
        for i, g in enumerate(graph_classes(n, keep)):
            side = {}
            if with_order:
                w = wing.build_wing1(g)
                if not isinstance(w, wing.WingEmbedding):
                    continue
                side = {"order": list(w.order)}
            yield CorpusItem(g, "classes", {"n": n}, None, i, side)


def system_items(n, seed: int, count: int) -> Iterator[CorpusItem]:
    """Wing-1 graphs, each carrying a random rule-conformant p3a2 system."""
    rng = CorpusRng(seed)
    for item in random_wing1(n, None, seed, count):
        cs = cc.random_system(item.wing(), rng)
        yield CorpusItem(item.graph, "wing_systems", item.params, seed, item.index, {**item.side, "system": cs.to_json()})


# --- 1: wing equivalence -------------------------------------------------------------

def _wing_equivalence(item: CorpusItem, budget: SearchBudget) -> dict:
    g = item.graph
    built = wing.build_wing1(g)
    ok_build = isinstance(built, wing.WingEmbedding)
    if ok_build and not built.is_valid():
        return _verdict(False, reason="returned order has crossing arcs")
    outer = oracle.is_outerplanar(g, budget)
    return _verdict(ok_build == outer, wing1=ok_build, outerplanar=outer)


def _wing_equivalence_corpus(scale: str):
    top = 7 if scale == "full" else 5
    for n in range(top + 1):
        yield from all_small(n)
    yield from random_graphs((1, 9), None, SEEDS["wing-equivalence"], 1000 if scale == "full" else 100)


# --- 2: low degree ---------------------------------------------------------------------

def _min_degree(item: CorpusItem, budget: SearchBudget) -> dict:
    if item.graph.n == 0:
        return {"verdict": "skip"}
    if "order" in item.side:
        w = item.wing()
    else:
        w = wing.build_wing1(item.graph)
        if not isinstance(w, wing.WingEmbedding):
            return {"verdict": "skip"}
    rep = wing.find_low_degree(w)
    return _verdict(rep.degree <= 2 and rep.count_ok, vertex=rep.vertex, degree=rep.degree,
                    low=len(rep.low_vertices), outer=rep.outer_count)


def _min_degree_corpus(scale: str):
    top = 7 if scale == "full" else 5
    yield from class_items(top, with_order=True)
    yield from random_wing1((1, 10), None, SEEDS["min-degree"], 1000 if scale == "full" else 100)


# --- 3: trace stability ---------------------------------------------------------------------

def _trace_stability(item: CorpusItem, budget: SearchBudget) -> dict:
    g = item.graph
    if "boundary" in item.side:
        walk = tuple(item.side["boundary"])
        if not wing.trace_check(g, wing.Trace(walk, wing.PLANAR_WALK), budget):
            return _verdict(False, reason="boundary walk fails the walk check")
        bad = []
        for u in walk:
            if len(walk) < 3:
                break
            h, w2, _ = peel_boundary(item, u)
            if h.n > 1 and not wing.trace_check(h, wing.Trace(tuple(w2), wing.PLANAR_WALK), budget):
                bad.append(u)
        return _verdict(not bad, mode="planar-walk", peels=len(walk), bad_peels=bad)
    U = frozenset(item.wing().outer().outer)
    if not U:
        return {"verdict": "skip"}
    if not wing.trace_check(g, wing.Trace(tuple(sorted(U))), budget):
        return _verdict(False, reason="outer vertices are not a perimeter trace")
    bad = []
    for u in sorted(U):
        h, U2 = wing.peel_outerplanar_trace(g, U, u)
        if h.n and U2 and not wing.trace_check(h, wing.Trace(tuple(sorted(U2))), budget):
            bad.append(u)
    return _verdict(not bad, mode="outerplanar", peels=len(U), bad_peels=bad)


def _trace_stability_corpus(scale: str):
    count = 1000 if scale == "full" else 60
    yield from random_wing1((1, 9), None, SEEDS["trace-stability"], count)
    yield from maximal_planar((3, 10), SEEDS["trace-stability"], count)


# --- 4: constrained 3-coloring ------------------------------------------------------------------

def _constrained_coloring(item: CorpusItem, budget: SearchBudget) -> dict:
    w = item.wing()
    cs = cc.ConstraintSystem.from_json(item.side["system"])
    problems = cc.validate_system(cs, w.graph, list(w.outer().outer))
    if problems:
        return _verdict(False, reason="system breaks the rules", problems=problems)
    sol = cc.solve_wing1_constraints(w, cs, budget)
    tags = []
    detail: dict = {}
    if sol.blocked is not None:
        tags.append(f"induction-blocked:{sol.blocked.rule}")
        detail["blocked"] = sol.blocked.to_json()
    if sol.coloring is not None:
        bad = cc.check_solution(w.graph, cs, sol.coloring)
        if bad:
            return _verdict(False, reason="checker rejected the assignment", problems=bad, tags=tags)
    brute = None
    if w.graph.n <= cc.BRUTE_FORCE_CAP:
        brute = cc.brute_force_solution(w.graph, cs) is not None
        if sol.coloring is not None and not brute:
            return _verdict(False, reason="brute force found nothing for a checked assignment", tags=tags)
    if sol.coloring is None:
        if brute:
            return _verdict(False, reason="solver found nothing but brute force did", tags=tags, **detail)
        tags.append("unsatisfiable-system")
        return {"verdict": "finding", "tags": tags, "brute_force": brute, **detail}
    if tags:
        return {"verdict": "finding", "tags": tags, "brute_force": brute, **detail}
    return _verdict(True, brute_force=brute)


def _constrained_coloring_corpus(scale: str):
    return system_items((1, 12), SEEDS["constrained-coloring"], 1000 if scale == "full" else 80)


# --- 5: outer two colors ---------------------------------------------------------------------

def _outer_two_colors(item: CorpusItem, budget: SearchBudget) -> dict:
    w = item.wing()
    outer = list(w.outer().outer)
    exists = cc.outer_two_color_exists(w.graph, outer)
    sol = cc.outer_two_color(w)
    tags = [f"induction-blocked:{sol.blocked.rule}"] if sol.blocked is not None else []
    if sol.coloring is None:
        return _verdict(False, reason="solver produced nothing", brute_force=exists, tags=tags)
    cl = sol.coloring
    good = (
        is_proper(w.graph, cl)
        and set(cl.mapping) == set(range(w.graph.n))
        and cl.used() <= {1, 2, 3}
        and len({cl[v] for v in outer}) <= 2
    )
    if not (good and exists):
        return _verdict(False, brute_force=exists, solver_ok=good, tags=tags)
    if tags:
        return {"verdict": "finding", "tags": tags, "blocked": sol.blocked.to_json()}
    return _verdict(True)


def _outer_two_colors_corpus(scale: str):
    yield from class_items(7 if scale == "full" else 5, with_order=True)
    yield from random_wing1((1, 10), None, SEEDS["outer-two-colors"], 1000 if scale == "full" else 100)


# --- 6: twin cycles and cycles through U -------------------------------------------------------

def _twin_cycle(item: CorpusItem, budget: SearchBudget) -> dict:
    g = item.graph
    twins = k4s = cycles = 0
    bad = []
    for U in itertools.combinations(range(g.n), 4):
        tc = find_twin_cycle(g, U, budget)
        k4 = kx_minor_on(g, U, 4, budget)
        if k4 is not None and witness_problems(g, k4, on=U, pattern=Graph.complete(4)):
            bad.append({"U": list(U), "reason": "K4 witness does not validate"})
            continue
        if tc is not None:
            twins += 1
            if twin_cycle_problems(g, tc, U):
                bad.append({"U": list(U), "reason": "twin-cycle does not validate"})
            elif k4 is None:
                bad.append({"U": list(U), "reason": "twin-cycle without a K4 minor on U"})
        if k4 is not None:
            k4s += 1
            continue
        cyc = cycle_through(g, U, budget)
        if cyc is None or not _is_cycle_through(g, cyc, U):
            bad.append({"U": list(U), "reason": "no cycle through U although no K4 minor on U"})
        else:
            cycles += 1
    return _verdict(not bad, twin_cycles=twins, k4_on_u=k4s, cycles=cycles, bad=bad)


def _is_cycle_through(g: Graph, cyc, U) -> bool:
    return (
        len(cyc) >= 3
        and len(set(cyc)) == len(cyc)
        and all(g.has_edge(a, b) for a, b in zip(cyc, cyc[1:] + cyc[:1]))
        and set(U) <= set(cyc)
    )


def _three_connected(g: Graph) -> bool:
    return all(g.degree(v) >= 3 for v in range(g.n)) and vertex_connectivity(g) >= 3


def _twin_cycle_corpus(scale: str):
    return class_items(8 if scale == "full" else 6, _three_connected, n_min=4)


# --- 7: Dirac k = 4 ---------------------------------------------------------------------------------

def _dirac(item: CorpusItem, budget: SearchBudget) -> dict:
    w = reduction.dirac_k4_witness(item.graph, budget)
    problems = witness_problems(item.graph, w, pattern=Graph.complete(4))
    return _verdict(not problems, witness=w.to_json(), problems=problems)


def _chi4(g: Graph) -> bool:
    return oracle.chromatic_number(g) == 4


def _dirac_corpus(scale: str):
    # labeled graphs while that is cheap, isomorphism classes for n = 7
    top = 6 if scale == "full" else 5
    for n in range(4, top + 1):
        for item in all_small(n):
            if _chi4(item.graph):
                yield CorpusItem(item.graph, item.generator, item.params, None, item.index, {"chi": 4})
    if scale == "full":
        yield from class_items(7, _chi4, n_min=7)
    yield from random_graphs((4, 9), None, SEEDS["dirac-k4"], 500 if scale == "full" else 40, chi=4)


# --- 8: reduction soundness ------------------------------------------------------------------------

def _replay(g: Graph, actions) -> Graph:
    h = g
    for a in actions:
        h, _ = apply_minor_action(h, a)
    return h


def _side_coloring(h: Graph, verts, k: int) -> ColorAssignment | None:
    sub, relabel = h.induced(verts)
    back = {i: v for v, i in relabel.items()}
    for col in oracle.enumerate_colorings(sub, k):
        return ColorAssignment.of({back[i]: c for i, c in col.items()}, k)
    return None


def _reduction_soundness(item: CorpusItem, budget: SearchBudget) -> dict:
    g = item.graph
    k = oracle.chromatic_number(g, budget)
    if k not in reduction.KS:
        return {"verdict": "skip"}
    bad = []
    chain, last = reduction.reduce_chain(g, k, budget)
    h = g
    for step in chain:
        if _replay(h, step.actions) != step.graph:
            bad.append("recorded actions do not reproduce the reduced graph")
        if step.graph.n >= h.n or oracle.chromatic_number(step.graph, budget) < k:
            bad.append("accepted reduction lost vertices-or-chromatic guarantee")
        h = step.graph
    if last.kind == "clique_minor" and witness_problems(h, last.witness, pattern=Graph.complete(k)):
        bad.append("clique witness does not validate")
    if last.kind == "irreducible":
        mindeg = min(h.degree(v) for v in range(h.n))
        if mindeg < k or vertex_connectivity(h) < k - 1:
            bad.append("irreducible report is wrong")
    recombined = 0
    for W in find_cut_sets(g, 2):
        for R in admissive_relations(g, W):
            if not is_consistent_cut_set(g, W, R, budget):
                continue
            hh, _, cut, sides = reduction.abs_side_graphs(g, W, R)
            kk = max(oracle.chromatic_number(hh.induced(s + cut)[0], budget) for s in sides)
            left, right = (_side_coloring(hh, s + cut, kk) for s in sides)
            merged = reduction.recombine_cut_colorings(g, W, R, left, right)
            recombined += 1
            if not is_proper(g, merged) or len(merged.used()) > kk:
                bad.append(f"recombination across {sorted(W)} is not a proper {kk}-coloring")
    return _verdict(not bad, k=k, steps=len(chain), end=last.kind, recombined=recombined, problems=bad)


def _connected(g: Graph) -> bool:
    return g.n > 0 and g.is_connected()


def _reduction_corpus(scale: str):
    yield from class_items(7 if scale == "full" else 5, _connected)
    count = 150 if scale == "full" else 10
    yield from random_graphs(8, None, SEEDS["reduction-soundness"], count, chi=3)
    yield from random_graphs(8, None, SEEDS["reduction-soundness"] + 1, count, chi=4)


# --- 9: boundary claim --------------------------------------------------------------------------------

def _boundary_claim(item: CorpusItem, budget: SearchBudget) -> dict:
    g, walk = item.graph, item.side["boundary"]
    exists = cc.boundary_coloring_exists(g, walk) is not None
    att = cc.planar_4color_attempt(g, walk)
    invalid = [f.detail for f in att.failures if f.rule == "validation"]
    if att.coloring is not None and cc.planar_coloring_problems(g, walk, att.coloring):
        invalid.append("returned coloring fails validation")
    tags = ["engine-colored" if att.succeeded else "engine-failed"]
    tags += [f"engine-{f.reading}-{f.rule}" for f in att.failures]
    return _verdict(exists and not invalid, brute_force=exists, engine=att.succeeded, reading=att.reading,
                    invalid=invalid, tags=tags)


def _boundary_corpus(scale: str):
    return maximal_planar((3, 9), SEEDS["boundary-claim"], 200 if scale == "full" else 30)


SUITES: dict[str, Suite] = {
    s.name: s
    for s in [
        Suite("wing-equivalence", 1, _wing_equivalence, _wing_equivalence_corpus,
              "line embedding found exactly when the forbidden-minor oracle says outerplanar"),
        Suite("min-degree", 2, _min_degree, _min_degree_corpus,
              "outerplanar graphs have a degree <= 2 vertex, and at least x-1 of them"),
        Suite("trace-stability", 3, _trace_stability, _trace_stability_corpus,
              "peeling a trace vertex leaves a trace"),
        Suite("constrained-coloring", 4, _constrained_coloring, _constrained_coloring_corpus,
              "rule-conformant systems on wing-1 graphs are 3-colorable"),
        Suite("outer-two-colors", 5, _outer_two_colors, _outer_two_colors_corpus,
              "3-coloring with the outer vertices on two colors"),
        Suite("twin-cycle", 6, _twin_cycle, _twin_cycle_corpus,
              "twin-cycle gives K4 on U; no K4 on U gives a cycle through U"),
        Suite("dirac-k4", 7, _dirac, _dirac_corpus, "constructive K4 minor in 4-chromatic graphs"),
        Suite("reduction-soundness", 8, _reduction_soundness, _reduction_corpus,
              "accepted contractions keep chromatic number; cut-set recombination colors properly"),
        Suite("boundary-claim", 9, _boundary_claim, _boundary_corpus,
              "4-coloring with at most 3 boundary colors; engine outputs validate"),
    ]
}
