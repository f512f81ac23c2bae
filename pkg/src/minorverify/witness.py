"""Minor witnesses, search budgets and the witness checker.

The checker here is deliberately naive: it re-derives connectivity and
adjacency from the host graph and shares nothing with any search.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import Iterable

from .graph_core import Graph

BUDGET_ENV = "MINORVERIFY_NODE_CAP"


class BudgetExceeded(RuntimeError):
    """A search ran out of budget before it could prove presence or absence."""


@dataclass(frozen=True)
class SearchBudget:
    node_cap: int = 2_000_000
    time_cap: float | None = None

    def __post_init__(self):
        if self.node_cap <= 0 or (self.time_cap is not None and self.time_cap <= 0):
            raise ValueError("budget caps must be positive")

    @classmethod
    def from_env(cls, default: int = 2_000_000) -> SearchBudget:
        raw = os.environ.get(BUDGET_ENV)
        return cls(node_cap=int(raw) if raw else default)

    def meter(self) -> BudgetMeter:
        return BudgetMeter(self)


@dataclass
class BudgetMeter:
    budget: SearchBudget
    nodes: int = 0
    started: float = field(default_factory=time.monotonic)

    def tick(self, amount: int = 1) -> None:
        self.nodes += amount
        if self.nodes > self.budget.node_cap:
            raise BudgetExceeded(f"node cap {self.budget.node_cap} exceeded")
        if self.budget.time_cap is not None and self.nodes % 1024 == 0:
            if time.monotonic() - self.started > self.budget.time_cap:
                raise BudgetExceeded(f"time cap {self.budget.time_cap}s exceeded")


DEFAULT_BUDGET = SearchBudget()


@dataclass(frozen=True)
class MinorWitness:
    branch_sets: tuple[frozenset[int], ...]
    model_edges: tuple[tuple[int, int], ...]

    @classmethod
    def build(cls, sets: Iterable[Iterable[int]], edges: Iterable[tuple[int, int]]) -> MinorWitness:
        return cls(
            tuple(frozenset(s) for s in sets),
            tuple(sorted((min(i, j), max(i, j)) for i, j in edges)),
        )

    @classmethod
    def complete(cls, sets: Iterable[Iterable[int]]) -> MinorWitness:
        sets = [frozenset(s) for s in sets]
        k = len(sets)
        return cls.build(sets, [(i, j) for i in range(k) for j in range(i + 1, k)])

    @classmethod
    def bipartite(cls, uppers: Iterable[Iterable[int]], lowers: Iterable[Iterable[int]]) -> MinorWitness:
        up = [frozenset(s) for s in uppers]
        lo = [frozenset(s) for s in lowers]
        edges = [(i, len(up) + j) for i in range(len(up)) for j in range(len(lo))]
        return cls.build(up + lo, edges)

    def to_json(self) -> dict:
        return {
            "branch_sets": [sorted(s) for s in self.branch_sets],
            "model_edges": [list(e) for e in self.model_edges],
        }

    @classmethod
    def from_json(cls, data: dict) -> MinorWitness:
        return cls.build(data["branch_sets"], (tuple(e) for e in data["model_edges"]))


def witness_problems(
    g: Graph,
    w: MinorWitness,
    on: Iterable[int] | None = None,
    pattern: Graph | None = None,
) -> list[str]:
    """Every reason ``w`` fails to certify a minor of ``g``; empty when valid.

    ``on`` requires every branch set to meet that vertex set; ``pattern``
    requires the model edges to contain the pattern's edges.
    """
    problems = []
    seen: set[int] = set()
    for i, s in enumerate(w.branch_sets):
        if not s:
            problems.append(f"branch set {i} is empty")
            continue
        if any(not 0 <= v < g.n for v in s):
            problems.append(f"branch set {i} has vertices outside the graph")
            continue
        if seen & s:
            problems.append(f"branch set {i} overlaps an earlier set")
        seen |= s
        # plain flood fill inside the set
        start = min(s)
        reached = {start}
        frontier = [start]
        while frontier:
            x = frontier.pop()
            for y in g.adj[x]:
                if y in s and y not in reached:
                    reached.add(y)
                    frontier.append(y)
        if reached != s:
            problems.append(f"branch set {i} is not connected")
    k = len(w.branch_sets)
    for i, j in w.model_edges:
        if not (0 <= i < k and 0 <= j < k) or i == j:
            problems.append(f"model edge {i}-{j} is malformed")
            continue
        a, b = w.branch_sets[i], w.branch_sets[j]
        if not any(g.adj[x] & b for x in a):
            problems.append(f"no host edge between branch sets {i} and {j}")
    if on is not None:
        target = set(on)
        for i, s in enumerate(w.branch_sets):
            if not s & target:
                problems.append(f"branch set {i} misses the designated set")
    if pattern is not None:
        if pattern.n != k:
            problems.append(f"pattern has {pattern.n} vertices, witness has {k} branch sets")
        else:
            have = set(w.model_edges)
            for e in pattern.edges():
                if e not in have:
                    problems.append(f"pattern edge {e} missing from the model")
    return problems


def validate_witness(g: Graph, w: MinorWitness, on=None, pattern: Graph | None = None) -> bool:
    return not witness_problems(g, w, on, pattern)
