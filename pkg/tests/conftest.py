from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import strategies as st

from minorverify.graph_core import Graph


def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    return Graph.from_edges(n, [e for e in itertools.combinations(range(n), 2) if rng.random() < p])


@st.composite
def graphs(draw, max_n: int = 7, min_n: int = 0):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [e for e, keep in zip(pairs, mask) if keep])


@pytest.fixture
def rng():
    return random.Random(20240601)
