import itertools

import pytest
from hypothesis import strategies as st

from mvrcg.graph import MixedGraph, graph
from mvrcg.simulate import GeneratorParams, random_mvr_cg


@st.composite
def mvr_graphs(draw, min_p=1, max_p=7):
    p = draw(st.integers(min_p, max_p))
    N = draw(st.floats(0, max(p - 1, 0))) if p > 1 else 0.0
    seed = draw(st.integers(0, 2**31 - 1))
    return random_mvr_cg(GeneratorParams(p, N, seed))


@st.composite
def mixed_graphs(draw, max_p=6):
    """Arbitrary mixed graphs (directed / bidirected / undirected), possibly cyclic."""
    p = draw(st.integers(1, max_p))
    labels = [f"v{i}" for i in range(p)]
    edges = []
    for i, j in itertools.combinations(range(p), 2):
        kind = draw(st.sampled_from([None, None, "->", "<-", "<->", "--"]))
        if kind:
            edges.append(f"{labels[i]} {kind} {labels[j]}")
    return MixedGraph(labels, edges)


@pytest.fixture
def dense_dag():
    return graph("abcde", "a -> b", "a -> c", "b -> c", "b -> d", "b -> e", "c -> d", "c -> e", "d -> e")


@pytest.fixture
def collider_dag():
    return graph("abcde", "b -> a", "c -> a", "b -> d", "c -> e", "d -> e")


@pytest.fixture
def twin_vstructs():
    return graph("abcdef", "a -> c", "e -> c", "b -> d", "f -> d", "c -- d")
