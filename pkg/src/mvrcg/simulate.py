"""Random MVR chain graphs and linear-Gaussian samples from them."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import ARROW, TAIL, GraphError, MixedGraph


@dataclass(frozen=True)
class GeneratorParams:
    p: int
    N: float = 2.0
    seed: int = 0
    k: int | None = None  # number of chain components; random in 1..p when None

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be at least 1")
        if not 0 <= self.N <= max(self.p - 1, 0):
            raise ValueError("N must lie in [0, p - 1]")
        if self.k is not None and not 1 <= self.k <= self.p:
            raise ValueError("k must lie in 1..p")


@dataclass
class LatentDag:
    dag: MixedGraph
    observed: tuple
    latents: tuple
    weights: dict  # (parent label, child label) -> coefficient
    noise: dict = field(default_factory=dict)  # label -> variance


@dataclass
class Dataset:
    columns: tuple
    rows: np.ndarray


def split_intervals(p: int, k: int) -> list:
    """Split ``0..p-1`` into ``k`` contiguous blocks; earlier blocks take the remainder."""
    base, extra = divmod(p, k)
    out, start = [], 0
    for m in range(k):
        size = base + (1 if m < extra else 0)
        out.append(list(range(start, start + size)))
        start += size
    return out


def random_mvr_cg(params: GeneratorParams, labels=None) -> MixedGraph:
    """Random MVR CG with expected vertex degree ``N``.

    Lower-triangle Bernoulli(N / (p - 1)) fill, symmetrised; the vertices are
    cut into ``k`` consecutive chain components and every entry pointing
    from a later component back to an earlier one is cleared.  A surviving
    symmetric pair is a bidirected edge, a one-sided entry ``A[i, j]`` the
    directed edge ``i -> j``.
    """
    p = params.p
    rng = np.random.default_rng(params.seed)
    labels = list(labels) if labels is not None else [f"X{i + 1}" for i in range(p)]
    if len(labels) != p:
        raise ValueError("need one label per vertex")
    s = params.N / (p - 1) if p > 1 else 0.0
    A = np.zeros((p, p), dtype=np.int8)
    low = np.tril_indices(p, -1)
    A[low] = rng.random(len(low[0])) < s
    A = A | A.T
    k = params.k if params.k is not None else int(rng.integers(1, p + 1))
    comp = np.empty(p, dtype=int)
    for m, block in enumerate(split_intervals(p, k)):
        comp[block] = m
    A[comp[:, None] > comp[None, :]] = 0

    edges = []
    for i in range(p):
        for j in range(i + 1, p):
            if A[i, j] and A[j, i]:
                edges.append((i, j, ARROW, ARROW))
            elif A[i, j]:
                edges.append((i, j, TAIL, ARROW))
            elif A[j, i]:
                edges.append((j, i, TAIL, ARROW))
    return MixedGraph(labels, edges)


def _weight(rng) -> float:
    return float(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 1.5))


def cg_to_dag_with_latents(G: MixedGraph, seed: int = 0) -> LatentDag:
    """Replace each ``a <-> b`` by ``a <- L -> b`` with a fresh latent ``L``.

    Edge weights are drawn uniformly from ``[-1.5, -0.5] U [0.5, 1.5]``; every
    noise variance is 1.
    """
    rng = np.random.default_rng(seed)
    observed = tuple(G.vertices)
    taken = set(observed)
    latents, edges = [], []
    for i, j, mi, mj in G.edges():
        a, b = observed[i], observed[j]
        if mi is TAIL and mj is TAIL:
            raise GraphError(f"undirected edge {a} -- {b} in an MVR chain graph")
        if mi is ARROW and mj is ARROW:
            n = len(latents) + 1
            name = f"L{n}"
            while name in taken:
                name = "_" + name
            taken.add(name)
            latents.append(name)
            edges += [(name, a), (name, b)]
        elif mj is ARROW:
            edges.append((a, b))
        else:
            edges.append((b, a))
    labels = list(observed) + latents
    dag = MixedGraph(labels, [(u, "->", v) for u, v in edges])
    weights = {e: _weight(rng) for e in edges}
    noise = {v: 1.0 for v in labels}
    return LatentDag(dag, observed, tuple(latents), weights, noise)


def _topological(dag: MixedGraph) -> list:
    indeg = [len(dag.parents(v)) for v in range(dag.p)]
    ready = [v for v in range(dag.p) if indeg[v] == 0]
    out = []
    while ready:
        v = ready.pop(0)
        out.append(v)
        for c in sorted(dag.children(v)):
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
    if len(out) != dag.p:
        raise GraphError("latent DAG has a directed cycle")
    return out


def sample_gaussian(ldag: LatentDag, n: int, seed: int = 0) -> Dataset:
    """Ancestral sampling of the linear SEM; latent columns are dropped."""
    if n < 1:
        raise ValueError("n must be at least 1")
    dag = ldag.dag
    rng = np.random.default_rng(seed)
    X = np.zeros((n, dag.p))
    labels = dag.vertices
    noise = rng.standard_normal((n, dag.p))
    for v in _topological(dag):
        col = np.sqrt(ldag.noise.get(labels[v], 1.0)) * noise[:, v]
        for u in sorted(dag.parents(v)):
            col = col + ldag.weights[(labels[u], labels[v])] * X[:, u]
        X[:, v] = col
    keep = [dag.index(v) for v in ldag.observed]
    return Dataset(tuple(ldag.observed), X[:, keep])


def implied_covariance(ldag: LatentDag) -> np.ndarray:
    """Covariance of the observed variables implied by the SEM."""
    dag = ldag.dag
    p = dag.p
    B = np.zeros((p, p))
    for (u, v), w in ldag.weights.items():
        B[dag.index(v), dag.index(u)] = w
    inv = np.linalg.inv(np.eye(p) - B)
    D = np.diag([ldag.noise.get(v, 1.0) for v in dag.vertices])
    cov = inv @ D @ inv.T
    keep = [dag.index(v) for v in ldag.observed]
    return cov[np.ix_(keep, keep)]
