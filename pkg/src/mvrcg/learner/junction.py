"""Orient the undirected part of an essential graph along a junction tree."""

from __future__ import annotations

from collections import deque

from ..graph import TAIL, ARROW, GraphBuilder, MixedGraph, StructureError, _GraphBase
from ..separation import has_partially_directed_cycle


def max_cardinality_search(nbrs: list, rank: list) -> list:
    """Maximum-cardinality search order; ties go to the lowest rank."""
    p = len(nbrs)
    weight = [0] * p
    done = [False] * p
    order = []
    for _ in range(p):
        v = max((u for u in range(p) if not done[u]), key=lambda u: (weight[u], -rank[u]))
        done[v] = True
        order.append(v)
        for u in nbrs[v]:
            if not done[u]:
                weight[u] += 1
    return order


def chordal_cliques(nbrs: list, rank: list) -> list:
    """Maximal cliques of a chordal graph via MCS; raises :class:`StructureError` otherwise."""
    order = max_cardinality_search(nbrs, rank)
    pos = {v: k for k, v in enumerate(order)}
    earlier = {v: {u for u in nbrs[v] if pos[u] < pos[v]} for v in order}
    # Tarjan-Yannakakis zero fill-in test
    for v in order:
        if not earlier[v]:
            continue
        f = max(earlier[v], key=pos.__getitem__)
        if not (earlier[v] - {f}) <= earlier[f]:
            raise StructureError("undirected part is not chordal")
    cands = [frozenset(earlier[v] | {v}) for v in order]
    cliques = []
    for c in cands:
        if any(c < d for d in cands) or c in cliques:
            continue
        cliques.append(c)
    return cliques


def junction_tree(cliques: list) -> list:
    """Maximum-weight spanning tree over clique intersections, as adjacency lists.

    Cliques in different connected components get joined through empty
    separators.
    """
    n = len(cliques)
    pairs = sorted(
        ((len(cliques[i] & cliques[j]), i, j) for i in range(n) for j in range(i + 1, n)),
        key=lambda t: (-t[0], t[1], t[2]),
    )
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree = [[] for _ in range(n)]
    for _, i, j in pairs:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            tree[i].append(j)
            tree[j].append(i)
    return tree


def orient_remaining_undirected(G: _GraphBase, ordering=None) -> MixedGraph:
    """Turn every undirected edge of ``G`` into a directed one.

    The undirected subgraph is decomposed into cliques, joined in a junction
    tree rooted at the clique holding the lowest-ranked vertex.  Cliques are
    ordered by distance from the root, vertices by the first clique they
    appear in (rank within a clique), and every undirected edge points from
    the earlier vertex to the later one.
    """
    p = G.p
    order = list(range(p)) if ordering is None else list(ordering)
    rank = [0] * p
    for r, v in enumerate(order):
        rank[v] = r
    nbrs = [G.undirected_neighbors(v) for v in range(p)]
    if not any(nbrs):
        return GraphBuilder(G).freeze()

    involved = [v for v in range(p) if nbrs[v]]
    cliques = chordal_cliques(nbrs, rank)
    cliques = [c for c in cliques if any(nbrs[v] for v in c)]
    cliques.sort(key=lambda c: sorted(rank[v] for v in c))
    tree = junction_tree(cliques)

    first = min(involved, key=rank.__getitem__)
    root = next(k for k, c in enumerate(cliques) if first in c)
    seen = {root}
    queue = deque([root])
    clique_order = []
    while queue:
        k = queue.popleft()
        clique_order.append(k)
        for m in sorted(tree[k]):
            if m not in seen:
                seen.add(m)
                queue.append(m)

    vpos = {}
    for k in clique_order:
        for v in sorted(cliques[k], key=rank.__getitem__):
            vpos.setdefault(v, len(vpos))

    b = GraphBuilder(G)
    for u in range(p):
        for v in nbrs[u]:
            if u < v:
                if vpos[u] < vpos[v]:
                    b.set_edge(u, v, TAIL, ARROW)
                else:
                    b.set_edge(v, u, TAIL, ARROW)
    out = b.freeze()
    if has_partially_directed_cycle(out):
        raise StructureError("orientation produced a partially directed cycle")
    return out
