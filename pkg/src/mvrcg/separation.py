"""Graphical criteria on mixed graphs: ancestry, chain components, m-separation.

Production separation queries go through :func:`m_separated`, which restricts
the graph to the ancestral closure of the query, builds the augmented
(collider-connection) graph and runs a plain undirected reachability search.
:func:`m_connecting_chain_exists` enumerates chains directly and is kept as an
exponential-time oracle for tests.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable

from .graph import ARROW, TAIL, GraphError, MixedGraph, StructureError, _GraphBase


def adjacency_set(g: _GraphBase, v) -> set:
    """Vertices joined to ``v`` by any edge (indices)."""
    return set(g.adjacent(v))


def relations(g: _GraphBase, A: Iterable) -> tuple:
    """Return ``(pa(A), ne(A), bd(A))`` as index sets, each excluding ``A``.

    ``ne`` collects bidirected neighbours, as in MVR chain graphs.
    """
    A = g.indices(A)
    pa, ne = set(), set()
    for a in A:
        pa |= g.parents(a)
        ne |= g.spouses(a)
    pa -= A
    ne -= A
    return pa, ne, pa | ne


def ancestors(g: _GraphBase, X: Iterable, *, closed: bool = False) -> set:
    """Vertices with a directed path into ``X``.

    With ``closed=True`` returns ``An(X) = an(X) | X``.
    """
    X = g.indices(X)
    seen = set()
    stack = list(X)
    while stack:
        v = stack.pop()
        for u in g.parents(v):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    if closed:
        return seen | set(X)
    return seen


def descendants(g: _GraphBase, X: Iterable) -> set:
    X = g.indices(X)
    seen = set()
    stack = list(X)
    while stack:
        v = stack.pop()
        for u in g.children(v):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def _components(g: _GraphBase, follow) -> list:
    comp = [-1] * g.p
    blocks = []
    for s in range(g.p):
        if comp[s] >= 0:
            continue
        comp[s] = len(blocks)
        block = [s]
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for u in sorted(follow(v)):
                if comp[u] < 0:
                    comp[u] = len(blocks)
                    block.append(u)
                    queue.append(u)
        blocks.append(sorted(block))
    return blocks


def _nondirected(g: _GraphBase, v) -> set:
    return g.spouses(v) | g.undirected_neighbors(v)


def has_partially_directed_cycle(g: _GraphBase) -> bool:
    """True iff some cycle follows only forward ``->``/``<->`` steps and uses a ``->``.

    Equivalently: a directed edge inside one bidirected component, or a
    directed cycle among the bidirected components.  Undirected edges play no
    part.
    """
    blocks = _components(g, g.spouses)
    comp = {}
    for c, block in enumerate(blocks):
        for v in block:
            comp[v] = c
    succ = [set() for _ in blocks]
    for i, j, mi, mj in g.edges():
        if mi is TAIL and mj is ARROW:
            a, b = comp[i], comp[j]
        elif mi is ARROW and mj is TAIL:
            a, b = comp[j], comp[i]
        else:
            continue
        if a == b:
            return True
        succ[a].add(b)
    # Kahn's algorithm on the quotient digraph
    indeg = [0] * len(blocks)
    for a in range(len(blocks)):
        for b in succ[a]:
            indeg[b] += 1
    queue = deque(a for a in range(len(blocks)) if indeg[a] == 0)
    done = 0
    while queue:
        a = queue.popleft()
        done += 1
        for b in succ[a]:
            indeg[b] -= 1
            if indeg[b] == 0:
                queue.append(b)
    return done < len(blocks)


def chain_components(g: _GraphBase) -> list:
    """Connected components over bidirected and undirected edges, as sorted index lists."""
    if has_partially_directed_cycle(g):
        raise StructureError("graph has a partially directed cycle")
    return _components(g, lambda v: _nondirected(g, v))


def augmented_graph(g: _GraphBase) -> MixedGraph:
    """Undirected graph joining every collider-connected pair of ``g``.

    Search states are ``(vertex, arrived with an arrowhead?)``; a walk may pass
    through a vertex only where it is a collider, i.e. where both the
    incoming and the outgoing edge carry an arrowhead at it.
    """
    edges = []
    for s in range(g.p):
        reach = set()
        seen = set()
        queue = deque()
        for u in g.adjacent(s):
            reach.add(u)
            st = (u, g.is_arrow_into(s, u))
            if st not in seen:
                seen.add(st)
                queue.append(st)
        while queue:
            v, arrow_in = queue.popleft()
            if not arrow_in:
                continue
            for w in g.adjacent(v):
                if w == s or not g.is_arrow_into(w, v):
                    continue
                reach.add(w)
                st = (w, g.is_arrow_into(v, w))
                if st not in seen:
                    seen.add(st)
                    queue.append(st)
        edges.extend((s, t, TAIL, TAIL) for t in reach if t > s)
    return MixedGraph(g.vertices, sorted(edges))


def _check_query(g, X, Y, Z):
    X, Y, Z = g.indices(X), g.indices(Y), g.indices(Z)
    if not X or not Y:
        raise GraphError("X and Y must be nonempty")
    if X & Y or X & Z or Y & Z:
        raise GraphError("X, Y and Z must be pairwise disjoint")
    return X, Y, Z


def m_separated(g: _GraphBase, X: Iterable, Y: Iterable, Z: Iterable = ()) -> bool:
    """m-separation of ``X`` and ``Y`` given ``Z`` via the augmented ancestral graph."""
    X, Y, Z = _check_query(g, X, Y, Z)
    keep = ancestors(g, X | Y | Z, closed=True)
    sub = g.subgraph(keep) if len(keep) < g.p else g
    # map indices of g to indices of sub
    order = sorted(keep)
    pos = {v: k for k, v in enumerate(order)}
    aug = augmented_graph(sub)
    blocked = {pos[z] for z in Z}
    targets = {pos[y] for y in Y}
    seen = {pos[x] for x in X}
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for u in aug.adjacent(v):
            if u in targets:
                return False
            if u not in seen and u not in blocked:
                seen.add(u)
                queue.append(u)
    return True


def m_connecting_chain_exists(g: _GraphBase, u, v, Z: Iterable = ()) -> bool:
    """Brute-force search for an m-connecting chain between ``u`` and ``v`` given ``Z``.

    Enumerates simple chains and applies the collider / noncollider rule on
    each one.  Exponential; meant for graphs of ten or fewer vertices.
    """
    u, v = g.index(u), g.index(v)
    Z = g.indices(Z)
    if u in Z or v in Z:
        raise GraphError("endpoints must not be in Z")
    if u == v:
        raise GraphError("endpoints must differ")
    anZ = ancestors(g, Z, closed=True)

    path = [u]
    on_path = {u}

    def ok_middle(prev, mid, nxt) -> bool:
        collider = g.is_arrow_into(prev, mid) and g.is_arrow_into(nxt, mid)
        return mid in anZ if collider else mid not in Z

    def extend() -> bool:
        last = path[-1]
        for w in g.adjacent_sorted(last):
            if w in on_path:
                continue
            if len(path) >= 2 and not ok_middle(path[-2], last, w):
                continue
            if w == v:
                return True
            path.append(w)
            on_path.add(w)
            if extend():
                return True
            path.pop()
            on_path.discard(w)
        return False

    return extend()


def m_separated_bruteforce(g: _GraphBase, X: Iterable, Y: Iterable, Z: Iterable = ()) -> bool:
    X, Y, Z = _check_query(g, X, Y, Z)
    return not any(m_connecting_chain_exists(g, x, y, Z) for x in X for y in Y)


def markov_equivalent(g: _GraphBase, h: _GraphBase) -> bool:
    """Same adjacencies and same unshielded colliders."""
    if tuple(g.vertices) != tuple(h.vertices):
        raise GraphError("graphs are over different vertex lists")
    return (
        g.skeleton_pairs() == h.skeleton_pairs()
        and g.unshielded_colliders() == h.unshielded_colliders()
    )
