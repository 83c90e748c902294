"""Mixed graphs with undirected, directed and bidirected edges.

Every edge is stored once, under its canonical pair ``(i, j)`` with ``i < j``,
together with the endpoint mark at each end.  The three edge kinds are the
three admissible mark pairs::

    (TAIL, TAIL)    i -- j
    (TAIL, ARROW)   i -> j
    (ARROW, ARROW)  i <-> j

:class:`MixedGraph` is an immutable value.  Algorithms that need to edit a
graph work on a :class:`GraphBuilder` and call :meth:`GraphBuilder.freeze`.
"""

from __future__ import annotations

import enum
import operator
from typing import Iterable, Iterator, Sequence


class GraphError(ValueError):
    """Unknown vertex, malformed edge or otherwise invalid graph input."""


class StructureError(ValueError):
    """The graph violates a structural precondition (cycles, chordality)."""


class Mark(enum.Enum):
    TAIL = 0
    ARROW = 1


TAIL = Mark.TAIL
ARROW = Mark.ARROW

_SYMBOLS = {
    (TAIL, TAIL): "--",
    (TAIL, ARROW): "->",
    (ARROW, TAIL): "<-",
    (ARROW, ARROW): "<->",
}
_PARSE = {"--": (TAIL, TAIL), "->": (TAIL, ARROW), "<-": (ARROW, TAIL), "<->": (ARROW, ARROW)}


class _GraphBase:
    """Read-only queries shared by frozen graphs and builders."""

    _labels: tuple
    _index: dict
    # _adj[u][v] is the mark at v on the edge u *-* v
    _adj: list

    @property
    def vertices(self) -> tuple:
        return self._labels

    @property
    def p(self) -> int:
        return len(self._labels)

    def __len__(self):
        return len(self._labels)

    def index(self, v) -> int:
        """Resolve a label or an index to an index."""
        if isinstance(v, str):
            try:
                return self._index[v]
            except KeyError:
                raise GraphError(f"unknown vertex {v!r}") from None
        try:
            i = operator.index(v)
        except TypeError:
            raise GraphError(f"unknown vertex {v!r}") from None
        if 0 <= i < len(self._labels):
            return i
        raise GraphError(f"unknown vertex {v!r}")

    def indices(self, vs: Iterable) -> frozenset:
        return frozenset(self.index(v) for v in vs)

    def label(self, i: int) -> str:
        return self._labels[i]

    def labels(self, idx: Iterable[int]) -> set:
        return {self._labels[i] for i in idx}

    def has_edge(self, u, v) -> bool:
        return self.index(v) in self._adj[self.index(u)]

    def mark(self, u, v) -> Mark:
        """Mark at ``v`` on the edge between ``u`` and ``v``."""
        u, v = self.index(u), self.index(v)
        try:
            return self._adj[u][v]
        except KeyError:
            raise GraphError(f"no edge between {self._labels[u]} and {self._labels[v]}") from None

    def is_arrow_into(self, u, v) -> bool:
        """True if ``u *-> v``, i.e. the edge carries an arrowhead at ``v``."""
        u, v = self.index(u), self.index(v)
        return self._adj[u].get(v) is ARROW

    def is_tail_at(self, u, v) -> bool:
        """True if the edge ``u - v`` exists with a tail at ``v``."""
        u, v = self.index(u), self.index(v)
        return self._adj[u].get(v) is TAIL

    def is_directed(self, u, v) -> bool:
        u, v = self.index(u), self.index(v)
        return self._adj[u].get(v) is ARROW and self._adj[v][u] is TAIL

    def is_bidirected(self, u, v) -> bool:
        u, v = self.index(u), self.index(v)
        return self._adj[u].get(v) is ARROW and self._adj[v][u] is ARROW

    def is_undirected(self, u, v) -> bool:
        u, v = self.index(u), self.index(v)
        return self._adj[u].get(v) is TAIL and self._adj[v][u] is TAIL

    def adjacent(self, v) -> frozenset:
        """All vertices joined to ``v`` by an edge of any kind."""
        return frozenset(self._adj[self.index(v)])

    def adjacent_sorted(self, v) -> list:
        return sorted(self._adj[self.index(v)])

    def parents(self, v) -> set:
        v = self.index(v)
        return {u for u, m in self._adj[v].items() if m is TAIL and self._adj[u][v] is ARROW}

    def children(self, v) -> set:
        v = self.index(v)
        return {u for u, m in self._adj[v].items() if m is ARROW and self._adj[u][v] is TAIL}

    def spouses(self, v) -> set:
        """Vertices joined to ``v`` by a bidirected edge (``ne`` for MVR CGs)."""
        v = self.index(v)
        return {u for u, m in self._adj[v].items() if m is ARROW and self._adj[u][v] is ARROW}

    def undirected_neighbors(self, v) -> set:
        v = self.index(v)
        return {u for u, m in self._adj[v].items() if m is TAIL and self._adj[u][v] is TAIL}

    def edges(self) -> Iterator[tuple]:
        """Yield ``(i, j, mark_at_i, mark_at_j)`` with ``i < j`` in index order."""
        for i in range(len(self._labels)):
            for j in sorted(k for k in self._adj[i] if k > i):
                yield i, j, self._adj[j][i], self._adj[i][j]

    def num_edges(self) -> int:
        return sum(len(a) for a in self._adj) // 2

    def skeleton_pairs(self) -> frozenset:
        return frozenset((i, j) for i, j, _, _ in self.edges())

    def edge_kind(self, u, v) -> str | None:
        """``'--'``, ``'->'``, ``'<-'``, ``'<->'`` read from ``u`` to ``v``; None if absent."""
        u, v = self.index(u), self.index(v)
        if v not in self._adj[u]:
            return None
        return _SYMBOLS[(self._adj[v][u], self._adj[u][v])]

    def edge_strings(self) -> list:
        out = []
        for i, j, mi, mj in self.edges():
            a, b = self._labels[i], self._labels[j]
            if (mi, mj) == (ARROW, TAIL):
                out.append(f"{b} -> {a}")
            else:
                out.append(f"{a} {_SYMBOLS[(mi, mj)]} {b}")
        return out

    def unshielded_triples(self) -> list:
        """All ``(i, j, k)`` with ``i < k``, ``j`` adjacent to both, ``i`` and ``k`` not adjacent."""
        out = []
        for j in range(len(self._labels)):
            nb = sorted(self._adj[j])
            for x in range(len(nb)):
                for y in range(x + 1, len(nb)):
                    i, k = nb[x], nb[y]
                    if k not in self._adj[i]:
                        out.append((i, j, k))
        return out

    def unshielded_colliders(self) -> frozenset:
        return frozenset(
            (i, j, k)
            for i, j, k in self.unshielded_triples()
            if self._adj[i][j] is ARROW and self._adj[k][j] is ARROW
        )

    def is_mvr_cg(self) -> bool:
        """No undirected edges and no partially directed cycle."""
        from .separation import has_partially_directed_cycle

        if any(mi is TAIL and mj is TAIL for _, _, mi, mj in self.edges()):
            return False
        return not has_partially_directed_cycle(self)

    def to_text(self) -> str:
        return to_edge_list(self)

    def __repr__(self):
        kind = type(self).__name__
        return f"{kind}([{', '.join(self._labels)}], {self.edge_strings()})"


class MixedGraph(_GraphBase):
    """Immutable mixed graph over a fixed, ordered vertex list."""

    __slots__ = ("_labels", "_index", "_adj", "_key")

    def __init__(self, vertices: Sequence[str], edges: Iterable = ()):
        labels = tuple(str(v) for v in vertices)
        if len(set(labels)) != len(labels):
            raise GraphError("vertex labels must be unique")
        self._labels = labels
        self._index = {v: i for i, v in enumerate(labels)}
        self._adj = [dict() for _ in labels]
        for e in edges:
            _insert(self, *_coerce_edge(self, e))
        self._key = None

    @classmethod
    def _from_adj(cls, labels, index, adj) -> "MixedGraph":
        g = cls.__new__(cls)
        g._labels = labels
        g._index = index
        g._adj = adj
        g._key = None
        return g

    @classmethod
    def complete(cls, vertices: Sequence[str]) -> "MixedGraph":
        """Complete undirected graph."""
        n = len(vertices)
        return cls(vertices, [(i, j, TAIL, TAIL) for i in range(n) for j in range(i + 1, n)])

    def builder(self) -> "GraphBuilder":
        return GraphBuilder(self)

    def skeleton(self) -> "MixedGraph":
        """Same adjacencies, every edge undirected."""
        return MixedGraph(self._labels, [(i, j, TAIL, TAIL) for i, j, _, _ in self.edges()])

    def subgraph(self, keep: Iterable) -> "MixedGraph":
        """Induced subgraph on ``keep`` (vertex order preserved)."""
        keep = self.indices(keep)
        labels = [self._labels[i] for i in range(self.p) if i in keep]
        sub = MixedGraph(labels)
        b = sub.builder()
        for i, j, mi, mj in self.edges():
            if i in keep and j in keep:
                b.set_edge(self._labels[i], self._labels[j], mi, mj)
        return b.freeze()

    def _canonical(self):
        if self._key is None:
            self._key = (self._labels, tuple(self.edges()))
        return self._key

    def __eq__(self, other):
        if not isinstance(other, MixedGraph):
            return NotImplemented
        return self._canonical() == other._canonical()

    def __hash__(self):
        return hash(self._canonical())


class GraphBuilder(_GraphBase):
    """Mutable working copy of a graph."""

    def __init__(self, graph: _GraphBase):
        self._labels = graph._labels
        self._index = graph._index
        self._adj = [dict(a) for a in graph._adj]

    def set_edge(self, u, v, mark_u: Mark, mark_v: Mark):
        u, v = self.index(u), self.index(v)
        if u == v:
            raise GraphError("self-loops are not allowed")
        if mark_u is ARROW and mark_v is TAIL:
            u, v, mark_u, mark_v = v, u, mark_v, mark_u
        if mark_u is ARROW and mark_v is TAIL:  # pragma: no cover - unreachable
            raise GraphError("bad marks")
        self._adj[u][v] = mark_v
        self._adj[v][u] = mark_u

    def remove_edge(self, u, v):
        u, v = self.index(u), self.index(v)
        self._adj[u].pop(v, None)
        self._adj[v].pop(u, None)

    def add_arrowhead(self, u, v) -> bool:
        """Put an arrowhead at ``v`` on the existing edge ``u - v``; returns True if it changed."""
        u, v = self.index(u), self.index(v)
        if v not in self._adj[u]:
            raise GraphError(f"no edge between {self._labels[u]} and {self._labels[v]}")
        if self._adj[u][v] is ARROW:
            return False
        self._adj[u][v] = ARROW
        return True

    def freeze(self) -> MixedGraph:
        return MixedGraph._from_adj(self._labels, self._index, [dict(a) for a in self._adj])


def _coerce_edge(g: _GraphBase, e):
    if isinstance(e, str):
        return _parse_edge_line(g, e)
    if len(e) == 4:
        u, v, mu, mv = e
        return g.index(u), g.index(v), mu, mv
    if len(e) == 3:
        u, sym, v = e
        if sym not in _PARSE:
            raise GraphError(f"unknown edge symbol {sym!r}")
        mu, mv = _PARSE[sym]
        return g.index(u), g.index(v), mu, mv
    raise GraphError(f"cannot interpret edge {e!r}")


def _parse_edge_line(g, line: str):
    parts = line.split()
    if len(parts) != 3 or parts[1] not in _PARSE:
        raise GraphError(f"malformed edge {line!r}")
    mu, mv = _PARSE[parts[1]]
    return g.index(parts[0]), g.index(parts[2]), mu, mv


def _insert(g: _GraphBase, u: int, v: int, mu: Mark, mv: Mark):
    if u == v:
        raise GraphError("self-loops are not allowed")
    if v in g._adj[u]:
        raise GraphError(f"duplicate edge between {g._labels[u]} and {g._labels[v]}")
    g._adj[u][v] = mv
    g._adj[v][u] = mu


def graph(vertices: str | Sequence[str], *edges: str) -> MixedGraph:
    """Shorthand: ``graph("abc", "a -> b", "b <-> c")``."""
    if isinstance(vertices, str):
        vertices = vertices.split(",") if "," in vertices else list(vertices)
    return MixedGraph(vertices, edges)


def to_edge_list(g: _GraphBase) -> str:
    lines = ["vertices: " + ",".join(g.vertices)]
    lines.extend(g.edge_strings())
    return "\n".join(lines) + "\n"


def from_edge_list(text: str) -> MixedGraph:
    """Parse the edge-list format produced by :func:`to_edge_list`.

    ``#`` starts a comment line.  A ``vertices:`` header fixes the vertex
    order; without it, vertices are taken in order of first appearance.
    """
    header = None
    edge_lines = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("vertices:"):
            if header is not None:
                raise GraphError("duplicate vertices header")
            body = line[len("vertices:"):].strip()
            header = [v.strip() for v in body.split(",")] if body else []
            if any(not v for v in header):
                raise GraphError("empty vertex label in header")
            continue
        parts = line.split()
        if len(parts) != 3 or parts[1] not in _PARSE:
            raise GraphError(f"malformed edge line {raw!r}")
        edge_lines.append(parts)
    if header is None:
        header = []
        for a, _, b in edge_lines:
            for v in (a, b):
                if v not in header:
                    header.append(v)
    return MixedGraph(header, [tuple(e) for e in edge_lines])
