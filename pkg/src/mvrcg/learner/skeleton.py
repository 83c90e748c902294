"""Adjacency search: the original and the stable (level-frozen) variants."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from ..citest import CITester
from ..graph import TAIL, MixedGraph


class SepsetMap(dict):
    """Symmetric map ``{u, v} -> S_uv`` for removed edges."""

    def record(self, u: int, v: int, S) -> None:
        S = frozenset(S)
        if u in S or v in S:
            raise ValueError("a separating set cannot contain its endpoints")
        self[frozenset((u, v))] = S

    def get_pair(self, u: int, v: int):
        return self.get(frozenset((u, v)))

    def has_pair(self, u: int, v: int) -> bool:
        return frozenset((u, v)) in self


@dataclass(frozen=True)
class TraceRow:
    """One ordered pair visited during the adjacency search."""

    level: int
    u: int
    v: int
    adjacency: frozenset  # ad_H(u) (or the frozen a_H(u)) when the pair was visited
    eligible: bool  # |adjacency \ {v}| >= level
    sepset: frozenset | None
    removed: bool


@dataclass
class SkeletonResult:
    graph: MixedGraph
    sepsets: SepsetMap
    trace: list
    removals_per_level: list


def _rank_of(p: int, ordering: Sequence[int] | None) -> list:
    if ordering is None:
        ordering = range(p)
    ordering = list(ordering)
    if sorted(ordering) != list(range(p)):
        raise ValueError("ordering must be a permutation of the variables")
    rank = [0] * p
    for r, v in enumerate(ordering):
        rank[v] = r
    return rank


def _search(tester: CITester, ordering, stable: bool) -> SkeletonResult:
    p = len(tester.variables)
    rank = _rank_of(p, ordering)
    order = sorted(range(p), key=rank.__getitem__)
    adj = [set(range(p)) - {v} for v in range(p)]
    sepsets = SepsetMap()
    trace = []
    removals = []

    for level in range(max(p - 1, 0)):
        if not any(len(adj[u]) - 1 >= level for u in range(p) if adj[u]):
            break
        frozen = [frozenset(a) for a in adj] if stable else None
        removed_here = 0
        for u in order:
            source = frozen[u] if stable else adj[u]
            for v in sorted(source, key=rank.__getitem__):
                if v not in adj[u]:
                    continue
                cond = (frozen[u] if stable else adj[u]) - {v}
                snapshot = frozenset(frozen[u] if stable else adj[u])
                if len(cond) < level:
                    trace.append(TraceRow(level, u, v, snapshot, False, None, False))
                    continue
                found = None
                for S in combinations(sorted(cond, key=rank.__getitem__), level):
                    if tester.independent(u, v, S):
                        found = frozenset(S)
                        break
                if found is not None:
                    adj[u].discard(v)
                    adj[v].discard(u)
                    sepsets.record(u, v, found)
                    removed_here += 1
                trace.append(TraceRow(level, u, v, snapshot, True, found, found is not None))
        removals.append(removed_here)

    edges = [(u, v, TAIL, TAIL) for u in range(p) for v in adj[u] if u < v]
    return SkeletonResult(MixedGraph(tester.variables, edges), sepsets, trace, removals)


def skeleton_original(tester: CITester, ordering: Sequence[int] | None = None) -> SkeletonResult:
    """Adjacency search that updates adjacency sets right after every removal.

    Ordered pairs ``(u, v)`` are visited by the rank of ``u`` and then of
    ``v``; conditioning sets of the current size are tried in lexicographic
    rank order.  The result can depend on ``ordering``.
    """
    return _search(tester, ordering, stable=False)


def skeleton_stable(tester: CITester, ordering: Sequence[int] | None = None) -> SkeletonResult:
    """Adjacency search with adjacency sets frozen at the start of each level.

    Removals found at level ``i`` affect conditioning candidates only from
    level ``i + 1`` on, so the edge set returned does not depend on
    ``ordering`` (the recorded separating sets still may).
    """
    return _search(tester, ordering, stable=True)
