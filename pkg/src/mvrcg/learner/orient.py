"""Collider detection and the arrowhead propagation rules.

Orientation only ever adds arrowheads.  An edge ``x - y`` that receives an
arrowhead at ``y`` becomes ``x -> y``; if it already had one at ``x`` it
becomes ``x <-> y``.

The three rules, for unshielded-triple labels supplied by the caller:

R1  ``a *-> b -- c``, ``a`` and ``c`` nonadjacent, ``(a, b, c)`` a noncollider
    => arrowhead at ``c``.
R2  ``a *-> b *-> c`` and ``a - c`` => arrowhead at ``c`` on ``a - c``.
R3  ``c *-> b <-* d``, ``c - a - d`` with ``c`` and ``d`` nonadjacent and
    ``(c, a, d)`` a noncollider, ``a - b`` => arrowhead at ``b`` on ``a - b``.

R2 is what forbids partially directed cycles through the triangle ``a, b, c``;
R3 holds because an arrowhead at ``a`` on ``a - b`` would force arrowheads at
``a`` from both ``c`` and ``d``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import chain, combinations
from typing import Callable, Iterator, Sequence

from ..citest import CITester
from ..graph import ARROW, TAIL, GraphBuilder, MixedGraph, _GraphBase
from .skeleton import SepsetMap

COLLIDER = "collider"
NONCOLLIDER = "noncollider"
AMBIGUOUS = "ambiguous"


def triple_key(i: int, j: int, k: int) -> tuple:
    return (i, j, k) if i < k else (k, j, i)


@dataclass(frozen=True)
class TripleLabel:
    triple: tuple  # (i, j, k) with i < k
    label: str
    with_middle: int  # separating sets containing the middle vertex
    total: int  # separating sets found


def labels_from_sepsets(H: _GraphBase, sepsets: SepsetMap) -> dict:
    """Plain PC-like decision: collider iff the middle vertex is outside ``S_ik``."""
    out = {}
    for i, j, k in H.unshielded_triples():
        S = sepsets.get_pair(i, k)
        if S is None:
            raise ValueError(f"no separating set recorded for nonadjacent pair ({i}, {k})")
        out[(i, j, k)] = NONCOLLIDER if j in S else COLLIDER
    return out


def labels_from_graph(G: _GraphBase) -> dict:
    """Exact labels read off a known graph: collider iff both arrowheads point at the middle."""
    return {
        (i, j, k): COLLIDER if G.is_arrow_into(i, j) and G.is_arrow_into(k, j) else NONCOLLIDER
        for i, j, k in G.unshielded_triples()
    }


def _majority_label(frac: float, lo: float, hi: float) -> str:
    if lo == 0 and hi == 100:
        if frac == 0:
            return COLLIDER
        if frac == 1:
            return NONCOLLIDER
        return AMBIGUOUS
    if frac * 100 < lo:
        return COLLIDER
    if frac * 100 > hi:
        return NONCOLLIDER
    return AMBIGUOUS


def classify_triples(H: _GraphBase, tester: CITester, lo: float = 0, hi: float = 100) -> list:
    """Label every unshielded triple of the skeleton ``H`` by majority over separating sets.

    All subsets of ``ad_H(i)`` and of ``ad_H(k)`` are tested for separating
    ``i`` and ``k``.  With ``f`` the fraction of separating sets containing
    ``j``: no separating set => ambiguous; ``100 f < lo`` => collider;
    ``100 f > hi`` => noncollider; otherwise ambiguous.  ``(lo, hi) = (0, 100)``
    is the conservative rule (collider iff ``j`` is in none, noncollider iff
    in all).
    """
    if not 0 <= lo <= hi <= 100:
        raise ValueError("need 0 <= lo <= hi <= 100")
    out = []
    for i, j, k in H.unshielded_triples():
        candidates = set()
        for base in (H.adjacent(i) - {k}, H.adjacent(k) - {i}):
            base = sorted(base)
            candidates.update(
                frozenset(c) for c in chain.from_iterable(combinations(base, r) for r in range(len(base) + 1))
            )
        seps = [S for S in sorted(candidates, key=lambda s: (len(s), sorted(s))) if tester.independent(i, k, S)]
        hits = sum(j in S for S in seps)
        if not seps:
            label = AMBIGUOUS
        else:
            label = _majority_label(hits / len(seps), lo, hi)
        out.append(TripleLabel((i, j, k), label, hits, len(seps)))
    return out


def orient_colliders(H: _GraphBase, labels: dict) -> MixedGraph:
    """Put arrowheads at ``j`` for every triple labelled collider."""
    b = GraphBuilder(H)
    for (i, j, k), lab in sorted(labels.items()):
        if lab == COLLIDER:
            b.add_arrowhead(i, j)
            b.add_arrowhead(k, j)
    return b.freeze()


def vstructures_plain(H: _GraphBase, sepsets: SepsetMap) -> MixedGraph:
    return orient_colliders(H, labels_from_sepsets(H, sepsets))


def _noncollider(labels: dict, i: int, j: int, k: int) -> bool:
    return labels.get(triple_key(i, j, k)) == NONCOLLIDER


def _r1(g: _GraphBase, labels: dict, order: Sequence[int], rank: list) -> Iterator[tuple]:
    by_rank = rank.__getitem__
    for a in order:
        for b in sorted(g.adjacent(a), key=by_rank):
            if not g.is_arrow_into(a, b):
                continue
            for c in sorted(g.adjacent(b), key=by_rank):
                if c == a or g.has_edge(a, c):
                    continue
                if g.is_undirected(b, c) and _noncollider(labels, a, b, c):
                    yield (b, c)


def _r2(g: _GraphBase, labels: dict, order: Sequence[int], rank: list) -> Iterator[tuple]:
    by_rank = rank.__getitem__
    for a in order:
        for b in sorted(g.adjacent(a), key=by_rank):
            if not g.is_arrow_into(a, b):
                continue
            for c in sorted(g.adjacent(b), key=by_rank):
                if c != a and g.has_edge(a, c) and g.is_arrow_into(b, c) and not g.is_arrow_into(a, c):
                    yield (a, c)


def _r3(g: _GraphBase, labels: dict, order: Sequence[int], rank: list) -> Iterator[tuple]:
    by_rank = rank.__getitem__
    for a in order:
        for b in sorted(g.adjacent(a), key=by_rank):
            if g.is_arrow_into(a, b):
                continue
            common = sorted((g.adjacent(a) & g.adjacent(b)), key=by_rank)
            into_b = [x for x in common if g.is_arrow_into(x, b)]
            for c, d in combinations(into_b, 2):
                if not g.has_edge(c, d) and _noncollider(labels, c, a, d):
                    yield (a, b)
                    break


RULES: tuple = (_r1, _r2, _r3)


def _rank(p: int, ordering) -> tuple:
    order = list(range(p)) if ordering is None else list(ordering)
    if sorted(order) != list(range(p)):
        raise ValueError("ordering must be a permutation of the variables")
    rank = [0] * p
    for r, v in enumerate(order):
        rank[v] = r
    return order, rank


def apply_rules_sequential(G: _GraphBase, labels: dict, ordering=None, rules: Sequence[Callable] = RULES) -> MixedGraph:
    """Apply R1, R2, R3 one orientation at a time until nothing changes.

    Candidates are visited in ``ordering`` sequence and each orientation takes
    effect immediately, so later candidates see it; the outcome may depend
    on ``ordering``.
    """
    order, rank = _rank(G.p, ordering)
    b = GraphBuilder(G)
    changed = True
    while changed:
        changed = False
        for rule in rules:
            while True:
                hit = next(rule(b, labels, order, rank), None)
                if hit is None:
                    break
                b.add_arrowhead(*hit)
                changed = True
    return b.freeze()


def apply_rules_lists(G: _GraphBase, labels: dict, ordering=None, rules: Sequence[Callable] = RULES) -> MixedGraph:
    """Apply each rule to all of its matches on the same graph at once.

    Every match of R1 is collected first and then all arrowheads are added, so
    two matches orienting one edge in opposite directions leave it
    bidirected.  Then R2, then R3, repeated to a fixpoint.  The result does
    not depend on ``ordering``.
    """
    order, rank = _rank(G.p, ordering)
    b = GraphBuilder(G)
    changed = True
    while changed:
        changed = False
        for rule in rules:
            hits = set(rule(b, labels, order, rank))
            for hit in sorted(hits):
                changed |= b.add_arrowhead(*hit)
    return b.freeze()
