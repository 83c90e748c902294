"""Conditional-independence decisions.

Three back-ends share the :class:`CITester` contract:

* :class:`GaussianTester` -- Fisher-z test of zero partial correlation,
* :class:`OracleTester` -- exact m-separation in a known graph,
* :class:`ScriptedTester` -- fixed answers for chosen queries on top of another tester.

Queries are canonicalised to ``(min(u, v), max(u, v), sorted(S))`` so that
``test(u, v, S)`` and ``test(v, u, S)`` hit the same cache entry.
"""

from __future__ import annotations

import csv
import math
import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import norm

from .graph import MixedGraph
from .separation import m_separated

EPS = 1e-12


class DataError(ValueError):
    """Malformed dataset input."""


class ConfigError(ValueError):
    """Inconsistent tester configuration."""


@dataclass(frozen=True)
class CIDecision:
    independent: bool
    statistic: float | None = None
    reliable: bool = True
    pvalue: float | None = None


@dataclass
class SufficientStats:
    """Sample correlation matrix plus the sample size it came from."""

    corr: np.ndarray
    n: int
    labels: tuple

    def __post_init__(self):
        self.corr = np.asarray(self.corr, dtype=float)
        self.labels = tuple(self.labels)
        p = len(self.labels)
        if self.corr.shape != (p, p):
            raise DataError(f"correlation matrix must be {p}x{p}, got {self.corr.shape}")
        if not np.allclose(self.corr, self.corr.T, atol=1e-12, rtol=0):
            raise DataError("correlation matrix is not symmetric")
        if p and not np.all(np.diag(self.corr) == 1.0):
            raise DataError("correlation matrix must have a unit diagonal")
        if self.n < 1:
            raise DataError("n must be at least 1")

    @classmethod
    def from_data(cls, data, labels: Sequence[str] | None = None) -> "SufficientStats":
        data = np.asarray(data, dtype=float)
        if data.ndim != 2:
            raise DataError("data must be a 2-d array")
        if not np.all(np.isfinite(data)):
            raise DataError("data contains missing or non-finite values")
        n, p = data.shape
        if labels is None:
            labels = [f"X{i + 1}" for i in range(p)]
        if n < 2:
            corr = np.eye(p)
        else:
            with np.errstate(invalid="ignore", divide="ignore"):
                corr = np.corrcoef(data, rowvar=False).reshape(p, p)
            # constant columns have undefined correlation; treat as uncorrelated
            corr = np.where(np.isfinite(corr), corr, 0.0)
            corr = (corr + corr.T) / 2
            np.fill_diagonal(corr, 1.0)
        return cls(corr, n, labels)

    @classmethod
    def from_csv(cls, path) -> "SufficientStats":
        labels, data = read_csv(path)
        return cls.from_data(data, labels)


def read_csv(path) -> tuple:
    """Read a header-plus-rows numeric CSV; any blank or non-numeric cell is an error."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header) or any(not h for h in header):
        raise DataError(f"{path}: header labels must be unique and nonempty")
    body = [r for r in rows[1:] if r]
    out = np.empty((len(body), len(header)))
    for k, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise DataError(f"{path}:{k}: expected {len(header)} fields, got {len(r)}")
        try:
            out[k - 2] = [float(x) for x in r]
        except ValueError:
            raise DataError(f"{path}:{k}: missing or non-numeric value") from None
    if not np.all(np.isfinite(out)):
        raise DataError(f"{path}: non-finite values")
    return header, out


def write_csv(path, labels: Sequence[str], data) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(labels)
        for row in np.asarray(data):
            w.writerow([repr(float(x)) for x in row])


def partial_correlation(stats: SufficientStats, u: int, v: int, S: Iterable[int] = ()) -> float:
    """Sample partial correlation of ``u`` and ``v`` given ``S``.

    Inverts the correlation submatrix over ``[u, v, *S]`` (pseudo-inverse if
    singular).  Returns ``nan`` when the result is still degenerate.
    """
    S = list(S)
    if u == v or u in S or v in S:
        raise ValueError("u, v must differ and lie outside S")
    if not S:
        return float(stats.corr[u, v])
    idx = [u, v, *S]
    sub = stats.corr[np.ix_(idx, idx)]
    try:
        prec = np.linalg.inv(sub)
    except np.linalg.LinAlgError:
        prec = np.linalg.pinv(sub)
    denom = prec[0, 0] * prec[1, 1]
    if not np.isfinite(denom) or denom <= 0:
        return math.nan
    r = -prec[0, 1] / math.sqrt(denom)
    return float(r) if math.isfinite(r) else math.nan


def fisher_z_test(stats: SufficientStats, u: int, v: int, S: Iterable[int], alpha: float) -> CIDecision:
    """Two-sided Fisher-z test of zero partial correlation at level ``alpha``.

    A test with ``n - |S| - 3 <= 0`` or a degenerate partial correlation is
    reported as dependent with ``reliable=False``, so the edge is kept.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    S = list(S)
    dof = stats.n - len(S) - 3
    if dof <= 0:
        return CIDecision(False, None, reliable=False)
    r = partial_correlation(stats, u, v, S)
    if math.isnan(r):
        return CIDecision(False, None, reliable=False)
    r = min(max(r, -1 + EPS), 1 - EPS)
    z = 0.5 * math.log((1 + r) / (1 - r))
    stat = math.sqrt(dof) * abs(z)
    crit = float(norm.ppf(1 - alpha / 2))
    pval = float(2 * norm.sf(stat))
    return CIDecision(bool(stat <= crit), stat, True, pval)


def canonical_query(u: int, v: int, S: Iterable[int]) -> tuple:
    S = tuple(sorted(set(S)))
    if u == v or u in S or v in S:
        raise ValueError(f"invalid CI query ({u}, {v} | {S})")
    return (u, v, S) if u < v else (v, u, S)


class CITester:
    """Base class: canonicalises, caches and counts queries.

    Subclasses implement :meth:`_decide` on canonical integer queries.
    ``call_count`` counts evaluations of ``_decide``; ``query_count`` counts
    every call to :meth:`test`.
    """

    def __init__(self, variables: Sequence[str], cache: bool = True):
        self.variables = tuple(variables)
        self._index = {v: i for i, v in enumerate(self.variables)}
        self.cache_enabled = cache
        self._cache: dict = {}
        self._lock = threading.Lock()
        self.call_count = 0
        self.query_count = 0

    def _ix(self, v) -> int:
        if isinstance(v, str):
            return self._index[v]
        return int(v)

    def test(self, u, v, S: Iterable = ()) -> CIDecision:
        key = canonical_query(self._ix(u), self._ix(v), [self._ix(s) for s in S])
        with self._lock:
            self.query_count += 1
            if self.cache_enabled and key in self._cache:
                return self._cache[key]
        decision = self._decide(*key)
        with self._lock:
            self.call_count += 1
            if self.cache_enabled:
                decision = self._cache.setdefault(key, decision)
        return decision

    def independent(self, u, v, S: Iterable = ()) -> bool:
        return self.test(u, v, S).independent

    def _decide(self, u: int, v: int, S: tuple) -> CIDecision:
        raise NotImplementedError

    def reset_counts(self):
        with self._lock:
            self.call_count = 0
            self.query_count = 0


class GaussianTester(CITester):
    def __init__(self, stats: SufficientStats, alpha: float = 0.005, cache: bool = True):
        super().__init__(stats.labels, cache)
        if not 0 < alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        self.stats = stats
        self.alpha = alpha

    def _decide(self, u, v, S):
        return fisher_z_test(self.stats, u, v, S, self.alpha)


class OracleTester(CITester):
    """Answers every query by m-separation in ``graph``."""

    def __init__(self, graph: MixedGraph, cache: bool = True):
        super().__init__(graph.vertices, cache)
        self.graph = graph

    def _decide(self, u, v, S):
        return CIDecision(m_separated(self.graph, [u], [v], S))


def oracle_tester(graph: MixedGraph, cache: bool = True) -> OracleTester:
    return OracleTester(graph, cache)


class ScriptedTester(CITester):
    """Fixed decisions for listed queries; everything else goes to ``base``.

    ``overrides`` holds ``(u, v, S, independent)`` tuples with labels or
    indices.  Listing the same query twice with different answers is a
    :class:`ConfigError`.
    """

    def __init__(self, base: CITester | MixedGraph, overrides: Iterable = (), cache: bool = True):
        if isinstance(base, MixedGraph):
            base = OracleTester(base, cache)
        super().__init__(base.variables, cache)
        self.base = base
        self.overrides: dict = {}
        for u, v, S, indep in overrides:
            key = canonical_query(self._ix(u), self._ix(v), [self._ix(s) for s in S])
            if key in self.overrides and self.overrides[key].independent != bool(indep):
                raise ConfigError(f"conflicting overrides for {key}")
            self.overrides[key] = CIDecision(bool(indep))

    def _decide(self, u, v, S):
        hit = self.overrides.get((u, v, S))
        if hit is not None:
            return hit
        return self.base.test(u, v, S)


def scripted_tester(base, overrides: Iterable = ()) -> ScriptedTester:
    return ScriptedTester(base, overrides)
