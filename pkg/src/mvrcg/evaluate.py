"""Ground-truth essential graphs, comparison metrics and the benchmark grid."""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .citest import GaussianTester, OracleTester, SufficientStats
from .graph import GraphError, MixedGraph, _GraphBase
from .learner import STANDARD_VARIANTS, LearnerConfig, learn
from .learner.orient import apply_rules_lists, labels_from_graph, orient_colliders
from .simulate import GeneratorParams, cg_to_dag_with_latents, random_mvr_cg, sample_gaussian

CSV_COLUMNS = ("variant", "p", "n", "alpha", "replicate", "tpr", "fpr", "tdr", "acc", "shd", "runtime_ms")
METRIC_NAMES = ("tpr", "fpr", "tdr", "acc", "shd", "runtime_ms")


def essential_graph(G: _GraphBase) -> MixedGraph:
    """Skeleton plus the unshielded colliders of ``G``, closed under R1-R3 (list mode)."""
    labels = labels_from_graph(G)
    return apply_rules_lists(orient_colliders(G.skeleton(), labels), labels)


@dataclass(frozen=True)
class MetricsRecord:
    tpr: float
    fpr: float
    tdr: float
    acc: float
    shd: int
    runtime_ms: float = 0.0
    flags: tuple = ()


def shd(g1: _GraphBase, g2: _GraphBase) -> int:
    """Structural Hamming distance: one unit per vertex pair whose edge differs.

    A pair costs 1 if it is adjacent in exactly one graph, or adjacent in both
    with a different pair of endpoint marks.
    """
    if tuple(g1.vertices) != tuple(g2.vertices):
        raise GraphError("graphs are over different vertex lists")
    e1 = {(i, j): (a, b) for i, j, a, b in g1.edges()}
    e2 = {(i, j): (a, b) for i, j, a, b in g2.edges()}
    return sum(e1.get(k) != e2.get(k) for k in e1.keys() | e2.keys())


def metrics(learned: _GraphBase, truth: _GraphBase, runtime_ms: float = 0.0) -> MetricsRecord:
    """Skeleton TPR/FPR/TDR/ACC and SHD between two essential graphs.

    Empty denominators are resolved as TPR = 1 (no true edges), TDR = 1 (no
    learned edges), FPR = 0 (no gaps) and noted in ``flags``.
    """
    if tuple(learned.vertices) != tuple(truth.vertices):
        raise GraphError("graphs are over different vertex lists")
    L, T = learned.skeleton_pairs(), truth.skeleton_pairs()
    p = truth.p
    total = p * (p - 1) // 2
    pos, neg = len(T), total - len(T)
    tp = len(L & T)
    fp = len(L - T)
    tn = neg - fp
    flags = []
    if pos:
        tpr = tp / pos
    else:
        tpr = 1.0
        flags.append("no_true_edges")
    if neg:
        fpr = fp / neg
    else:
        fpr = 0.0
        flags.append("no_true_gaps")
    if L:
        tdr = tp / len(L)
    else:
        tdr = 1.0
        flags.append("no_learned_edges")
    acc = (tp + tn) / total if total else 1.0
    return MetricsRecord(tpr, fpr, tdr, acc, shd(learned, truth), float(runtime_ms), tuple(flags))


@dataclass(frozen=True)
class BenchGrid:
    p_values: tuple = (10,)
    n_values: tuple = (500, 5000)
    alpha_values: tuple = (0.005,)
    N: float = 2.0
    replicates: int = 30
    variants: tuple = STANDARD_VARIANTS
    seed: int = 0
    tester: str = "gaussian"  # or "oracle"

    def __post_init__(self):
        for name in ("p_values", "n_values", "alpha_values", "variants"):
            val = tuple(getattr(self, name))
            if not val:
                raise ValueError(f"{name} must be nonempty")
            object.__setattr__(self, name, val)
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if self.tester not in ("gaussian", "oracle"):
            raise ValueError("tester must be 'gaussian' or 'oracle'")
        for v in self.variants:
            LearnerConfig.from_variant(v)

    @classmethod
    def from_dict(cls, d: dict) -> "BenchGrid":
        alias = {"p": "p_values", "n": "n_values", "alpha": "alpha_values"}
        kw = {alias.get(k, k): v for k, v in d.items()}
        return cls(**kw)

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items()}


@dataclass
class BenchResult:
    rows: list
    summary: list
    failures: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([_fmt(r[c]) for c in CSV_COLUMNS])
        return buf.getvalue()

    def summary_json(self) -> str:
        return json.dumps({"cells": self.summary, "failures": self.failures}, indent=2, sort_keys=True) + "\n"


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _seeds(base: int, p: int, rep: int) -> tuple:
    ss = np.random.SeedSequence([base, p, rep])
    return tuple(int(s.generate_state(1)[0]) for s in ss.spawn(3))


def _replicate(grid: BenchGrid, p: int, rep: int) -> tuple:
    rows, failures = [], []
    g_seed, w_seed, x_seed = _seeds(grid.seed, p, rep)
    N = min(grid.N, p - 1)
    truth = random_mvr_cg(GeneratorParams(p, N, g_seed))
    true_ess = essential_graph(truth)
    ldag = cg_to_dag_with_latents(truth, w_seed)
    for n in grid.n_values:
        stats = None
        if grid.tester == "gaussian":
            data = sample_gaussian(ldag, n, x_seed + n)
            stats = SufficientStats.from_data(data.rows, data.columns)
        for alpha in grid.alpha_values:
            for variant in grid.variants:
                cell = {"variant": variant, "p": p, "n": n, "alpha": alpha, "replicate": rep}
                try:
                    tester = OracleTester(truth) if stats is None else GaussianTester(stats, alpha)
                    res = learn(tester, LearnerConfig.from_variant(variant, alpha=alpha))
                    m = metrics(res.essential, true_ess, res.diagnostics["runtime_ms"])
                except Exception as exc:  # a failed replicate must not sink the cell
                    failures.append({**cell, "error": f"{type(exc).__name__}: {exc}"})
                    continue
                rows.append({**cell, **{k: getattr(m, k) for k in METRIC_NAMES}})
    return rows, failures


def _summarise(rows: list) -> list:
    cells: dict = {}
    for r in rows:
        cells.setdefault((r["variant"], r["p"], r["n"], r["alpha"]), []).append(r)
    out = []
    for (variant, p, n, alpha), rs in sorted(cells.items(), key=lambda kv: (kv[0][1], kv[0][2], kv[0][3], kv[0][0])):
        entry = {"variant": variant, "p": p, "n": n, "alpha": alpha, "replicates": len(rs)}
        for k in METRIC_NAMES:
            vals = np.array([r[k] for r in rs], dtype=float)
            entry[f"{k}_mean"] = float(vals.mean())
            entry[f"{k}_var"] = float(vals.var(ddof=1)) if len(vals) > 1 else 0.0
        out.append(entry)
    return out


def _job(args):
    return _replicate(*args)


def run_benchmark(grid: BenchGrid, workers: int | None = None) -> BenchResult:
    """Generate, sample, learn and score every cell of ``grid``.

    Replicates run in a process pool when ``workers > 1`` (default from the
    ``MVRCG_WORKERS`` environment variable).  Output order is fixed by the
    grid, not by completion order.
    """
    if workers is None:
        workers = int(os.environ.get("MVRCG_WORKERS", "1") or 1)
    jobs = [(grid, p, rep) for p in grid.p_values for rep in range(grid.replicates)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_job, jobs))
    else:
        results = [_job(j) for j in jobs]
    rows, failures = [], []
    for r, f in results:
        rows.extend(r)
        failures.extend(f)
    key = lambda r: (r["p"], r["n"], r["alpha"], grid.variants.index(r["variant"]), r["replicate"])
    rows.sort(key=key)
    failures.sort(key=key)
    return BenchResult(rows, _summarise(rows), failures)
