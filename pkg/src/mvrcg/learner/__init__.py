"""PC-like structure learning for MVR chain graphs.

A run has four stages: adjacency search (``original`` or ``stable``), collider
decisions (``plain`` from recorded separating sets, or ``conservative`` /
``majority`` over all separating sets), arrowhead propagation
(``sequential`` or ``list``), and a final junction-tree orientation of the
remaining undirected edges.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass, field

from ..citest import CITester
from ..graph import MixedGraph, StructureError
from .junction import orient_remaining_undirected
from .orient import (
    AMBIGUOUS,
    COLLIDER,
    NONCOLLIDER,
    TripleLabel,
    apply_rules_lists,
    apply_rules_sequential,
    classify_triples,
    labels_from_graph,
    labels_from_sepsets,
    orient_colliders,
    vstructures_plain,
)
from .skeleton import SepsetMap, SkeletonResult, TraceRow, skeleton_original, skeleton_stable

SKELETON_MODES = ("original", "stable")
TRIPLE_MODES = ("plain", "conservative", "majority")
RULE_MODES = ("sequential", "list")

_VARIANT = re.compile(r"^(original|stable)(?:-(l?)(pc|cpc|mpc))?$")
_TRIPLE_OF = {"pc": "plain", "cpc": "conservative", "mpc": "majority"}

# the six combinations compared in the benchmarks
STANDARD_VARIANTS = ("original", "stable", "stable-cpc", "stable-mpc", "stable-lcpc", "stable-lmpc")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class LearnerConfig:
    skeleton_mode: str = "stable"
    triple_mode: str = "majority"
    rule_mode: str = "list"
    alpha: float = 0.005
    ordering: tuple | None = None
    majority_lo: float = 50.0
    majority_hi: float = 50.0

    def __post_init__(self):
        if self.skeleton_mode not in SKELETON_MODES:
            raise ConfigError(f"skeleton_mode must be one of {SKELETON_MODES}")
        if self.triple_mode not in TRIPLE_MODES:
            raise ConfigError(f"triple_mode must be one of {TRIPLE_MODES}")
        if self.rule_mode not in RULE_MODES:
            raise ConfigError(f"rule_mode must be one of {RULE_MODES}")
        if not 0 <= self.majority_lo <= self.majority_hi <= 100:
            raise ConfigError("need 0 <= majority_lo <= majority_hi <= 100")
        if self.ordering is not None:
            object.__setattr__(self, "ordering", tuple(self.ordering))

    @classmethod
    def from_variant(cls, name: str, **kw) -> "LearnerConfig":
        """Build a config from names such as ``original``, ``stable-cpc`` or ``stable-lmpc``."""
        m = _VARIANT.match(name.strip().lower())
        if not m:
            raise ConfigError(f"unknown variant {name!r}")
        skel, lists, triples = m.group(1), m.group(2), m.group(3) or "pc"
        return cls(
            skeleton_mode=skel,
            triple_mode=_TRIPLE_OF[triples],
            rule_mode="list" if lists else "sequential",
            **kw,
        )

    @property
    def lo_hi(self) -> tuple:
        if self.triple_mode == "conservative":
            return 0.0, 100.0
        return float(self.majority_lo), float(self.majority_hi)

    @property
    def variant(self) -> str:
        if self.triple_mode == "plain" and self.rule_mode == "sequential":
            return self.skeleton_mode
        code = {"plain": "pc", "conservative": "cpc", "majority": "mpc"}[self.triple_mode]
        return f"{self.skeleton_mode}-{'l' if self.rule_mode == 'list' else ''}{code}"


@dataclass
class LearnResult:
    essential: MixedGraph
    final: MixedGraph | None
    sepsets: SepsetMap
    triples: dict  # canonical triple -> label
    ambiguous: list
    skeleton: MixedGraph
    diagnostics: dict = field(default_factory=dict)

    def diagnostics_json(self) -> dict:
        return dict(self.diagnostics)


def _resolve_ordering(tester: CITester, ordering) -> list:
    p = len(tester.variables)
    if ordering is None:
        return list(range(p))
    out = [tester._ix(v) for v in ordering]
    if sorted(out) != list(range(p)):
        raise ConfigError("ordering must be a permutation of the variables")
    return out


def learn(tester: CITester, config: LearnerConfig | None = None) -> LearnResult:
    """Run the configured PC-like variant against ``tester``."""
    config = config or LearnerConfig()
    order = _resolve_ordering(tester, config.ordering)
    calls0 = tester.call_count
    t0 = time.perf_counter()

    search = skeleton_stable if config.skeleton_mode == "stable" else skeleton_original
    sk = search(tester, order)
    H = sk.graph

    if config.triple_mode == "plain":
        labels = labels_from_sepsets(H, sk.sepsets)
    else:
        lo, hi = config.lo_hi
        labels = {t.triple: t.label for t in classify_triples(H, tester, lo, hi)}
    G = orient_colliders(H, labels)

    apply = apply_rules_lists if config.rule_mode == "list" else apply_rules_sequential
    essential = apply(G, labels, order)

    final, final_error = None, None
    try:
        # declared vertex order, not `order`: this stage must not reintroduce order-dependence
        final = orient_remaining_undirected(essential)
    except StructureError as exc:
        final_error = str(exc)

    runtime_ms = (time.perf_counter() - t0) * 1000
    ambiguous = sorted(t for t, lab in labels.items() if lab == AMBIGUOUS)
    V = tester.variables
    diagnostics = {
        "variant": config.variant,
        "alpha": config.alpha,
        "ordering": [V[i] for i in order],
        "tests_performed": tester.call_count - calls0,
        "removals_per_level": list(sk.removals_per_level),
        "ambiguous_triples": [[V[i], V[j], V[k]] for i, j, k in ambiguous],
        "runtime_ms": runtime_ms,
    }
    if final_error is not None:
        diagnostics["final_orientation_error"] = final_error
    return LearnResult(essential, final, sk.sepsets, labels, ambiguous, H, diagnostics)


__all__ = [
    "AMBIGUOUS",
    "COLLIDER",
    "NONCOLLIDER",
    "STANDARD_VARIANTS",
    "ConfigError",
    "LearnResult",
    "LearnerConfig",
    "SepsetMap",
    "SkeletonResult",
    "TraceRow",
    "TripleLabel",
    "apply_rules_lists",
    "apply_rules_sequential",
    "classify_triples",
    "labels_from_graph",
    "labels_from_sepsets",
    "learn",
    "orient_colliders",
    "orient_remaining_undirected",
    "skeleton_original",
    "skeleton_stable",
    "vstructures_plain",
]
