import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvrcg.citest import GaussianTester, OracleTester, ScriptedTester, SufficientStats
from mvrcg.evaluate import essential_graph
from mvrcg.graph import ARROW, MixedGraph, StructureError, graph
from mvrcg.learner import (
    AMBIGUOUS,
    COLLIDER,
    NONCOLLIDER,
    STANDARD_VARIANTS,
    ConfigError,
    LearnerConfig,
    apply_rules_lists,
    apply_rules_sequential,
    classify_triples,
    labels_from_graph,
    learn,
    orient_remaining_undirected,
    skeleton_original,
    skeleton_stable,
    vstructures_plain,
)
from mvrcg.learner.junction import chordal_cliques
from mvrcg.learner.orient import _majority_label
from mvrcg.separation import has_partially_directed_cycle, markov_equivalent
from mvrcg.simulate import GeneratorParams, cg_to_dag_with_latents, random_mvr_cg, sample_gaussian

from .conftest import mvr_graphs

ALL_VARIANTS = STANDARD_VARIANTS + ("original-cpc", "original-lmpc", "stable-lpc")

CD_SCRIPT = [("c", "d", "", False), ("c", "d", "b", True), ("c", "d", "e", True)]
PLAIN_SEP_B = ["b -> a", "c -> a", "b -- d", "c -> e", "d -> e"]
PLAIN_SEP_E = ["b -> a", "c -> a", "b -- d", "c -- e", "d -- e"]


def _order(g, s):
    return [g.index(x) for x in s]


# --- configuration -----------------------------------------------------------


@pytest.mark.parametrize(
    "name, expect",
    [
        ("original", ("original", "plain", "sequential")),
        ("stable", ("stable", "plain", "sequential")),
        ("stable-cpc", ("stable", "conservative", "sequential")),
        ("stable-lmpc", ("stable", "majority", "list")),
        ("original-lpc", ("original", "plain", "list")),
    ],
)
def test_variant_names(name, expect):
    c = LearnerConfig.from_variant(name)
    assert (c.skeleton_mode, c.triple_mode, c.rule_mode) == expect
    assert LearnerConfig.from_variant(c.variant) == c


@pytest.mark.parametrize("bad", ["pc", "stable-xpc", "stable-", "stable-llpc"])
def test_bad_variant(bad):
    with pytest.raises(ConfigError):
        LearnerConfig.from_variant(bad)


def test_bad_thresholds():
    with pytest.raises(ConfigError):
        LearnerConfig(majority_lo=60, majority_hi=40)


def test_bad_ordering(dense_dag):
    with pytest.raises(ConfigError):
        learn(OracleTester(dense_dag), LearnerConfig(ordering=["a", "b"]))


@pytest.mark.parametrize(
    "frac, lo, hi, expect",
    [
        (0.0, 0, 100, COLLIDER),
        (1.0, 0, 100, NONCOLLIDER),
        (0.5, 0, 100, AMBIGUOUS),
        (0.49, 50, 50, COLLIDER),
        (0.5, 50, 50, AMBIGUOUS),
        (2 / 3, 50, 50, NONCOLLIDER),
        (0.3, 20, 40, AMBIGUOUS),
    ],
)
def test_majority_thresholds(frac, lo, hi, expect):
    assert _majority_label(frac, lo, hi) == expect


# --- skeleton ----------------------------------------------------------------


def test_original_skeleton_is_order_dependent(dense_dag):
    t = ScriptedTester(dense_dag, [("a", "e", "bcd", True), ("c", "e", "abd", True), ("a", "e", "bc", False)])
    r1 = skeleton_original(t, _order(dense_dag, "deacb"))
    r2 = skeleton_original(t, _order(dense_dag, "dceab"))
    assert not r1.graph.has_edge("a", "e") and not r1.graph.has_edge("c", "e")
    assert r2.graph.has_edge("a", "e") and not r2.graph.has_edge("c", "e")
    for r in (r1, r2):
        assert not r.graph.has_edge("a", "d")
        assert r.removals_per_level[:3] == [0, 0, 1]


def test_stable_skeleton_agrees_on_script(dense_dag):
    t = ScriptedTester(dense_dag, [("a", "e", "bcd", True), ("c", "e", "abd", True), ("a", "e", "bc", False)])
    g1 = skeleton_stable(t, _order(dense_dag, "deacb")).graph
    g2 = skeleton_stable(t, _order(dense_dag, "dceab")).graph
    assert g1 == g2


@settings(max_examples=60, deadline=None)
@given(mvr_graphs(max_p=7), st.randoms(use_true_random=False))
def test_oracle_skeleton_and_sepsets(g, rnd):
    t = OracleTester(g)
    order = list(range(g.p))
    rnd.shuffle(order)
    for search in (skeleton_original, skeleton_stable):
        res = search(t, order)
        assert res.graph.skeleton_pairs() == g.skeleton_pairs()
        for pair, S in res.sepsets.items():
            u, v = sorted(pair)
            assert t.independent(u, v, S)
        # every nonadjacent pair has a recorded separating set
        for u, v in itertools.combinations(range(g.p), 2):
            assert res.graph.has_edge(u, v) != res.sepsets.has_pair(u, v)


def _gaussian_tester(seed, p=8, n=400):
    G = random_mvr_cg(GeneratorParams(p, 2.0, seed))
    data = sample_gaussian(cg_to_dag_with_latents(G, seed), n, seed)
    return GaussianTester(SufficientStats.from_data(data.rows, data.columns), 0.05)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.randoms(use_true_random=False))
def test_skeleton_edges_only_shrink(seed, rnd):
    t = _gaussian_tester(seed)
    order = list(range(8))
    rnd.shuffle(order)
    res = skeleton_original(t, order)
    gone = set()
    for row in res.trace:
        # no removed pair is visited with a positive outcome again
        pair = frozenset((row.u, row.v))
        assert not (pair in gone and row.removed)
        if row.removed:
            gone.add(pair)
    assert len(gone) == sum(res.removals_per_level)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.randoms(use_true_random=False))
def test_stable_skeleton_order_independent(seed, rnd):
    t = _gaussian_tester(seed)
    ref = skeleton_stable(t, None).graph
    order = list(range(8))
    rnd.shuffle(order)
    assert skeleton_stable(t, order).graph == ref


# --- triples -----------------------------------------------------------------


def test_plain_vstructures_follow_sepset(collider_dag):
    t = ScriptedTester(collider_dag, CD_SCRIPT)
    out = {}
    for order in ("dcbae", "cdeab"):
        sk = skeleton_original(t, _order(collider_dag, order))
        out[order] = vstructures_plain(sk.graph, sk.sepsets).edge_strings()
    assert out["dcbae"] == PLAIN_SEP_B
    assert out["cdeab"] == PLAIN_SEP_E


def test_conservative_vs_majority_labels(collider_dag):
    t = ScriptedTester(collider_dag, CD_SCRIPT + [("c", "d", "be", True)])
    H = skeleton_stable(t).graph
    key = (2, 4, 3)  # (c, e, d)
    cons = {x.triple: x for x in classify_triples(H, t, 0, 100)}
    maj = {x.triple: x for x in classify_triples(H, t, 50, 50)}
    assert cons[key].label == AMBIGUOUS
    assert maj[key].label == NONCOLLIDER
    assert (maj[key].with_middle, maj[key].total) == (2, 3)
    for v in ("stable-mpc", "stable-lmpc"):
        assert learn(t, LearnerConfig.from_variant(v)).essential.edge_strings() == PLAIN_SEP_E


# --- rules -------------------------------------------------------------------


def test_sequential_rules_depend_on_order(twin_vstructs):
    labels = labels_from_graph(twin_vstructs)
    first_e = apply_rules_sequential(twin_vstructs, labels, _order(twin_vstructs, "eabcdf"))
    first_b = apply_rules_sequential(twin_vstructs, labels, _order(twin_vstructs, "bfacde"))
    assert first_e.is_directed("c", "d")
    assert first_b.is_directed("d", "c")


def test_rule_lists_give_bidirected(twin_vstructs):
    labels = labels_from_graph(twin_vstructs)
    for perm in itertools.permutations(range(6)):
        assert apply_rules_lists(twin_vstructs, labels, perm).is_bidirected("c", "d")


def test_rules_leave_patternless_graph_alone():
    g = graph("abc", "a -- b", "b -- c", "a -- c")
    labels = labels_from_graph(g)
    assert apply_rules_sequential(g, labels) == g
    assert apply_rules_lists(g, labels) == g


def test_single_r1_match_agrees():
    g = graph("abc", "a -> b", "b -- c")
    labels = {(0, 1, 2): NONCOLLIDER}
    assert apply_rules_lists(g, labels) == apply_rules_sequential(g, labels) == graph("abc", "a -> b", "b -> c")


def _all_mvr_orientations(skel: MixedGraph):
    pairs = [(i, j) for i, j, _, _ in skel.edges()]
    for kinds in itertools.product(("->", "<-", "<->"), repeat=len(pairs)):
        g = MixedGraph(skel.vertices, [(i, k, j) for (i, j), k in zip(pairs, kinds)])
        if g.is_mvr_cg():
            yield g


def _class_intersection(g):
    """Essential graph by definition: arrowheads shared by every member of the class."""
    members = [h for h in _all_mvr_orientations(g.skeleton()) if markov_equivalent(g, h)]
    b = g.skeleton().builder()
    for i, j, _, _ in g.edges():
        if all(h.mark(i, j) is ARROW for h in members):
            b.add_arrowhead(i, j)
        if all(h.mark(j, i) is ARROW for h in members):
            b.add_arrowhead(j, i)
    return b.freeze()


@settings(max_examples=120, deadline=None)
@given(mvr_graphs(min_p=2, max_p=5))
def test_essential_graph_is_class_intersection(g):
    if g.num_edges() > 7:
        return
    assert essential_graph(g) == _class_intersection(g)


# --- end to end --------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(mvr_graphs(max_p=7), st.sampled_from(ALL_VARIANTS), st.randoms(use_true_random=False))
def test_oracle_soundness(g, variant, rnd):
    order = list(g.vertices)
    rnd.shuffle(order)
    res = learn(OracleTester(g), LearnerConfig.from_variant(variant, ordering=order))
    assert res.essential == essential_graph(g)
    assert res.final is not None
    assert markov_equivalent(res.final, g)
    assert res.final.is_mvr_cg()


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["stable-lcpc", "stable-lmpc"]), st.randoms(use_true_random=False))
def test_list_variants_fully_order_independent(seed, variant, rnd):
    t = _gaussian_tester(seed)
    ref = learn(t, LearnerConfig.from_variant(variant))
    order = list(t.variables)
    rnd.shuffle(order)
    res = learn(t, LearnerConfig.from_variant(variant, ordering=order))
    assert res.essential == ref.essential and res.final == ref.final
    assert res.triples == ref.triples


def test_diagnostics_fields(dense_dag):
    res = learn(OracleTester(dense_dag), LearnerConfig.from_variant("stable-cpc"))
    d = res.diagnostics
    assert d["variant"] == "stable-cpc"
    assert d["tests_performed"] > 0 and d["runtime_ms"] >= 0
    assert sum(d["removals_per_level"]) == 10 - dense_dag.num_edges()


# --- final orientation -------------------------------------------------------


def test_final_path_orientation():
    g = graph("abc", "a -- b", "b -- c")
    assert orient_remaining_undirected(g) == graph("abc", "a -> b", "b -> c")


def test_final_without_undirected_edges_is_identity(twin_vstructs):
    g = graph("abc", "a -> b", "c <-> b")
    assert orient_remaining_undirected(g) == g


def test_final_orientation_of_plain_output():
    ess = graph("abcde", *PLAIN_SEP_E)
    fin = orient_remaining_undirected(ess)
    assert not any(fin.is_undirected(i, j) or fin.is_bidirected(i, j) for i, j, _, _ in fin.edges())
    assert not has_partially_directed_cycle(fin)
    assert markov_equivalent(fin, ess)


def test_final_rejects_nonchordal():
    with pytest.raises(StructureError):
        orient_remaining_undirected(graph("abcd", "a -- b", "b -- c", "c -- d", "d -- a"))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 8), st.floats(0, 1), st.integers(0, 10**6))
def test_chordal_cliques_match_networkx(p, dens, seed):
    rng = np.random.default_rng(seed)
    g = nx.gnp_random_graph(p, dens, seed=int(seed))
    g = nx.complete_to_chordal_graph(g)[0] if p > 1 else g
    nbrs = [set(g[v]) for v in range(p)]
    rank = list(rng.permutation(p))
    mine = {c for c in chordal_cliques(nbrs, rank)}
    assert mine == {frozenset(c) for c in nx.find_cliques(g)}
