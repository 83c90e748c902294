"""Structure learning for multivariate regression (MVR) chain graphs."""

__version__ = "0.1.0"

from .citest import CIDecision, GaussianTester, OracleTester, ScriptedTester, SufficientStats
from .evaluate import BenchGrid, essential_graph, metrics, run_benchmark, shd
from .graph import GraphError, MixedGraph, StructureError, from_edge_list, graph, to_edge_list
from .learner import LearnerConfig, LearnResult, learn
from .separation import m_separated, markov_equivalent
from .simulate import GeneratorParams, cg_to_dag_with_latents, random_mvr_cg, sample_gaussian

__all__ = [
    "BenchGrid",
    "CIDecision",
    "GaussianTester",
    "GeneratorParams",
    "GraphError",
    "LearnResult",
    "LearnerConfig",
    "MixedGraph",
    "OracleTester",
    "ScriptedTester",
    "StructureError",
    "SufficientStats",
    "cg_to_dag_with_latents",
    "essential_graph",
    "from_edge_list",
    "graph",
    "learn",
    "m_separated",
    "markov_equivalent",
    "metrics",
    "random_mvr_cg",
    "run_benchmark",
    "sample_gaussian",
    "shd",
    "to_edge_list",
]
