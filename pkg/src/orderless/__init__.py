"""Orderless-local algorithms on a simulated CONGEST network.

A sequential greedy whose decisions depend only on a node's 1-hop view and
its private randomness is replayed distributively, one color class per
round, on top of a weighted defective coloring.
"""

from .coloring import (
    Coloring,
    build_schedule,
    is_legal,
    random_coloring,
    weighted_defect,
    weighted_defective_coloring,
)
from .congest import CongestViolation, Message, RoundStats, run_rounds
from .engines import (
    cond_exp_spec,
    double_greedy_det_spec,
    double_greedy_rand_spec,
    maxsat_spec,
)
from .framework import (
    Assignment,
    LocalView,
    OrderlessLocalSpec,
    induced_order,
    run_distributed,
    run_sequential,
)
from .graph import (
    ClauseSet,
    Graph,
    build_clause_graph,
    clause,
    make_graph,
    parse_clauses,
    parse_graph,
)
from .oracle import brute_force_expectation, brute_force_opt, max_agree_opt
from .pipelines import (
    PipelineReport,
    approx_corrclust_det,
    approx_cut_det,
    approx_cut_rand,
    approx_max2sat,
)
from .rng import RandomTape
from .utility import (
    ProblemInstance,
    corrclust_instance,
    dicut_instance,
    kcut_instance,
    make_utility,
    max2sat_instance,
)

__all__ = [
    "Assignment", "ClauseSet", "Coloring", "CongestViolation", "Graph", "LocalView",
    "Message", "OrderlessLocalSpec", "PipelineReport", "ProblemInstance", "RandomTape",
    "RoundStats", "approx_corrclust_det", "approx_cut_det", "approx_cut_rand",
    "approx_max2sat", "brute_force_expectation", "brute_force_opt", "build_clause_graph",
    "build_schedule", "clause", "cond_exp_spec", "corrclust_instance", "dicut_instance",
    "double_greedy_det_spec", "double_greedy_rand_spec", "induced_order", "is_legal",
    "kcut_instance", "make_graph", "make_utility", "max2sat_instance", "max_agree_opt",
    "maxsat_spec", "parse_clauses", "parse_graph", "random_coloring", "run_distributed",
    "run_rounds", "run_sequential", "weighted_defect", "weighted_defective_coloring",
]
