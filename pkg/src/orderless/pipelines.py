"""End-to-end approximation pipelines.

Color the graph, drop the monochromatic edges, then run an engine with the
now-legal coloring on what is left.  Objectives are always reported on the
original instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .coloring import Coloring, random_coloring, weighted_defective_coloring
from .congest import RoundStats, decode_payload, encode_payload, run_rounds
from .engines import (
    cond_exp_spec,
    double_greedy_det_spec,
    double_greedy_rand_spec,
    maxsat_decide,
    maxsat_spec,
)
from .framework import Assignment, LocalView, run_distributed
from .graph import ClauseSet, Graph, build_clause_graph, filter_bichromatic, total_weight
from .rng import COLORING, ENGINE, NodeStream, RandomTape
from .utility import (
    FalsifiedWeight,
    ProblemInstance,
    SatisfiedWeight,
    make_utility,
    objective,
    with_graph,
)

__all__ = [
    "PipelineReport",
    "approx_cut_det",
    "approx_cut_rand",
    "approx_corrclust_det",
    "approx_max2sat",
    "bounds",
    "build_clause_graph",
    "exchange_colors",
    "guarantee",
]

CUT_KINDS = ("kcut", "dicut", "corrclust2")


class PipelineError(ValueError):
    pass


def _frac(x: Fraction) -> str:
    return str(Fraction(x))


@dataclass
class PipelineReport:
    kind: str
    engine: str
    epsilon: Fraction
    seed: int | None
    objective: Fraction
    subgraph_objective: Fraction
    total_weight: Fraction
    dropped_weight: Fraction
    palette_size: int
    coloring_stats: RoundStats = field(default_factory=RoundStats)
    engine_stats: RoundStats = field(default_factory=RoundStats)

    @property
    def surviving_weight(self) -> Fraction:
        return self.total_weight - self.dropped_weight

    @property
    def stats(self) -> RoundStats:
        return self.coloring_stats + self.engine_stats

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "engine": self.engine,
            "epsilon": _frac(self.epsilon),
            "seed": self.seed,
            "objective": _frac(self.objective),
            "subgraph_objective": _frac(self.subgraph_objective),
            "total_weight": _frac(self.total_weight),
            "dropped_weight": _frac(self.dropped_weight),
            "surviving_weight": _frac(self.surviving_weight),
            "palette_size": self.palette_size,
            "coloring_stats": self.coloring_stats.to_dict(),
            "engine_stats": self.engine_stats.to_dict(),
            "stats": self.stats.to_dict(),
        }


def guarantee(kind: str, engine: str, k: int = 2) -> tuple[Fraction, int]:
    """``(p, c)`` such that the pipeline reaches ``p * (1 - c * eps) * OPT``.

    The matching additive form is ``(p - eps) * OPT``.
    """
    if kind == "kcut":
        return 1 - Fraction(1, k), 4
    if kind == "dicut":
        return (Fraction(1, 2) if engine.startswith("rand") else Fraction(1, 3)), 4
    if kind == "corrclust2":
        return Fraction(1, 2), 1
    if kind == "max2sat":
        return Fraction(3, 4), 2
    raise PipelineError(f"unknown problem kind {kind!r}")


def bounds(report: PipelineReport, opt: Fraction, k: int = 2) -> dict[str, Fraction]:
    """Both forms of the approximation guarantee for a known optimum."""
    p, c = guarantee(report.kind, report.engine, k)
    eps = report.epsilon
    return {
        "multiplicative": p * (1 - c * eps) * opt,
        "additive": (p - eps) * opt,
    }


def _check_eps(eps, upper: Fraction) -> Fraction:
    eps = Fraction(eps)
    if not 0 < eps <= upper:
        raise PipelineError(f"epsilon must lie in (0, {upper}], got {eps}")
    return eps


class _ExchangeProgram:
    def step(self, ctx, state, inbox):
        for m in inbox:
            state["nbr"][m.src] = decode_payload(m.payload)[0]
        if ctx.round == 1:
            return state, ctx.broadcast(encode_payload([state["color"]])), False
        return state, [], True


def exchange_colors(g: Graph, phi: Coloring) -> RoundStats:
    """One round of color announcements plus the round in which they are read."""
    init = [{"color": c, "nbr": {}} for c in phi.colors]
    _, stats = run_rounds(g, _ExchangeProgram(), init, 2, seed=0, purpose=COLORING)
    return stats


def approx_cut_det(
    inst: ProblemInstance,
    eps,
    *,
    c_d: Fraction = Fraction(1),
    iterations: int | None = None,
) -> tuple[Assignment, PipelineReport]:
    """Defective coloring, edge dropping, then a deterministic engine.

    Max-DiCut runs the deterministic double greedy; k-cut and 2-cluster
    max-agree run conditional expectations.
    """
    if inst.kind not in CUT_KINDS:
        raise PipelineError(f"approx_cut_det does not handle {inst.kind!r}")
    eps = _check_eps(eps, Fraction(1, 4))
    g = inst.graph
    phi, cstats, _ = weighted_defective_coloring(g, eps, c_d=c_d, iterations=iterations)
    g2 = filter_bichromatic(g, phi)
    inst2 = with_graph(inst, g2)
    u2 = make_utility(inst2)
    spec = double_greedy_det_spec(u2) if inst.kind == "dicut" else cond_exp_spec(u2)
    raw, estats = run_distributed(g2, spec, phi, RandomTape(0, ENGINE))
    values = raw.first() if inst.kind == "dicut" else raw.values
    w = total_weight(g)
    report = PipelineReport(
        kind=inst.kind,
        engine=spec.name,
        epsilon=eps,
        seed=None,
        objective=objective(inst).evaluate(values),
        subgraph_objective=u2.evaluate(values),
        total_weight=w,
        dropped_weight=w - total_weight(g2),
        palette_size=phi.palette_size,
        coloring_stats=cstats,
        engine_stats=estats,
    )
    return Assignment(tuple(values), objective(inst).value_domain), report


def approx_corrclust_det(inst: ProblemInstance, eps, **kw) -> tuple[Assignment, PipelineReport]:
    """Max-agree with two clusters; the coloring ignores edge signs."""
    if inst.kind != "corrclust2":
        raise PipelineError("approx_corrclust_det needs a signed instance")
    return approx_cut_det(inst, eps, **kw)


def palette_for(eps: Fraction) -> int:
    eps = Fraction(eps)
    return math.ceil(1 / eps)


def approx_cut_rand(inst: ProblemInstance, eps, seed: int) -> tuple[Assignment, PipelineReport]:
    """Random coloring from ``ceil(1/eps)`` colors, edge dropping, randomized double greedy."""
    if inst.kind != "dicut":
        raise PipelineError("approx_cut_rand runs the randomized Max-DiCut engine")
    eps = _check_eps(eps, Fraction(1, 4))
    g = inst.graph
    phi = random_coloring(g, palette_for(eps), seed)
    cstats = exchange_colors(g, phi)
    g2 = filter_bichromatic(g, phi)
    u2 = make_utility(with_graph(inst, g2))
    spec = double_greedy_rand_spec(u2)
    raw, estats = run_distributed(g2, spec, phi, RandomTape(seed, ENGINE))
    values = raw.first()
    w = total_weight(g)
    report = PipelineReport(
        kind=inst.kind,
        engine=spec.name,
        epsilon=eps,
        seed=seed,
        objective=objective(inst).evaluate(values),
        subgraph_objective=u2.evaluate(values),
        total_weight=w,
        dropped_weight=w - total_weight(g2),
        palette_size=phi.palette_size,
        coloring_stats=cstats,
        engine_stats=estats,
    )
    return Assignment(values, (0, 1)), report


def approx_max2sat(cs: ClauseSet, eps, seed: int) -> tuple[Assignment, PipelineReport]:
    """Randomized Max 2-SAT on the clause graph.

    Variables with no clause-graph edges hold only unit clauses and are set
    greedily without communication.  The rest are randomly colored; clauses
    on monochromatic edges are dropped and the randomized greedy runs on the
    remaining clauses.
    """
    eps = _check_eps(eps, Fraction(1, 2))
    cg = build_clause_graph(cs)
    h = cg.graph
    n = cs.variable_count
    values: list[int | None] = [None] * n
    f_t_full = SatisfiedWeight(cs)
    f_f_full = FalsifiedWeight(cs)

    isolated = cg.isolated
    for v in isolated:
        view = LocalView(v, (), {}, cs.clauses_of(v))
        values[v] = maxsat_decide(view, NodeStream(seed, v, ENGINE), f_t_full, f_f_full)

    c = palette_for(eps)
    active = [v for v in range(n) if h.degree(v) > 0]
    cstats = RoundStats()
    estats = RoundStats()
    dropped = Fraction(0)
    sub_objective = Fraction(0)
    if active:
        phi = random_coloring(h, c, seed)
        cstats = exchange_colors(h, phi)
        h2 = filter_bichromatic(h, phi)
        surviving_edges = {
            i for i, e in enumerate(h.edges) if phi.colors[e.u] != phi.colors[e.v]
        }
        keep = []
        for i, (cl, e) in enumerate(zip(cs.clauses, cg.clause_edge)):
            if e is None:
                continue
            if e in surviving_edges:
                keep.append(i)
            else:
                dropped += cl.weight
        sub, mapping = h2.subgraph(active)
        sub_clauses = cs.restrict(keep, relabel=mapping)
        f_t = SatisfiedWeight(sub_clauses)
        spec = maxsat_spec(f_t, FalsifiedWeight(sub_clauses))
        sub_phi = Coloring(tuple(phi.colors[v] for v in mapping), c)
        raw, estats = run_distributed(sub, spec, sub_phi, RandomTape(seed, ENGINE))
        for new, old in enumerate(mapping):
            values[old] = raw.values[new]
        sub_objective = f_t.evaluate(raw.values)
    report = PipelineReport(
        kind="max2sat",
        engine="rand-maxsat",
        epsilon=eps,
        seed=seed,
        objective=f_t_full.evaluate(values),
        subgraph_objective=sub_objective + f_t_full_isolated(cs, cg, values),
        total_weight=cs.total_weight(),
        dropped_weight=dropped,
        palette_size=c,
        coloring_stats=cstats,
        engine_stats=estats,
    )
    return Assignment(tuple(values), (0, 1)), report


def f_t_full_isolated(cs: ClauseSet, cg, values) -> Fraction:
    """Satisfied weight of the unit clauses held by clause-graph-isolated variables."""
    return sum(
        (c.weight for c, e in zip(cs.clauses, cg.clause_edge) if e is None and c.is_satisfied(values)),
        Fraction(0),
    )
