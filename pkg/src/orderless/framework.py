"""Orderless-local algorithms: sequential executor and its color-class distribution.

An algorithm is an ``(init, decide)`` pair over per-node variables.  The
sequential executor visits nodes in a given order; the distributed one runs
all nodes of a color class in the same round.  With a legal coloring both
produce identical assignments when the sequential order is
:func:`induced_order`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Hashable, Sequence

from .coloring import Coloring, is_legal
from .congest import RoundStats, decode_payload, encode_payload, run_rounds
from .graph import ClauseSet, Clause, Graph, Incidence
from .rng import NodeStream, RandomTape


class FrameworkError(RuntimeError):
    pass


class IllegalColoring(FrameworkError):
    pass


class DomainViolation(FrameworkError):
    pass


@dataclass(frozen=True, slots=True)
class LocalView:
    """The 1-hop knowledge of ``center``: incident edges, neighbor values, own clauses."""

    center: int
    edges: tuple[Incidence, ...]
    values: dict[int, Any]
    clauses: tuple[Clause, ...] = ()


@dataclass(frozen=True)
class OrderlessLocalSpec:
    name: str
    value_domain: tuple[Hashable, ...]
    init: Callable[[LocalView], Any]
    decide: Callable[[LocalView, NodeStream], Any]
    clauses: ClauseSet | None = None


@dataclass(frozen=True)
class Assignment:
    values: tuple[Any, ...]
    value_domain: tuple[Hashable, ...]

    def __getitem__(self, v):
        return self.values[v]

    def __len__(self):
        return len(self.values)

    def is_total(self) -> bool:
        return all(x is not None for x in self.values)

    def first(self) -> tuple[int, ...]:
        """First coordinates of tuple-valued variables."""
        return tuple(x[0] for x in self.values)


def encode_value(x) -> bytes:
    """None, an int, or a tuple of ints, shifted by one so 0 marks "unassigned"."""
    if x is None:
        return encode_payload([0])
    if isinstance(x, tuple):
        return encode_payload([0] + [c + 1 for c in x])
    return encode_payload([x + 1])


@lru_cache(maxsize=4096)
def decode_value(buf: bytes):
    vals = decode_payload(buf)
    if len(vals) == 1:
        return None if vals[0] == 0 else vals[0] - 1
    return tuple(c - 1 for c in vals[1:])


def _clauses_at(spec: OrderlessLocalSpec, v: int) -> tuple[Clause, ...]:
    return spec.clauses.clauses_of(v) if spec.clauses is not None else ()


def make_view(g: Graph, v: int, values: Sequence[Any], clauses: tuple[Clause, ...] = ()) -> LocalView:
    inc = g.incidence(v)
    return LocalView(v, inc, {i.neighbor: values[i.neighbor] for i in inc}, clauses)


def _checked(spec: OrderlessLocalSpec, v: int, x):
    if x not in spec.value_domain:
        raise DomainViolation(f"{spec.name}: decide at node {v} returned {x!r} outside the domain")
    return x


def validate_order(pi: Sequence[int], n: int) -> tuple[int, ...]:
    pi = tuple(pi)
    if len(pi) != n or set(pi) != set(range(n)):
        raise ValueError("order must be a permutation of the node ids")
    return pi


def run_sequential(g: Graph, spec: OrderlessLocalSpec, pi: Sequence[int], tape: RandomTape) -> Assignment:
    n = g.node_count
    pi = validate_order(pi, n)
    empty = [None] * n
    x = [spec.init(make_view(g, v, empty, _clauses_at(spec, v))) for v in range(n)]
    for v in pi:
        view = make_view(g, v, x, _clauses_at(spec, v))
        x[v] = _checked(spec, v, spec.decide(view, tape.stream(v)))
    return Assignment(tuple(x), spec.value_domain)


def induced_order(phi: Coloring, g: Graph) -> tuple[int, ...]:
    """Nodes sorted by ``(color, id)``."""
    if len(phi.colors) != g.node_count:
        raise ValueError("coloring does not cover the graph")
    return tuple(sorted(range(g.node_count), key=lambda v: (phi.colors[v], v)))


class _OLDistProgram:
    def __init__(self, spec: OrderlessLocalSpec, colors: Sequence[int], schedule: Sequence[int]):
        self.spec = spec
        self.colors = colors
        self.schedule = schedule

    def step(self, ctx, state, inbox):
        nbr = state["nbr"]
        for m in inbox:
            nbr[m.src] = decode_value(m.payload)
        spec = self.spec
        r = ctx.round
        if r == 1:
            view = LocalView(ctx.node, ctx.incidence, {i.neighbor: None for i in ctx.incidence}, ctx.extra)
            state["value"] = spec.init(view)
            done = not self.schedule
            return state, ctx.broadcast(encode_value(state["value"])), done
        outbox = []
        if self.colors[ctx.node] == self.schedule[r - 2]:
            view = LocalView(ctx.node, ctx.incidence, dict(nbr), ctx.extra)
            state["value"] = _checked(spec, ctx.node, spec.decide(view, ctx.rng))
            state["decided_round"] = r
            outbox = ctx.broadcast(encode_value(state["value"]))
        return state, outbox, r - 1 == len(self.schedule)


def run_distributed(
    g: Graph, spec: OrderlessLocalSpec, phi: Coloring, tape: RandomTape
) -> tuple[Assignment, RoundStats]:
    """One init round, then one round per non-empty color class in ascending color order."""
    if not is_legal(g, phi):
        raise IllegalColoring("the distributed executor needs a legal coloring")
    schedule = list(phi.classes())
    program = _OLDistProgram(spec, phi.colors, schedule)
    n = g.node_count
    init = [{"value": None, "nbr": {}, "decided_round": None} for _ in range(n)]
    extras = [_clauses_at(spec, v) for v in range(n)]
    states, stats = run_rounds(
        g, program, init, len(schedule) + 1, tape.seed, purpose=tape.purpose, extras=extras
    )
    rounds = [s["decided_round"] for s in states]
    for e in g.edges:
        if rounds[e.u] == rounds[e.v]:
            raise FrameworkError(f"adjacent nodes {e.u}, {e.v} decided in the same round")
    return Assignment(tuple(s["value"] for s in states), spec.value_domain), stats
