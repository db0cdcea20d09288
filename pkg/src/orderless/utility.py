"""Local utility functions for Max k-Cut, Max-DiCut, 2-cluster max-agree and Max 2-SAT.

Each utility decomposes into terms that depend on the center variable and at
most one other variable (an edge endpoint, or the other literal of a
clause).  ``local_delta`` sums the change of those terms and never looks past
the center's 1-hop view; ``evaluate`` scans the whole instance independently.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterator, Sequence

from .framework import LocalView
from .graph import (
    ClauseSet,
    Direction,
    Graph,
    Literal,
    Sign,
    build_clause_graph,
)

KINDS = ("kcut", "dicut", "corrclust2", "max2sat")


class InstanceError(ValueError):
    pass


@dataclass(frozen=True)
class ProblemInstance:
    kind: str
    graph: Graph
    clauses: ClauseSet | None = None
    k: int = 2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InstanceError(f"unknown problem kind {self.kind!r}")
        edges = self.graph.edges
        if self.kind == "kcut":
            if self.k < 2:
                raise InstanceError("k-cut needs k >= 2")
            if any(e.attr.direction != Direction.UNDIRECTED or e.attr.sign != Sign.NONE for e in edges):
                raise InstanceError("k-cut instances use undirected unsigned edges")
        elif self.kind == "dicut":
            if any(e.attr.direction != Direction.FORWARD for e in edges):
                raise InstanceError("dicut instances use directed edges only")
        elif self.kind == "corrclust2":
            if any(e.attr.sign == Sign.NONE for e in edges):
                raise InstanceError("correlation clustering needs signed edges")
        else:
            cs = self.clauses
            if cs is None:
                raise InstanceError("max2sat needs a clause set")
            if cs.variable_count != self.graph.node_count:
                raise InstanceError("clause variables must match graph nodes")
            pairs = {frozenset((e.u, e.v)) for e in edges}
            for c in cs.clauses:
                if len(c.literals) == 2 and frozenset(c.variables) not in pairs:
                    raise InstanceError(f"no edge carries clause over {c.variables}")

    @property
    def node_count(self) -> int:
        return self.graph.node_count


def kcut_instance(g: Graph, k: int = 2) -> ProblemInstance:
    return ProblemInstance("kcut", g, k=k)


def dicut_instance(g: Graph) -> ProblemInstance:
    return ProblemInstance("dicut", g)


def corrclust_instance(g: Graph) -> ProblemInstance:
    return ProblemInstance("corrclust2", g)


def max2sat_instance(cs: ClauseSet) -> ProblemInstance:
    return ProblemInstance("max2sat", build_clause_graph(cs).graph, cs)


def with_graph(inst: ProblemInstance, g: Graph, clauses: ClauseSet | None = None) -> ProblemInstance:
    return ProblemInstance(inst.kind, g, clauses if clauses is not None else inst.clauses, inst.k)


def _require_total(values: Sequence[Any]) -> None:
    if any(x is None for x in values):
        raise ValueError("evaluation needs a total assignment")


class LocalUtility:
    """Objective ``f`` with its local difference function.

    Subclasses provide ``evaluate`` (global scan), ``terms`` (the view's
    incident terms as ``(weight, other_variable, key)``) and ``score``
    (0/1 value of one term).
    """

    kind: str
    value_domain: tuple[int, ...] = (0, 1)
    accepts_partial = False

    def evaluate(self, values: Sequence[Any]) -> Fraction:
        raise NotImplementedError

    def terms(self, view: LocalView) -> Iterator[tuple[Fraction, int | None, Any]]:
        raise NotImplementedError

    def score(self, key, own, other) -> int:
        raise NotImplementedError

    def table_key(self, key) -> Any:
        """The part of a term key that ``score`` actually depends on."""
        return key

    def gain_row(self, key, x, free: bool) -> tuple[int, ...] | None:
        """``|A| * s_a - sum_b s_b`` per value ``a``, with ``s_a`` scaled by ``|A|``.

        ``s_a`` is the term's score with the center at ``a`` and the other
        variable at ``x``; with ``free`` set it is averaged over the other
        variable instead.  Rows are memoized; ``None`` means all zeros.
        """
        memo = self.__dict__.setdefault("_gain_rows", {})
        tk = (self.table_key(key), x, free)
        if tk in memo:
            return memo[tk]
        domain = self.value_domain
        d = len(domain)
        if free:
            s = [sum(self.score(key, a, y) for y in domain) for a in domain]
        else:
            s = [d * self.score(key, a, x) for a in domain]
        total = sum(s)
        row = tuple(d * sa - total for sa in s)
        memo[tk] = row if any(row) else None
        return memo[tk]

    def local_delta(self, view: LocalView, a, a_prime) -> Fraction:
        """f(X with center=a) - f(X with center=a_prime), from the 1-hop view."""
        if a == a_prime:
            return Fraction(0)
        total = 0
        for w, other, key in self.terms(view):
            x = None if other is None else view.values[other]
            if x is None and other is not None and not self.accepts_partial:
                raise ValueError(f"neighbor {other} of {view.center} is unassigned")
            d = self.score(key, a, x) - self.score(key, a_prime, x)
            if d:
                total += (w.numerator if w.denominator == 1 else w) * d
        return Fraction(total)

    def prior(self) -> Fraction:
        """Uniform probability of each value under the random initialization."""
        return Fraction(1, len(self.value_domain))


class _EdgeUtility(LocalUtility):
    def __init__(self, graph: Graph):
        self.graph = graph

    def terms(self, view):
        for inc in view.edges:
            yield inc.weight, inc.neighbor, inc


class KCut(_EdgeUtility):
    kind = "kcut"

    def __init__(self, graph: Graph, k: int = 2):
        super().__init__(graph)
        self.k = k
        self.value_domain = tuple(range(k))

    def evaluate(self, values):
        _require_total(values)
        return sum((e.weight for e in self.graph.edges if values[e.u] != values[e.v]), Fraction(0))

    def table_key(self, key):
        return None

    def score(self, key, own, other):
        return int(own != other)


class DiCut(_EdgeUtility):
    kind = "dicut"

    def evaluate(self, values):
        _require_total(values)
        return sum(
            (e.weight for e in self.graph.edges if values[e.u] == 1 and values[e.v] == 0),
            Fraction(0),
        )

    def table_key(self, inc):
        return inc.outgoing

    def score(self, inc, own, other):
        if inc.outgoing:
            return int(own == 1 and other == 0)
        return int(other == 1 and own == 0)


class Agreement(_EdgeUtility):
    """Two-cluster max-agree: positive edges inside, negative edges across."""

    kind = "corrclust2"

    def evaluate(self, values):
        _require_total(values)
        total = Fraction(0)
        for e in self.graph.edges:
            same = values[e.u] == values[e.v]
            if same == (e.attr.sign == Sign.POSITIVE):
                total += e.weight
        return total

    def table_key(self, inc):
        return inc.attr.sign

    def score(self, inc, own, other):
        return int((own == other) == (inc.attr.sign == Sign.POSITIVE))


class _ClauseUtility(LocalUtility):
    """Clause-status utilities; defined on partial assignments too."""

    accepts_partial = True

    def __init__(self, clauses: ClauseSet):
        self.clauses = clauses

    def terms(self, view):
        for c in view.clauses:
            own = c.literal_of(view.center)
            other = c.other(view.center)
            yield c.weight, None if other is None else other.var, (own, other)


def _lit_true(lit: Literal, x) -> bool:
    return x is not None and lit.satisfied_by(x)


def _lit_false(lit: Literal, x) -> bool:
    return x is not None and not lit.satisfied_by(x)


class SatisfiedWeight(_ClauseUtility):
    """f_T: weight of clauses with at least one true literal."""

    kind = "max2sat"

    def evaluate(self, values):
        return sum((c.weight for c in self.clauses.clauses if c.is_satisfied(values)), Fraction(0))

    def score(self, key, own, other):
        own_lit, other_lit = key
        return int(_lit_true(own_lit, own) or (other_lit is not None and _lit_true(other_lit, other)))


class FalsifiedWeight(_ClauseUtility):
    """f_F: weight of clauses whose literals are all assigned and false."""

    kind = "max2sat"

    def evaluate(self, values):
        return sum((c.weight for c in self.clauses.clauses if c.is_falsified(values)), Fraction(0))

    def score(self, key, own, other):
        own_lit, other_lit = key
        return int(_lit_false(own_lit, own) and (other_lit is None or _lit_false(other_lit, other)))


def make_utility(inst: ProblemInstance):
    """The instance's local utility; for max2sat the pair ``(f_T, f_F)``."""
    if inst.kind == "kcut":
        return KCut(inst.graph, inst.k)
    if inst.kind == "dicut":
        return DiCut(inst.graph)
    if inst.kind == "corrclust2":
        return Agreement(inst.graph)
    return SatisfiedWeight(inst.clauses), FalsifiedWeight(inst.clauses)


def objective(inst: ProblemInstance):
    """The utility being maximized (f_T for max2sat)."""
    u = make_utility(inst)
    return u[0] if isinstance(u, tuple) else u


def eval_full(u: LocalUtility, values: Sequence[Any]) -> Fraction:
    _require_total(values)
    return u.evaluate(values)
