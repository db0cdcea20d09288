"""Exhaustive ground truth for desk-scale instances.

Objective tables are evaluated with numpy over blocks of assignments using
integer-scaled weights, so optima and expectations stay exact.  Enumeration
is lexicographic with node 0 most significant; the first maximizer wins.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Any, Callable, Sequence

import numpy as np

from .framework import make_view
from .graph import Graph, Sign
from .utility import (
    Agreement,
    DiCut,
    FalsifiedWeight,
    KCut,
    LocalUtility,
    ProblemInstance,
    SatisfiedWeight,
    objective,
)

DEFAULT_BUDGET = 1 << 24
_BLOCK = 1 << 18


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleResult:
    opt_value: Fraction
    opt_assignment: tuple[int, ...]
    search_space_size: int


def _scaled(weights: Sequence[Fraction]) -> tuple[list[int], int]:
    scale = lcm(1, *(Fraction(w).denominator for w in weights))
    ints = [int(Fraction(w) * scale) for w in weights]
    if sum(ints) >= 1 << 62:
        raise BudgetExceeded("weights too large for exact int64 accumulation")
    return ints, scale


class _Table:
    """Vectorized evaluator of one utility over rows of assignments."""

    def __init__(self, u: LocalUtility):
        self.u = u
        if isinstance(u, (SatisfiedWeight, FalsifiedWeight)):
            self.items = u.clauses.clauses
            self.ints, self.scale = _scaled([c.weight for c in self.items])
        else:
            self.items = u.graph.edges
            self.ints, self.scale = _scaled([e.weight for e in self.items])

    def values(self, a: np.ndarray) -> np.ndarray:
        out = np.zeros(a.shape[0], dtype=np.int64)
        u = self.u
        for item, w in zip(self.items, self.ints):
            if w == 0:
                continue
            if isinstance(u, KCut):
                hit = a[:, item.u] != a[:, item.v]
            elif isinstance(u, DiCut):
                hit = (a[:, item.u] == 1) & (a[:, item.v] == 0)
            elif isinstance(u, Agreement):
                same = a[:, item.u] == a[:, item.v]
                hit = same if item.attr.sign == Sign.POSITIVE else ~same
            else:
                true_lits = [
                    a[:, lit.var] == (1 if lit.positive else 0) for lit in item.literals
                ]
                sat = true_lits[0] if len(true_lits) == 1 else true_lits[0] | true_lits[1]
                hit = sat if isinstance(u, SatisfiedWeight) else ~sat
            out += w * hit
        return out


def _blocks(base: int, free: Sequence[int], fixed: np.ndarray):
    """Yield assignment blocks with ``free`` columns enumerated lexicographically."""
    f = len(free)
    total = base ** f
    powers = np.array([base ** (f - 1 - j) for j in range(f)], dtype=np.int64)
    for start in range(0, total, _BLOCK):
        idx = np.arange(start, min(total, start + _BLOCK), dtype=np.int64)
        block = np.broadcast_to(fixed, (idx.size, fixed.size)).copy()
        if f:
            block[:, list(free)] = (idx[:, None] // powers[None, :]) % base
        yield start, block


def brute_force_opt(inst: ProblemInstance, budget: int = DEFAULT_BUDGET) -> OracleResult:
    """Exact maximum of the objective (satisfied weight for max2sat)."""
    u = objective(inst)
    base = len(u.value_domain)
    n = inst.node_count
    size = base ** n
    if size > budget:
        raise BudgetExceeded(f"{size} assignments exceed the budget of {budget}")
    table = _Table(u)
    fixed = np.zeros(n, dtype=np.int64)
    best = None
    best_row = None
    for start, block in _blocks(base, range(n), fixed):
        vals = table.values(block)
        i = int(np.argmax(vals))
        if best is None or vals[i] > best:
            best = int(vals[i])
            best_row = tuple(int(x) for x in block[i])
    return OracleResult(Fraction(best, table.scale), best_row, size)


def brute_force_expectation(
    u: LocalUtility, partial: Sequence[Any], budget: int = DEFAULT_BUDGET
) -> Fraction:
    """``E[f | partial]`` with unassigned variables uniform and independent."""
    base = len(u.value_domain)
    free = [v for v, x in enumerate(partial) if x is None]
    size = base ** len(free)
    if size > budget:
        raise BudgetExceeded(f"{size} completions exceed the budget of {budget}")
    table = _Table(u)
    fixed = np.array([0 if x is None else x for x in partial], dtype=np.int64)
    total = 0
    for _, block in _blocks(base, free, fixed):
        total += int(table.values(block).sum(dtype=np.int64))
    return Fraction(total, size * table.scale)


def max_agree_opt(g: Graph) -> Fraction:
    """Max-agree over all partitions (any number of clusters), by subset DP.

    Agreements of a partition equal the negative weight plus, per cluster,
    its inner positive weight minus its inner negative weight.
    """
    n = g.node_count
    if n > 16:
        raise BudgetExceeded("partition oracle is limited to 16 nodes")
    ints, scale = _scaled([e.weight for e in g.edges])
    signed = [[0] * n for _ in range(n)]
    negative = 0
    for e, w in zip(g.edges, ints):
        s = w if e.attr.sign == Sign.POSITIVE else -w
        if e.attr.sign != Sign.POSITIVE:
            negative += w
        signed[e.u][e.v] += s
        signed[e.v][e.u] += s
    full = 1 << n
    inner = [0] * full
    for mask in range(1, full):
        low = (mask & -mask).bit_length() - 1
        rest = mask & (mask - 1)
        acc = inner[rest]
        row = signed[low]
        r = rest
        while r:
            b = (r & -r).bit_length() - 1
            acc += row[b]
            r &= r - 1
        inner[mask] = acc
    best = [0] * full
    for mask in range(1, full):
        low = mask & -mask
        rest = mask ^ low
        top = inner[low] + best[rest]
        sub = rest
        while sub:
            cand = inner[sub | low] + best[rest ^ sub]
            if cand > top:
                top = cand
            sub = (sub - 1) & rest
        best[mask] = top
    return Fraction(negative + best[full - 1], scale)


# --------------------------------------------------------------------------
# Property checkers
# --------------------------------------------------------------------------

@dataclass
class CheckReport:
    name: str
    samples: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "samples": self.samples,
            "violations": len(self.violations),
            "examples": [repr(v) for v in self.violations[:5]],
        }


def check_submodular(
    u: LocalUtility | Callable[[tuple[int, ...]], Fraction],
    inst: ProblemInstance | int,
    samples: int,
    seed: int,
) -> CheckReport:
    """Sample ``(S, T)`` pairs and test ``f(S) + f(T) >= f(S | T) + f(S & T)``.

    ``u`` is a binary-domain utility (with ``inst`` its instance) or a plain
    callable on bit tuples (with ``inst`` the number of bits).
    """
    if isinstance(u, LocalUtility):
        if tuple(u.value_domain) != (0, 1):
            raise ValueError("submodularity needs a binary domain")
        f, n = u.evaluate, inst.node_count
    else:
        f, n = u, int(inst)
    rng = random.Random(seed)
    report = CheckReport("submodularity")
    for _ in range(samples):
        s = tuple(rng.randint(0, 1) for _ in range(n))
        t = tuple(rng.randint(0, 1) for _ in range(n))
        union = tuple(a | b for a, b in zip(s, t))
        meet = tuple(a & b for a, b in zip(s, t))
        report.samples += 1
        if f(s) + f(t) < f(union) + f(meet):
            report.violations.append((s, t))
    return report


def check_local_delta(
    u: LocalUtility, inst: ProblemInstance, samples: int, seed: int
) -> CheckReport:
    """Compare ``evaluate`` differences with ``local_delta`` on random contexts.

    Clause utilities are also exercised on partial assignments.
    """
    rng = random.Random(seed)
    g = inst.graph
    n = g.node_count
    domain = list(u.value_domain)
    report = CheckReport(f"local-delta[{type(u).__name__}]")
    for _ in range(samples):
        x = [rng.choice(domain) for _ in range(n)]
        if u.accepts_partial:
            x = [None if rng.random() < 0.3 else val for val in x]
            choices = domain + [None]
        else:
            choices = domain
        v = rng.randrange(n)
        a, b = rng.choice(choices), rng.choice(choices)
        clauses = inst.clauses.clauses_of(v) if inst.clauses is not None else ()
        view = make_view(g, v, x, clauses)
        xa = list(x)
        xa[v] = a
        xb = list(x)
        xb[v] = b
        lhs = u.evaluate(xa) - u.evaluate(xb)
        rhs = u.local_delta(view, a, b)
        report.samples += 1
        if lhs != rhs:
            report.violations.append((tuple(x), v, a, b, lhs, rhs))
    return report
