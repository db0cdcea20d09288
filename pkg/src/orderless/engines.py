"""Decide functions packaged as orderless-local specs.

* conditional expectations over the uniform product distribution,
* deterministic and randomized double greedy on a tuple variable ``(z, y)``,
* the randomized Max 2-SAT greedy driven by satisfied/falsified weight.
"""

from __future__ import annotations

from fractions import Fraction

from .framework import LocalView, OrderlessLocalSpec
from .rng import NodeStream
from .utility import FalsifiedWeight, LocalUtility, SatisfiedWeight

DOUBLE_GREEDY_INIT = (0, 1)
DOUBLE_GREEDY_DOMAIN = ((0, 0), (0, 1), (1, 0), (1, 1))


# --------------------------------------------------------------------------
# Conditional expectations
# --------------------------------------------------------------------------

def conditional_gains(view: LocalView, u: LocalUtility) -> dict:
    """``E[f | Y, X_v = a] - E[f | Y]`` for every ``a`` in the domain.

    ``Y`` is the partial assignment in the view (``None`` = unassigned).
    Each term touches one other variable, so averaging every term over that
    variable's uniform prior equals enumerating all neighbor completions.
    Scores are kept as integers scaled by ``|A|**2`` until the end.
    """
    domain = u.value_domain
    d = len(domain)
    acc = [0] * d
    values = view.values
    for w, other, key in u.terms(view):
        x = None if other is None else values[other]
        row = u.gain_row(key, x, other is not None and x is None)
        if row is None:
            continue
        w = w.numerator if w.denominator == 1 else w
        for i, diff in enumerate(row):
            if diff:
                acc[i] += w * diff
    return {a: Fraction(g) / (d * d) for a, g in zip(domain, acc)}


def conditional_gain(view: LocalView, u: LocalUtility, alpha) -> Fraction:
    return conditional_gains(view, u)[alpha]


def cond_exp_decide(view: LocalView, u: LocalUtility):
    gains = conditional_gains(view, u)
    best = max(gains.values())
    return min(a for a, g in gains.items() if g == best)


def cond_exp_spec(u: LocalUtility) -> OrderlessLocalSpec:
    return OrderlessLocalSpec(
        name=f"cond-exp[{u.kind}]",
        value_domain=tuple(u.value_domain),
        init=lambda view: None,
        decide=lambda view, rng: cond_exp_decide(view, u),
    )


# --------------------------------------------------------------------------
# Double greedy
# --------------------------------------------------------------------------

def _coordinate_view(view: LocalView, i: int) -> LocalView:
    return LocalView(view.center, view.edges, {nb: x[i] for nb, x in view.values.items()}, view.clauses)


def double_greedy_gains(view: LocalView, u: LocalUtility) -> tuple[Fraction, Fraction]:
    """``a``: gain of adding the center to Z; ``b``: gain of removing it from Y."""
    a = u.local_delta(_coordinate_view(view, 0), 1, 0)
    b = u.local_delta(_coordinate_view(view, 1), 0, 1)
    return a, b


def double_greedy_det_spec(u: LocalUtility) -> OrderlessLocalSpec:
    def decide(view, rng):
        a, b = double_greedy_gains(view, u)
        return (1, 1) if a >= b else (0, 0)

    return OrderlessLocalSpec(
        name=f"det-usm[{u.kind}]",
        value_domain=DOUBLE_GREEDY_DOMAIN,
        init=lambda view: DOUBLE_GREEDY_INIT,
        decide=decide,
    )


def double_greedy_probability(a: Fraction, b: Fraction) -> Fraction:
    a = max(a, Fraction(0))
    b = max(b, Fraction(0))
    if a + b == 0:
        return Fraction(1)
    return a / (a + b)


def double_greedy_rand_spec(u: LocalUtility) -> OrderlessLocalSpec:
    def decide(view, rng: NodeStream):
        p = double_greedy_probability(*double_greedy_gains(view, u))
        return (1, 1) if rng.bernoulli(p) else (0, 0)

    return OrderlessLocalSpec(
        name=f"rand-usm[{u.kind}]",
        value_domain=DOUBLE_GREEDY_DOMAIN,
        init=lambda view: DOUBLE_GREEDY_INIT,
        decide=decide,
    )


# --------------------------------------------------------------------------
# Max 2-SAT
# --------------------------------------------------------------------------

def maxsat_gains(view: LocalView, f_t: SatisfiedWeight, f_f: FalsifiedWeight) -> tuple[Fraction, Fraction]:
    """``(t, f)``: satisfied-minus-falsified gain of setting the center to 1 / to 0."""
    t = f_t.local_delta(view, 1, None) - f_f.local_delta(view, 1, None)
    f = f_t.local_delta(view, 0, None) - f_f.local_delta(view, 0, None)
    return t, f


def maxsat_probability(t: Fraction, f: Fraction) -> Fraction:
    if f <= 0:
        return Fraction(1)
    if t <= 0:
        return Fraction(0)
    return t / (t + f)


def maxsat_decide(view: LocalView, rng: NodeStream, f_t: SatisfiedWeight, f_f: FalsifiedWeight) -> int:
    p = maxsat_probability(*maxsat_gains(view, f_t, f_f))
    return 1 if rng.bernoulli(p) else 0


def maxsat_spec(f_t: SatisfiedWeight, f_f: FalsifiedWeight) -> OrderlessLocalSpec:
    return OrderlessLocalSpec(
        name="rand-maxsat",
        value_domain=(0, 1),
        init=lambda view: None,
        decide=lambda view, rng: maxsat_decide(view, rng, f_t, f_f),
        clauses=f_t.clauses,
    )
