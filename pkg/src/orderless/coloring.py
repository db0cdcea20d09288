"""Legal, random and weighted epsilon-defective colorings.

The defective coloring refines an ``M``-coloring by giving every color ``x`` a
polynomial of degree at most ``k`` over GF(q) (the base-``q`` digits of ``x``
are its coefficients).  A node picks the evaluation point ``alpha`` that
minimizes the weight of its currently bichromatic edges whose polynomials
collide at ``alpha`` and takes the color ``alpha * q + poly(alpha)``.  Two
distinct polynomials agree on at most ``k`` points, so with ``q > k / eps`` the
cheapest ``alpha`` turns at most an ``eps`` fraction of that weight
monochromatic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .congest import RoundStats, decode_payload, encode_payload, run_rounds
from .graph import Graph, GraphFormatError
from .rng import COLORING, NodeStream


class ColoringError(ValueError):
    pass


class ScheduleError(ColoringError):
    """The refinement schedule could not be built for the requested parameters."""


@dataclass(frozen=True)
class Coloring:
    colors: tuple[int, ...]
    palette_size: int

    def __post_init__(self):
        object.__setattr__(self, "colors", tuple(int(c) for c in self.colors))
        if self.palette_size < 1:
            raise ColoringError("palette_size must be positive")
        for v, c in enumerate(self.colors):
            if not 0 <= c < self.palette_size:
                raise ColoringError(f"node {v} has color {c} outside palette {self.palette_size}")

    def __len__(self):
        return len(self.colors)

    def classes(self) -> dict[int, list[int]]:
        """Non-empty color classes, ascending by color, members ascending by id."""
        out: dict[int, list[int]] = {}
        for v, c in enumerate(self.colors):
            out.setdefault(c, []).append(v)
        return dict(sorted(out.items()))

    def used_colors(self) -> int:
        return len(set(self.colors))


def _check_domain(g: Graph, phi: Coloring) -> None:
    if len(phi.colors) != g.node_count:
        raise ColoringError(
            f"coloring covers {len(phi.colors)} nodes, graph has {g.node_count}"
        )


def id_coloring(g: Graph) -> Coloring:
    return Coloring(tuple(range(g.node_count)), g.node_count)


def is_legal(g: Graph, phi: Coloring) -> bool:
    _check_domain(g, phi)
    c = phi.colors
    return all(c[e.u] != c[e.v] for e in g.edges)


def weighted_defect(g: Graph, phi: Coloring, v: int) -> Fraction:
    """Total weight of the monochromatic edges at ``v``."""
    _check_domain(g, phi)
    if not 0 <= v < g.node_count:
        raise IndexError(f"invalid node id {v}")
    c = phi.colors
    return sum(
        (inc.weight for inc in g.incidence(v) if c[inc.neighbor] == c[v]), Fraction(0)
    )


def random_coloring(g: Graph, c: int, seed: int) -> Coloring:
    """Every node draws its color uniformly from ``[0, c)`` on its own stream."""
    if c < 1:
        raise ColoringError("palette size must be at least 1")
    colors = tuple(NodeStream(seed, v, COLORING).below(c) for v in range(g.node_count))
    return Coloring(colors, c)


def greedy_legal_coloring(g: Graph) -> Coloring:
    """First-fit in id order; uses at most max degree + 1 colors."""
    colors = [-1] * g.node_count
    for v in range(g.node_count):
        taken = {colors[u] for u in g.neighbors(v) if colors[u] >= 0}
        c = 0
        while c in taken:
            c += 1
        colors[v] = c
    return Coloring(tuple(colors), max(colors) + 1)


def serialize_coloring(phi: Coloring) -> str:
    lines = [f"{len(phi.colors)} {phi.palette_size}"]
    lines += [f"{v} {c}" for v, c in enumerate(phi.colors)]
    return "\n".join(lines) + "\n"


def parse_coloring(text: str) -> Coloring:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise GraphFormatError("coloring header must be 'n palette_size'", 1)
    n, palette = int(rows[0][0]), int(rows[0][1])
    colors = [None] * n
    for i, row in enumerate(rows[1:], start=2):
        v, c = int(row[0]), int(row[1])
        if not 0 <= v < n:
            raise GraphFormatError(f"node {v} out of range", i)
        colors[v] = c
    if any(c is None for c in colors):
        raise GraphFormatError("coloring does not cover every node")
    return Coloring(tuple(colors), palette)


# --------------------------------------------------------------------------
# Polynomial refinement
# --------------------------------------------------------------------------

def is_prime(x: int) -> bool:
    if x < 2:
        return False
    if x % 2 == 0:
        return x == 2
    f = 3
    while f * f <= x:
        if x % f == 0:
            return False
        f += 2
    return True


def next_prime_above(x: Fraction | int) -> int:
    """Smallest prime strictly greater than ``x``."""
    q = math.floor(x) + 1
    while not is_prime(q):
        q += 1
    return q


def poly_coefficients(x: int, q: int, k: int) -> tuple[int, ...]:
    """Base-``q`` digits of ``x``, lowest first, as ``k + 1`` coefficients."""
    if not 0 <= x < q ** (k + 1):
        raise ColoringError(f"color {x} does not fit in {k + 1} base-{q} digits")
    digits = []
    for _ in range(k + 1):
        x, d = divmod(x, q)
        digits.append(d)
    return tuple(digits)


@lru_cache(maxsize=1 << 16)
def poly_values(x: int, q: int, k: int) -> np.ndarray:
    """``poly_x(alpha) mod q`` for every ``alpha`` in GF(q)."""
    coeffs = poly_coefficients(x, q, k)
    alphas = np.arange(q, dtype=np.int64)
    acc = np.zeros(q, dtype=np.int64)
    for c in reversed(coeffs):
        acc = (acc * alphas + c) % q
    acc.setflags(write=False)
    return acc


@dataclass(frozen=True)
class StepParams:
    eps: Fraction
    q: int
    k: int

    @property
    def palette(self) -> int:
        return self.q * self.q


def choose_step_params(eps_i: Fraction, m: int) -> StepParams:
    """Smallest ``(q, k)`` with ``q > k / eps_i`` and ``q**(k+1) >= m``.

    Minimizes ``q`` (hence the new palette ``q**2``); ties go to the smaller ``k``.
    """
    eps_i = Fraction(eps_i)
    if not 0 < eps_i < 1:
        raise ScheduleError(f"step epsilon {eps_i} outside (0, 1)")
    best: StepParams | None = None
    k = 1
    while True:
        floor_q = k / eps_i
        if best is not None and floor_q >= best.q:
            break
        q = next_prime_above(floor_q)
        while q ** (k + 1) < m:
            q = next_prime_above(q)
        if best is None or q < best.q:
            best = StepParams(eps_i, q, k)
        k += 1
    return best


def refine_choice(
    own_color: int,
    nbr_colors: Sequence[int],
    nbr_weights: Sequence[Fraction],
    q: int,
    k: int,
) -> tuple[int, int]:
    """One node's refinement decision: returns ``(alpha, new_color)``.

    Only currently bichromatic neighbors count toward the collision cost; the
    smallest ``alpha`` among the minimizers wins.
    """
    own = poly_values(own_color, q, k)
    rows = []
    ws = []
    for c, w in zip(nbr_colors, nbr_weights):
        if c != own_color:
            rows.append(poly_values(c, q, k))
            ws.append(Fraction(w))
    if rows:
        scale = math.lcm(*(w.denominator for w in ws))
        wint = [int(w * scale) for w in ws]
        hits = np.stack(rows) == own
        if sum(wint) < (1 << 62):
            cost = np.asarray(wint, dtype=np.int64) @ hits
        else:
            cost = np.asarray(wint, dtype=object) @ hits.astype(object)
        alpha = int(np.argmin(cost))
    else:
        alpha = 0
    return alpha, alpha * q + int(own[alpha])


def kuhn_refine_step(g: Graph, phi: Coloring, eps_i: Fraction, q: int, k: int) -> Coloring:
    """Apply one refinement step to every node simultaneously."""
    _check_domain(g, phi)
    eps_i = Fraction(eps_i)
    if not is_prime(q):
        raise ColoringError(f"field order {q} is not prime")
    if not q > k / eps_i:
        raise ColoringError(f"need q > k/eps_i, got q={q}, k={k}, eps_i={eps_i}")
    if q ** (k + 1) < phi.palette_size:
        raise ColoringError(f"q^(k+1) = {q ** (k + 1)} < palette {phi.palette_size}")
    c = phi.colors
    new = []
    for v in range(g.node_count):
        inc = g.incidence(v)
        _, color = refine_choice(
            c[v], [c[i.neighbor] for i in inc], [i.weight for i in inc], q, k
        )
        new.append(color)
    return Coloring(tuple(new), q * q)


def iterated_log(x: float, times: int) -> float:
    for _ in range(times):
        if x <= 0:
            return -math.inf
        x = math.log(x)
    return x


@dataclass(frozen=True)
class DefectiveColoringParams:
    epsilon: Fraction
    c_d: Fraction
    iterations: int
    schedule: tuple[Fraction, ...]
    steps: tuple[StepParams, ...]
    initial_palette: int

    @property
    def final_palette(self) -> int:
        return self.steps[-1].palette


def build_schedule(
    n: int, eps: Fraction, c_d: Fraction = Fraction(1), iterations: int | None = None
) -> DefectiveColoringParams:
    """Halving epsilon schedule ending at ``eps / 2`` plus per-step field parameters.

    The iteration count is the smallest positive ``T`` with
    ``ln^(T) n <= 8 sqrt(c_d) / (eps / 2)`` unless ``iterations`` overrides it.
    """
    eps = Fraction(eps)
    c_d = Fraction(c_d)
    if not 0 < eps < 1:
        raise ScheduleError(f"epsilon {eps} outside (0, 1)")
    if c_d <= 0:
        raise ScheduleError("c_d must be positive")
    if n < 1:
        raise ScheduleError("need at least one node")
    eps0 = eps / 2
    if iterations is None:
        threshold = 8 * math.sqrt(c_d) / float(eps0)
        t = 1
        while iterated_log(float(n), t) > threshold:
            t += 1
            if t > 64:
                raise ScheduleError("iteration count did not converge")
    else:
        t = iterations
    if t < 1:
        # degenerate input: a single step keeps the defect bound since eps0 <= eps
        t = 1
    schedule = tuple(eps0 / 2 ** (t - i) for i in range(1, t + 1))
    if sum(schedule) > eps:
        raise ScheduleError("step epsilons exceed the total budget")
    steps = []
    m = n
    for e in schedule:
        sp = choose_step_params(e, m)
        steps.append(sp)
        m = sp.palette
    return DefectiveColoringParams(eps, c_d, t, schedule, tuple(steps), n)


class _RefineProgram:
    """Round 1 sends ids; round ``i + 1`` runs step ``i``; the last round only listens."""

    def __init__(self, steps: Sequence[StepParams]):
        self.steps = steps

    def step(self, ctx, state, inbox):
        for m in inbox:
            state["nbr"][m.src] = decode_payload(m.payload)[0]
        r = ctx.round
        if r == 1:
            return state, ctx.broadcast(encode_payload([state["color"]])), False
        if r - 1 <= len(self.steps):
            sp = self.steps[r - 2]
            inc = ctx.incidence
            _, color = refine_choice(
                state["color"],
                [state["nbr"][i.neighbor] for i in inc],
                [i.weight for i in inc],
                sp.q,
                sp.k,
            )
            state["color"] = color
            return state, ctx.broadcast(encode_payload([color])), False
        return state, [], True


def weighted_defective_coloring(
    g: Graph,
    eps: Fraction,
    *,
    c_d: Fraction = Fraction(1),
    iterations: int | None = None,
) -> tuple[Coloring, RoundStats, DefectiveColoringParams]:
    """Run the refinement schedule on the simulator, starting from node ids.

    Every node ends with ``weighted_defect(v) <= eps * w(v)`` and knows its
    neighbors' final colors.  Uses ``T + 2`` rounds.
    """
    params = build_schedule(g.node_count, Fraction(eps), c_d, iterations)
    program = _RefineProgram(params.steps)
    init = [{"color": v, "nbr": {}} for v in range(g.node_count)]
    states, stats = run_rounds(g, program, init, params.iterations + 2, seed=0, purpose=COLORING)
    if not stats.halted:
        raise ScheduleError("coloring program did not halt within its round budget")
    phi = Coloring(tuple(s["color"] for s in states), params.final_palette)
    return phi, stats, params
