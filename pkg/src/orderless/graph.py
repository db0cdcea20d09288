"""Problem instances: weighted graphs with edge attributes and 2-SAT clause sets.

Weights are stored as :class:`fractions.Fraction` so every objective value
computed downstream is exact.  Files only carry integer weights.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence


class GraphFormatError(ValueError):
    """Raised for malformed graph or clause input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Direction(enum.Enum):
    UNDIRECTED = "U"
    FORWARD = "D"  # u -> v


class Sign(enum.Enum):
    NONE = "N"
    POSITIVE = "+"
    NEGATIVE = "-"


@dataclass(frozen=True)
class EdgeAttr:
    direction: Direction = Direction.UNDIRECTED
    sign: Sign = Sign.NONE


UNDIRECTED = EdgeAttr()
FORWARD = EdgeAttr(Direction.FORWARD, Sign.NONE)
POSITIVE = EdgeAttr(Direction.UNDIRECTED, Sign.POSITIVE)
NEGATIVE = EdgeAttr(Direction.UNDIRECTED, Sign.NEGATIVE)


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    weight: Fraction
    attr: EdgeAttr = UNDIRECTED

    def other(self, x: int) -> int:
        return self.v if x == self.u else self.u


@dataclass(frozen=True)
class Incidence:
    """One edge as seen from one of its endpoints."""

    edge_id: int
    neighbor: int
    weight: Fraction
    attr: EdgeAttr
    outgoing: bool  # the viewing node is the tail (u) of the edge


@dataclass(frozen=True, eq=False)
class Graph:
    node_count: int
    edges: tuple[Edge, ...]
    adjacency: tuple[tuple[int, ...], ...] = field(repr=False, default=())

    def __post_init__(self):
        n = self.node_count
        if n < 1:
            raise ValueError("node_count must be positive")
        adj: list[list[int]] = [[] for _ in range(n)]
        seen: set[tuple[int, int]] = set()
        edges = []
        for i, e in enumerate(self.edges):
            if not (0 <= e.u < n and 0 <= e.v < n):
                raise ValueError(f"edge {i} endpoint out of range: ({e.u}, {e.v})")
            if e.u == e.v:
                raise ValueError(f"edge {i} is a self-loop at node {e.u}")
            w = Fraction(e.weight)
            if w < 0:
                raise ValueError(f"edge {i} has negative weight {w}")
            key = (min(e.u, e.v), max(e.u, e.v))
            if key in seen:
                raise ValueError(f"parallel edge between {key[0]} and {key[1]}")
            seen.add(key)
            edges.append(e if type(e.weight) is Fraction else Edge(e.u, e.v, w, e.attr))
            adj[e.u].append(i)
            adj[e.v].append(i)
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "adjacency", tuple(tuple(a) for a in adj))
        incid = []
        for v in range(n):
            row = []
            for i in adj[v]:
                e = edges[i]
                row.append(Incidence(i, e.other(v), e.weight, e.attr, e.u == v))
            incid.append(tuple(row))
        object.__setattr__(self, "_incidence", tuple(incid))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.node_count == other.node_count and self.edges == other.edges

    def __hash__(self):
        return hash((self.node_count, self.edges))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def incidence(self, v: int) -> tuple[Incidence, ...]:
        return self._incidence[v]

    def neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(inc.neighbor for inc in self._incidence[v])

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def weight_scale(self) -> int:
        """Smallest positive integer that makes every edge weight integral."""
        return lcm(1, *(e.weight.denominator for e in self.edges))

    def subgraph(self, nodes: Sequence[int]) -> tuple[Graph, list[int]]:
        """Induced subgraph on ``nodes``, relabelled densely in the given order.

        Returns the subgraph and the list mapping new ids to old ids.
        """
        index = {old: new for new, old in enumerate(nodes)}
        kept = [
            Edge(index[e.u], index[e.v], e.weight, e.attr)
            for e in self.edges
            if e.u in index and e.v in index
        ]
        return Graph(len(nodes), tuple(kept)), list(nodes)


def make_graph(n: int, edges: Iterable[tuple], attr: EdgeAttr = UNDIRECTED) -> Graph:
    """Convenience constructor: edges given as ``(u, v)``, ``(u, v, w)`` or ``(u, v, w, attr)``."""
    out = []
    for e in edges:
        if len(e) == 2:
            out.append(Edge(e[0], e[1], Fraction(1), attr))
        elif len(e) == 3:
            out.append(Edge(e[0], e[1], Fraction(e[2]), attr))
        else:
            out.append(Edge(e[0], e[1], Fraction(e[2]), e[3]))
    return Graph(n, tuple(out))


def total_weight(g: Graph) -> Fraction:
    return sum((e.weight for e in g.edges), Fraction(0))


def node_weight(g: Graph, v: int) -> Fraction:
    """w(v): total weight of the edges incident to ``v``."""
    if not 0 <= v < g.node_count:
        raise IndexError(f"invalid node id {v}")
    return sum((inc.weight for inc in g.incidence(v)), Fraction(0))


def filter_bichromatic(g: Graph, phi) -> Graph:
    """Keep exactly the edges whose endpoints receive different colors."""
    colors = phi.colors
    if len(colors) != g.node_count:
        raise ValueError(
            f"coloring covers {len(colors)} nodes, graph has {g.node_count}"
        )
    kept = tuple(e for e in g.edges if colors[e.u] != colors[e.v])
    return Graph(g.node_count, kept)


def monochromatic_weight(g: Graph, phi) -> Fraction:
    colors = phi.colors
    return sum((e.weight for e in g.edges if colors[e.u] == colors[e.v]), Fraction(0))


# --------------------------------------------------------------------------
# Text format
# --------------------------------------------------------------------------

def _data_lines(text: str | bytes):
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split()


def _parse_int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise GraphFormatError(f"expected integer {what}, got {tok!r}", lineno) from None


def _header(lines, kind: str) -> tuple[int, int]:
    try:
        lineno, toks = next(lines)
    except StopIteration:
        raise GraphFormatError(f"empty {kind} file") from None
    if len(toks) != 2:
        raise GraphFormatError("header must be 'n m'", lineno)
    n = _parse_int(toks[0], lineno, "n")
    m = _parse_int(toks[1], lineno, "m")
    if n < 1 or m < 0:
        raise GraphFormatError("header needs n >= 1 and m >= 0", lineno)
    return n, m


def parse_graph(text: str | bytes) -> Graph:
    """Parse the ``n m`` / ``u v w D S`` edge-list format."""
    lines = _data_lines(text)
    n, m = _header(lines, "graph")
    edges = []
    seen: set[tuple[int, int]] = set()
    for lineno, toks in lines:
        if len(toks) != 5:
            raise GraphFormatError("edge line must be 'u v w D S'", lineno)
        u = _parse_int(toks[0], lineno, "u")
        v = _parse_int(toks[1], lineno, "v")
        w = _parse_int(toks[2], lineno, "weight")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"endpoint out of range [0, {n})", lineno)
        if u == v:
            raise GraphFormatError(f"self-loop at node {u}", lineno)
        if w < 0:
            raise GraphFormatError(f"negative weight {w}", lineno)
        try:
            attr = EdgeAttr(Direction(toks[3]), Sign(toks[4]))
        except ValueError:
            raise GraphFormatError(
                f"bad edge attributes {toks[3]!r} {toks[4]!r}", lineno
            ) from None
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphFormatError(f"parallel edge {key}", lineno)
        seen.add(key)
        edges.append(Edge(u, v, Fraction(w), attr))
    if len(edges) != m:
        raise GraphFormatError(f"header announces {m} edges, found {len(edges)}")
    return Graph(n, tuple(edges))


def serialize_graph(g: Graph) -> str:
    out = [f"{g.node_count} {g.edge_count}"]
    for e in g.edges:
        if e.weight.denominator != 1:
            raise ValueError("only integer weights can be serialized")
        out.append(f"{e.u} {e.v} {e.weight.numerator} {e.attr.direction.value} {e.attr.sign.value}")
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# 2-SAT clauses
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    var: int
    positive: bool = True

    def satisfied_by(self, value: int) -> bool:
        return (value == 1) == self.positive


@dataclass(frozen=True)
class Clause:
    literals: tuple[Literal, ...]
    weight: Fraction = Fraction(1)

    def __post_init__(self):
        if not 1 <= len(self.literals) <= 2:
            raise ValueError("a clause holds one or two literals")
        if len(self.literals) == 2 and self.literals[0].var == self.literals[1].var:
            raise ValueError("the two literals of a clause must use distinct variables")
        if Fraction(self.weight) < 0:
            raise ValueError("clause weight must be non-negative")
        object.__setattr__(self, "weight", Fraction(self.weight))

    @property
    def key(self) -> frozenset[Literal]:
        return frozenset(self.literals)

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(lit.var for lit in self.literals)

    def other(self, var: int) -> Literal | None:
        for lit in self.literals:
            if lit.var != var:
                return lit
        return None

    def literal_of(self, var: int) -> Literal:
        for lit in self.literals:
            if lit.var == var:
                return lit
        raise KeyError(var)

    def is_satisfied(self, values: Sequence[int | None]) -> bool:
        return any(
            values[lit.var] is not None and lit.satisfied_by(values[lit.var])
            for lit in self.literals
        )

    def is_falsified(self, values: Sequence[int | None]) -> bool:
        return all(
            values[lit.var] is not None and not lit.satisfied_by(values[lit.var])
            for lit in self.literals
        )


def clause(*lits: tuple[int, bool] | int, weight=1) -> Clause:
    """``clause((0, True), (1, False), weight=3)``; a bare int is a positive literal."""
    out = []
    for lit in lits:
        if isinstance(lit, int):
            out.append(Literal(lit, True))
        else:
            out.append(Literal(lit[0], lit[1]))
    return Clause(tuple(out), Fraction(weight))


@dataclass(frozen=True, eq=False)
class ClauseSet:
    variable_count: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        if self.variable_count < 1:
            raise ValueError("variable_count must be positive")
        keys = set()
        by_var: list[list[int]] = [[] for _ in range(self.variable_count)]
        for i, c in enumerate(self.clauses):
            for lit in c.literals:
                if not 0 <= lit.var < self.variable_count:
                    raise ValueError(f"clause {i} uses unknown variable {lit.var}")
                by_var[lit.var].append(i)
            if c.key in keys:
                raise ValueError(f"duplicate clause {i}")
            keys.add(c.key)
        object.__setattr__(self, "clauses", tuple(self.clauses))
        object.__setattr__(self, "_by_var", tuple(tuple(b) for b in by_var))

    def __eq__(self, other):
        if not isinstance(other, ClauseSet):
            return NotImplemented
        return self.variable_count == other.variable_count and self.clauses == other.clauses

    def __hash__(self):
        return hash((self.variable_count, self.clauses))

    def clauses_of(self, var: int) -> tuple[Clause, ...]:
        return tuple(self.clauses[i] for i in self._by_var[var])

    def clause_ids_of(self, var: int) -> tuple[int, ...]:
        return self._by_var[var]

    def total_weight(self) -> Fraction:
        return sum((c.weight for c in self.clauses), Fraction(0))

    def restrict(self, keep: Iterable[int], relabel: Sequence[int] | None = None) -> ClauseSet:
        """Clauses with the given indices; ``relabel`` maps new variable ids to old ones."""
        chosen = [self.clauses[i] for i in keep]
        if relabel is None:
            return ClauseSet(self.variable_count, tuple(chosen))
        index = {old: new for new, old in enumerate(relabel)}
        remapped = tuple(
            Clause(tuple(Literal(index[l.var], l.positive) for l in c.literals), c.weight)
            for c in chosen
        )
        return ClauseSet(len(relabel), remapped)


def parse_clauses(text: str | bytes) -> ClauseSet:
    """Parse ``n m`` then ``w v1 p1 [v2 p2]`` lines with ``p`` in ``{+, -}``."""
    lines = _data_lines(text)
    n, m = _header(lines, "clause")
    out = []
    keys = set()
    for lineno, toks in lines:
        if len(toks) not in (3, 5):
            raise GraphFormatError("clause line must be 'w v1 p1 [v2 p2]'", lineno)
        w = _parse_int(toks[0], lineno, "weight")
        if w < 0:
            raise GraphFormatError(f"negative weight {w}", lineno)
        lits = []
        for j in range(1, len(toks), 2):
            var = _parse_int(toks[j], lineno, "variable")
            if not 0 <= var < n:
                raise GraphFormatError(f"variable {var} out of range [0, {n})", lineno)
            if toks[j + 1] not in ("+", "-"):
                raise GraphFormatError(f"bad polarity {toks[j + 1]!r}", lineno)
            lits.append(Literal(var, toks[j + 1] == "+"))
        if len(lits) == 2 and lits[0].var == lits[1].var:
            raise GraphFormatError("clause literals must use distinct variables", lineno)
        c = Clause(tuple(lits), Fraction(w))
        if c.key in keys:
            raise GraphFormatError("duplicate clause", lineno)
        keys.add(c.key)
        out.append(c)
    if len(out) != m:
        raise GraphFormatError(f"header announces {m} clauses, found {len(out)}")
    return ClauseSet(n, tuple(out))


def serialize_clauses(cs: ClauseSet) -> str:
    out = [f"{cs.variable_count} {len(cs.clauses)}"]
    for c in cs.clauses:
        if c.weight.denominator != 1:
            raise ValueError("only integer weights can be serialized")
        toks = [str(c.weight.numerator)]
        for lit in c.literals:
            toks += [str(lit.var), "+" if lit.positive else "-"]
        out.append(" ".join(toks))
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# Generators
# --------------------------------------------------------------------------

FLAVORS = ("undirected", "directed", "signed")


def generate_random_graph(n: int, p: float, w_max: int, flavor: str = "undirected", seed: int = 0) -> Graph:
    """G(n, p) with integer weights uniform in ``[1, w_max]``.

    ``directed`` orients each edge uniformly; ``signed`` draws a uniform sign.
    """
    if n < 1 or not 0 <= p <= 1 or w_max < 1:
        raise ValueError("need n >= 1, 0 <= p <= 1, w_max >= 1")
    if flavor not in FLAVORS:
        raise ValueError(f"flavor must be one of {FLAVORS}")
    rng = random.Random(seed)
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() >= p:
                continue
            w = Fraction(rng.randint(1, w_max))
            if flavor == "undirected":
                edges.append(Edge(u, v, w, UNDIRECTED))
            elif flavor == "directed":
                a, b = (u, v) if rng.random() < 0.5 else (v, u)
                edges.append(Edge(a, b, w, FORWARD))
            else:
                edges.append(Edge(u, v, w, POSITIVE if rng.random() < 0.5 else NEGATIVE))
    return Graph(n, tuple(edges))


def generate_random_clauses(
    n: int, p: float, w_max: int, seed: int = 0, unit_p: float | None = None
) -> ClauseSet:
    """Random 2-SAT instance over ``n`` variables.

    Every variable pair gets a two-literal clause with probability ``p`` and
    every variable a unit clause with probability ``unit_p`` (default ``p``);
    polarities are uniform and weights uniform integers in ``[1, w_max]``.
    """
    if n < 1 or not 0 <= p <= 1 or w_max < 1:
        raise ValueError("need n >= 1, 0 <= p <= 1, w_max >= 1")
    unit_p = p if unit_p is None else unit_p
    rng = random.Random(seed)
    out = []
    for u in range(n):
        if rng.random() < unit_p:
            out.append(Clause((Literal(u, rng.random() < 0.5),), Fraction(rng.randint(1, w_max))))
        for v in range(u + 1, n):
            if rng.random() < p:
                lits = (Literal(u, rng.random() < 0.5), Literal(v, rng.random() < 0.5))
                out.append(Clause(lits, Fraction(rng.randint(1, w_max))))
    return ClauseSet(n, tuple(out))


def random_clause_set(
    n: int, m: int, w_max: int, seed: int = 0, unit_fraction: float = 0.3
) -> ClauseSet:
    """Exactly ``m`` distinct clauses (fewer if the clause space runs out)."""
    rng = random.Random(seed)
    keys: set[frozenset[Literal]] = set()
    out = []
    attempts = 0
    while len(out) < m and attempts < 50 * m + 100:
        attempts += 1
        if n == 1 or rng.random() < unit_fraction:
            lits = (Literal(rng.randrange(n), rng.random() < 0.5),)
        else:
            a, b = rng.sample(range(n), 2)
            lits = (Literal(a, rng.random() < 0.5), Literal(b, rng.random() < 0.5))
        c = Clause(lits, Fraction(rng.randint(1, w_max)))
        if c.key in keys:
            continue
        keys.add(c.key)
        out.append(c)
    return ClauseSet(n, tuple(out))


@dataclass(frozen=True)
class ClauseGraph:
    """Variables joined whenever a clause mentions both.

    ``clause_edge[i]`` is the edge carrying clause ``i``; ``None`` marks a unit
    clause on a variable with no edges.
    """

    graph: Graph
    clause_edge: tuple[int | None, ...]

    @property
    def isolated(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.graph.node_count) if self.graph.degree(v) == 0)

    def isolated_weight(self, cs: ClauseSet) -> Fraction:
        return sum(
            (c.weight for c, e in zip(cs.clauses, self.clause_edge) if e is None), Fraction(0)
        )


def build_clause_graph(cs: ClauseSet) -> ClauseGraph:
    """Clause graph with each clause's weight placed on one edge.

    Two-literal clauses sit on their own edge; a unit clause of a variable
    with edges goes to the edge toward its smallest neighbor.
    """
    pairs = sorted(
        {tuple(sorted(c.variables)) for c in cs.clauses if len(c.literals) == 2}
    )
    edge_of = {p: i for i, p in enumerate(pairs)}
    smallest_nbr: dict[int, int] = {}
    for a, b in pairs:
        smallest_nbr[a] = min(smallest_nbr.get(a, b), b)
        smallest_nbr[b] = min(smallest_nbr.get(b, a), a)
    weights = [Fraction(0)] * len(pairs)
    placed: list[int | None] = []
    for c in cs.clauses:
        if len(c.literals) == 2:
            e = edge_of[tuple(sorted(c.variables))]
        else:
            v = c.literals[0].var
            e = edge_of[tuple(sorted((v, smallest_nbr[v])))] if v in smallest_nbr else None
        if e is not None:
            weights[e] += c.weight
        placed.append(e)
    edges = tuple(Edge(a, b, weights[i], UNDIRECTED) for i, (a, b) in enumerate(pairs))
    return ClauseGraph(Graph(cs.variable_count, edges), tuple(placed))
