from fractions import Fraction

import pytest
from hypothesis import given

from orderless.coloring import Coloring, is_legal, random_coloring
from orderless.graph import (
    FORWARD,
    UNDIRECTED,
    ClauseSet,
    Edge,
    Graph,
    GraphFormatError,
    build_clause_graph,
    clause,
    filter_bichromatic,
    generate_random_clauses,
    generate_random_graph,
    make_graph,
    monochromatic_weight,
    node_weight,
    parse_clauses,
    parse_graph,
    random_clause_set,
    serialize_clauses,
    serialize_graph,
    total_weight,
)
from strategies import clause_sets, graphs

K3_TEXT = "3 3\n0 1 1 U N\n1 2 1 U N\n0 2 1 U N"


def k3():
    return make_graph(3, [(0, 1), (1, 2), (0, 2)])


def test_parse_single_edge():
    g = parse_graph("2 1\n0 1 1 U N")
    assert g.node_count == 2
    assert g.edges == (Edge(0, 1, Fraction(1), UNDIRECTED),)


def test_parse_triangle():
    assert parse_graph(K3_TEXT) == k3()


def test_parse_rejects_self_loop():
    with pytest.raises(GraphFormatError) as info:
        parse_graph("2 1\n0 0 1 U N")
    assert info.value.line == 2


@pytest.mark.parametrize(
    "text",
    [
        "2 1\n0 1 -1 U N",
        "2 1\n0 2 1 U N",
        "2 2\n0 1 1 U N\n1 0 1 U N",
        "2 1\n0 1 1 X N",
        "2 2\n0 1 1 U N",
        "2 1\n0 1 1.5 U N",
        "",
    ],
)
def test_parse_rejects_malformed(text):
    with pytest.raises(GraphFormatError):
        parse_graph(text)


def test_parse_skips_comments_and_blank_lines():
    g = parse_graph("# triangle\n\n" + K3_TEXT + "\n")
    assert g.edge_count == 3


def test_graph_rejects_parallel_edges_in_either_direction():
    with pytest.raises(ValueError):
        Graph(2, (Edge(0, 1, Fraction(1), FORWARD), Edge(1, 0, Fraction(1), FORWARD)))


def test_generator_extremes():
    assert generate_random_graph(5, 0, 3, seed=1).edge_count == 0
    g = generate_random_graph(4, 1, 1, "undirected", seed=2)
    assert g.edge_count == 6
    assert all(e.weight == 1 for e in g.edges)


def test_generator_is_deterministic():
    a = generate_random_graph(30, 0.3, 10, "directed", 7)
    b = generate_random_graph(30, 0.3, 10, "directed", 7)
    assert a.edges == b.edges
    assert all(e.attr == FORWARD for e in a.edges)


def test_total_weight():
    assert total_weight(k3()) == 3
    assert total_weight(Graph(4, ())) == 0
    assert total_weight(make_graph(3, [(0, 1, 2), (1, 2, 5)])) == 7


def test_node_weight():
    g = k3()
    assert [node_weight(g, v) for v in range(3)] == [2, 2, 2]
    assert node_weight(Graph(1, ()), 0) == 0
    star = make_graph(5, [(0, leaf, 3) for leaf in range(1, 5)])
    assert node_weight(star, 0) == 12
    with pytest.raises(IndexError):
        node_weight(star, 5)


def test_filter_bichromatic_extremes():
    g = k3()
    assert filter_bichromatic(g, Coloring((0, 0, 0), 1)).edge_count == 0
    assert filter_bichromatic(g, Coloring((1, 2, 3), 4)) == g


def test_filter_bichromatic_random_is_legal():
    g = generate_random_graph(20, 0.4, 5, seed=3)
    phi = random_coloring(g, 4, seed=3)
    h = filter_bichromatic(g, phi)
    assert is_legal(h, phi)
    assert total_weight(h) + monochromatic_weight(g, phi) == total_weight(g)


@given(graphs(flavor="directed"))
def test_graph_text_round_trip(g):
    assert parse_graph(serialize_graph(g)) == g


@given(graphs(flavor="signed"))
def test_adjacency_matches_edge_list(g):
    seen = 0
    for v in range(g.node_count):
        for inc in g.incidence(v):
            e = g.edges[inc.edge_id]
            assert {e.u, e.v} == {v, inc.neighbor}
            assert inc.outgoing == (e.u == v)
            seen += 1
    assert seen == 2 * g.edge_count


def test_subgraph_relabels():
    g = make_graph(4, [(0, 1, 2), (1, 3, 5), (2, 3, 7)])
    sub, old = g.subgraph([1, 3])
    assert old == [1, 3]
    assert sub.node_count == 2
    assert sub.edges == (Edge(0, 1, Fraction(5), UNDIRECTED),)


def test_clause_parse_round_trip():
    text = "3 3\n1 0 + 1 -\n2 0 -\n4 2 + 1 +\n"
    cs = parse_clauses(text)
    assert cs.total_weight() == 7
    assert parse_clauses(serialize_clauses(cs)) == cs


@pytest.mark.parametrize(
    "text",
    ["2 1\n1 0 + 0 -", "2 1\n1 0 *", "2 1\n1 2 +", "2 2\n1 0 +\n3 0 +", "2 1\n1 0 + 1"],
)
def test_clause_parse_rejects(text):
    with pytest.raises(GraphFormatError):
        parse_clauses(text)


@given(clause_sets())
def test_clause_text_round_trip(cs):
    assert parse_clauses(serialize_clauses(cs)) == cs


def test_clause_set_rejects_unknown_variable():
    with pytest.raises(ValueError):
        ClauseSet(1, (clause(0, 1),))


def test_clause_graph_single_clause():
    cg = build_clause_graph(ClauseSet(2, (clause(0, (1, False), weight=4),)))
    assert cg.graph.edge_count == 1
    assert cg.graph.edges[0].weight == 4
    assert cg.clause_edge == (0,)


def test_clause_graph_units_only():
    cs = ClauseSet(3, (clause(0), clause((1, False), weight=2)))
    cg = build_clause_graph(cs)
    assert cg.graph.edge_count == 0
    assert cg.isolated == (0, 1, 2)
    assert cg.clause_edge == (None, None)
    assert cg.isolated_weight(cs) == 3


def test_clause_graph_unit_goes_to_smallest_neighbor():
    cs = ClauseSet(4, (clause(2, 3), clause(1, 2), clause((2, False), weight=5)))
    cg = build_clause_graph(cs)
    pairs = [(e.u, e.v) for e in cg.graph.edges]
    assert pairs[cg.clause_edge[2]] == (1, 2)


@given(clause_sets())
def test_clause_graph_conserves_weight(cs):
    cg = build_clause_graph(cs)
    assert total_weight(cg.graph) + cg.isolated_weight(cs) == cs.total_weight()


def test_clause_generators_are_deterministic():
    assert generate_random_clauses(8, 0.3, 5, 4) == generate_random_clauses(8, 0.3, 5, 4)
    cs = random_clause_set(10, 30, 5, seed=1)
    assert len(cs.clauses) == 30
    assert len({c.key for c in cs.clauses}) == 30
