import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from orderless.coloring import (
    Coloring,
    ColoringError,
    ScheduleError,
    build_schedule,
    choose_step_params,
    greedy_legal_coloring,
    id_coloring,
    is_legal,
    is_prime,
    kuhn_refine_step,
    parse_coloring,
    poly_coefficients,
    poly_values,
    random_coloring,
    refine_choice,
    serialize_coloring,
    weighted_defect,
    weighted_defective_coloring,
)
from orderless.graph import Graph, generate_random_graph, make_graph, node_weight
from strategies import graphs


def k3():
    return make_graph(3, [(0, 1), (1, 2), (0, 2)])


def test_id_coloring():
    assert id_coloring(Graph(1, ())).colors == (0,)
    assert id_coloring(Graph(3, ())).colors == (0, 1, 2)


@given(graphs())
def test_id_coloring_is_legal(g):
    assert is_legal(g, id_coloring(g))


def test_is_legal_small():
    assert is_legal(k3(), Coloring((0, 1, 2), 3))
    assert not is_legal(make_graph(2, [(0, 1)]), Coloring((0, 0), 1))


def test_coloring_validates_palette():
    with pytest.raises(ColoringError):
        Coloring((0, 3), 3)
    with pytest.raises(ColoringError):
        is_legal(k3(), Coloring((0, 1), 2))


def test_weighted_defect_single_edge():
    g = make_graph(2, [(0, 1, 5)])
    phi = Coloring((0, 0), 1)
    assert weighted_defect(g, phi, 0) == 5
    assert weighted_defect(g, phi, 1) == 5
    assert weighted_defect(g, Coloring((0, 1), 2), 0) == 0


@given(graphs(), st.integers(1, 4), st.integers(0, 1000))
def test_weighted_defect_matches_recount(g, c, seed):
    phi = random_coloring(g, c, seed)
    for v in range(g.node_count):
        recount = sum(
            (e.weight for e in g.edges if v in (e.u, e.v) and phi.colors[e.u] == phi.colors[e.v]),
            Fraction(0),
        )
        assert weighted_defect(g, phi, v) == recount


def test_random_coloring_basics():
    g = generate_random_graph(50, 0.1, 3, seed=1)
    assert random_coloring(g, 1, 9).colors == (0,) * 50
    assert random_coloring(g, 7, 9) == random_coloring(g, 7, 9)
    assert random_coloring(g, 7, 9) != random_coloring(g, 7, 10)


def test_random_coloring_uniform_within_three_sigma():
    n, c = 10_000, 4
    phi = random_coloring(Graph(n, ()), c, seed=2024)
    sigma = math.sqrt(n * (1 / c) * (1 - 1 / c))
    for color in range(c):
        assert abs(phi.colors.count(color) - n / c) <= 3 * sigma


def test_greedy_legal_coloring():
    assert greedy_legal_coloring(k3()).palette_size == 3
    assert greedy_legal_coloring(make_graph(3, [(0, 1), (1, 2)])).palette_size <= 2
    g = generate_random_graph(100, 0.1, 1, seed=5)
    phi = greedy_legal_coloring(g)
    assert is_legal(g, phi)
    assert phi.palette_size <= g.max_degree() + 1


def test_coloring_text_round_trip():
    phi = Coloring((2, 0, 1, 2), 5)
    assert parse_coloring(serialize_coloring(phi)) == phi


def test_primes_and_polynomials():
    assert [x for x in range(20) if is_prime(x)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert poly_coefficients(12, 5, 1) == (2, 2)
    # 2 + 2a over GF(5)
    assert list(poly_values(12, 5, 1)) == [2, 4, 1, 3, 0]
    with pytest.raises(ColoringError):
        poly_coefficients(25, 5, 1)


@pytest.mark.parametrize("eps_i", [Fraction(1, 40), Fraction(1, 10), Fraction(1, 3)])
@pytest.mark.parametrize("m", [2, 100, 2000, 10**6])
def test_step_params_satisfy_constraints(eps_i, m):
    sp = choose_step_params(eps_i, m)
    assert is_prime(sp.q)
    assert sp.q > sp.k / eps_i
    assert sp.q ** (sp.k + 1) >= m
    # no smaller prime works for any k
    for q in range(2, sp.q):
        if not is_prime(q):
            continue
        for k in range(1, 64):
            assert not (q > k / eps_i and q ** (k + 1) >= m)


def test_isolated_node_refines_to_valid_color():
    alpha, color = refine_choice(3, [], [], 7, 1)
    assert alpha == 0
    assert 0 <= color < 49


def test_single_edge_stays_bichromatic():
    g = make_graph(2, [(0, 1, 3)])
    phi = kuhn_refine_step(g, Coloring((0, 1), 2), Fraction(1, 5), 11, 1)
    assert phi.colors[0] != phi.colors[1]


def test_refine_step_defect_increase_bounded():
    g = generate_random_graph(200, 0.05, 10, seed=11)
    phi = id_coloring(g)
    sp = choose_step_params(Fraction(1, 10), g.node_count)
    new = kuhn_refine_step(g, phi, sp.eps, sp.q, sp.k)
    for v in range(g.node_count):
        bichromatic = sum(
            (i.weight for i in g.incidence(v) if phi.colors[i.neighbor] != phi.colors[v]),
            Fraction(0),
        )
        increase = weighted_defect(g, new, v) - weighted_defect(g, phi, v)
        assert increase <= sp.eps * bichromatic


def test_refine_step_checks_preconditions():
    g = k3()
    with pytest.raises(ColoringError):
        kuhn_refine_step(g, id_coloring(g), Fraction(1, 2), 4, 1)
    with pytest.raises(ColoringError):
        kuhn_refine_step(g, id_coloring(g), Fraction(1, 2), 3, 2)


def test_schedule_shape():
    p = build_schedule(2000, Fraction(1, 10))
    assert p.iterations == 1
    assert p.schedule == (Fraction(1, 20),)
    assert sum(p.schedule) <= Fraction(1, 10)
    forced = build_schedule(2000, Fraction(1, 10), iterations=3)
    assert forced.schedule == (Fraction(1, 80), Fraction(1, 40), Fraction(1, 20))
    with pytest.raises(ScheduleError):
        build_schedule(10, Fraction(1))


def test_defective_coloring_single_edge():
    g = make_graph(2, [(0, 1, 4)])
    phi, stats, params = weighted_defective_coloring(g, Fraction(1, 4))
    assert weighted_defect(g, phi, 0) == weighted_defect(g, phi, 1) == 0
    assert stats.rounds_used == params.iterations + 2


def test_defective_coloring_star():
    g = make_graph(21, [(0, leaf) for leaf in range(1, 21)])
    eps = Fraction(1, 4)
    phi, _, _ = weighted_defective_coloring(g, eps)
    for v in range(21):
        assert weighted_defect(g, phi, v) <= eps * node_weight(g, v)


@given(graphs(max_n=25), st.sampled_from([Fraction(1, 20), Fraction(1, 10), Fraction(1, 4)]))
def test_defective_coloring_bound_holds(g, eps):
    phi, stats, params = weighted_defective_coloring(g, eps)
    assert stats.halted
    assert phi.palette_size == params.final_palette
    for v in range(g.node_count):
        assert weighted_defect(g, phi, v) <= eps * node_weight(g, v)


def test_defective_coloring_matches_centralized_steps():
    g = generate_random_graph(120, 0.08, 6, seed=4)
    phi, _, params = weighted_defective_coloring(g, Fraction(1, 10), iterations=2)
    ref = id_coloring(g)
    for sp in params.steps:
        ref = kuhn_refine_step(g, ref, sp.eps, sp.q, sp.k)
    assert phi == ref


def test_defective_coloring_fractional_weights():
    g = make_graph(3, [(0, 1, Fraction(1, 3)), (1, 2, Fraction(5, 7)), (0, 2, Fraction(2, 9))])
    eps = Fraction(1, 10)
    phi, _, _ = weighted_defective_coloring(g, eps)
    for v in range(3):
        assert weighted_defect(g, phi, v) <= eps * node_weight(g, v)
