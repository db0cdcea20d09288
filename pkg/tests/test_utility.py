from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from orderless.framework import make_view
from orderless.graph import FORWARD, NEGATIVE, POSITIVE, ClauseSet, clause, generate_random_graph, make_graph
from orderless.oracle import check_local_delta
from orderless.utility import (
    InstanceError,
    ProblemInstance,
    corrclust_instance,
    dicut_instance,
    eval_full,
    kcut_instance,
    make_utility,
    max2sat_instance,
    objective,
)
from strategies import clause_sets, graphs


def d1():
    return dicut_instance(make_graph(2, [(0, 1)], attr=FORWARD))


def test_dicut_value():
    assert make_utility(d1()).evaluate((1, 0)) == 1
    assert make_utility(d1()).evaluate((0, 1)) == 0


def test_kcut_triangle_value():
    inst = kcut_instance(make_graph(3, [(0, 1), (1, 2), (0, 2)]))
    assert eval_full(make_utility(inst), (0, 0, 1)) == 2


def test_max2sat_values():
    cs = ClauseSet(2, (clause(0, 1), clause((0, False), weight=2)))
    f_t, f_f = make_utility(max2sat_instance(cs))
    assert f_t.evaluate((0, 1)) == 3
    assert f_f.evaluate((0, 1)) == 0
    assert objective(max2sat_instance(cs)) is not None


def test_small_evaluations():
    assert eval_full(make_utility(kcut_instance(make_graph(2, [(0, 1)]))), (0, 1)) == 1
    inst = corrclust_instance(make_graph(2, [(0, 1, 7)], attr=POSITIVE))
    assert eval_full(make_utility(inst), (0, 0)) == 7
    neg = corrclust_instance(make_graph(2, [(0, 1, 7)], attr=NEGATIVE))
    assert eval_full(make_utility(neg), (0, 0)) == 0


def test_dicut_matches_edge_scan():
    g = generate_random_graph(10, 0.5, 9, "directed", seed=3)
    u = make_utility(dicut_instance(g))
    x = (1, 0, 1, 1, 0, 0, 1, 0, 1, 0)
    assert u.evaluate(x) == sum(e.weight for e in g.edges if x[e.u] == 1 and x[e.v] == 0)


def test_eval_full_needs_total_assignment():
    with pytest.raises(ValueError):
        eval_full(make_utility(d1()), (1, None))


def test_local_delta_identity_and_dicut_flip():
    inst = d1()
    u = make_utility(inst)
    view = make_view(inst.graph, 0, (None, 0))
    assert u.local_delta(view, 1, 1) == 0
    assert u.local_delta(view, 1, 0) == 1


def test_instance_validation():
    g = make_graph(2, [(0, 1)])
    with pytest.raises(InstanceError):
        dicut_instance(g)
    with pytest.raises(InstanceError):
        corrclust_instance(g)
    with pytest.raises(InstanceError):
        kcut_instance(g, 1)
    with pytest.raises(InstanceError):
        ProblemInstance("max2sat", g)
    with pytest.raises(InstanceError):
        ProblemInstance("max2sat", make_graph(2, []), ClauseSet(2, (clause(0, 1),)))


@given(graphs(max_n=9), st.integers(2, 3), st.integers(0, 10**6))
def test_local_delta_kcut(g, k, seed):
    inst = kcut_instance(g, k)
    assert check_local_delta(make_utility(inst), inst, 40, seed).ok


@given(graphs(max_n=9, flavor="directed"), st.integers(0, 10**6))
def test_local_delta_dicut(g, seed):
    inst = dicut_instance(g)
    assert check_local_delta(make_utility(inst), inst, 40, seed).ok


@given(graphs(max_n=9, flavor="signed"), st.integers(0, 10**6))
def test_local_delta_agreement(g, seed):
    inst = corrclust_instance(g)
    assert check_local_delta(make_utility(inst), inst, 40, seed).ok


@given(clause_sets(), st.integers(0, 10**6))
def test_local_delta_clauses_including_partial(cs, seed):
    inst = max2sat_instance(cs)
    for u in make_utility(inst):
        assert check_local_delta(u, inst, 40, seed).ok


@given(clause_sets(), st.data())
def test_satisfied_plus_falsified_is_total(cs, data):
    x = data.draw(st.lists(st.integers(0, 1), min_size=cs.variable_count, max_size=cs.variable_count))
    f_t, f_f = make_utility(max2sat_instance(cs))
    assert f_t.evaluate(x) + f_f.evaluate(x) == cs.total_weight()


def test_fractional_weights_are_exact():
    g = make_graph(3, [(0, 1, Fraction(1, 3)), (1, 2, Fraction(1, 6))])
    assert make_utility(kcut_instance(g)).evaluate((0, 1, 0)) == Fraction(1, 2)
