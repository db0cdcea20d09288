import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from orderless.graph import FORWARD, Graph, make_graph, total_weight
from orderless.oracle import (
    BudgetExceeded,
    brute_force_expectation,
    brute_force_opt,
    check_local_delta,
    check_submodular,
    max_agree_opt,
)
from orderless.utility import (
    corrclust_instance,
    dicut_instance,
    kcut_instance,
    make_utility,
    max2sat_instance,
    objective,
)
from strategies import clause_sets, graphs


def k3():
    return make_graph(3, [(0, 1), (1, 2), (0, 2)])


def test_small_optima():
    assert brute_force_opt(kcut_instance(make_graph(2, [(0, 1)]))).opt_value == 1
    res = brute_force_opt(kcut_instance(k3()))
    assert res.opt_value == 2
    assert res.opt_assignment == (0, 0, 1)
    assert res.search_space_size == 8
    assert brute_force_opt(dicut_instance(make_graph(2, [(0, 1)], attr=FORWARD))).opt_value == 1


def test_small_expectations():
    single = make_utility(kcut_instance(make_graph(2, [(0, 1)])))
    assert brute_force_expectation(single, (None, None)) == Fraction(1, 2)
    assert brute_force_expectation(make_utility(kcut_instance(k3())), (None,) * 3) == Fraction(3, 2)
    assert brute_force_expectation(single, (0, 1)) == single.evaluate((0, 1))


def test_budget_is_enforced():
    g = Graph(30, ())
    with pytest.raises(BudgetExceeded):
        brute_force_opt(kcut_instance(g))
    with pytest.raises(BudgetExceeded):
        brute_force_opt(kcut_instance(Graph(5, ())), budget=16)


def _explicit_opt(inst):
    u = objective(inst)
    best, arg = None, None
    for x in itertools.product(u.value_domain, repeat=inst.node_count):
        val = u.evaluate(x)
        if best is None or val > best:
            best, arg = val, x
    return best, arg


@given(graphs(max_n=7), st.integers(2, 3))
def test_vectorized_opt_matches_enumeration_kcut(g, k):
    inst = kcut_instance(g, k)
    res = brute_force_opt(inst)
    assert (res.opt_value, res.opt_assignment) == _explicit_opt(inst)


@given(graphs(max_n=8, flavor="directed"))
def test_vectorized_opt_matches_enumeration_dicut(g):
    inst = dicut_instance(g)
    res = brute_force_opt(inst)
    assert (res.opt_value, res.opt_assignment) == _explicit_opt(inst)


@given(graphs(max_n=8, flavor="signed"))
def test_vectorized_opt_matches_enumeration_agreement(g):
    inst = corrclust_instance(g)
    res = brute_force_opt(inst)
    assert (res.opt_value, res.opt_assignment) == _explicit_opt(inst)


@given(clause_sets())
def test_vectorized_opt_matches_enumeration_max2sat(cs):
    inst = max2sat_instance(cs)
    res = brute_force_opt(inst)
    assert (res.opt_value, res.opt_assignment) == _explicit_opt(inst)


@given(graphs(max_n=8), st.integers(2, 3))
def test_expectation_equals_weight_fraction(g, k):
    u = make_utility(kcut_instance(g, k))
    assert brute_force_expectation(u, (None,) * g.node_count) == (1 - Fraction(1, k)) * total_weight(g)


@given(graphs(max_n=8, flavor="directed"))
def test_dicut_expectation_is_quarter(g):
    u = make_utility(dicut_instance(g))
    assert brute_force_expectation(u, (None,) * g.node_count) == total_weight(g) / 4


@given(graphs(max_n=8, flavor="signed"))
def test_agreement_expectation_is_half(g):
    u = make_utility(corrclust_instance(g))
    assert brute_force_expectation(u, (None,) * g.node_count) == total_weight(g) / 2


@given(clause_sets())
def test_max2sat_expectation_at_least_half(cs):
    f_t, _ = make_utility(max2sat_instance(cs))
    assert 2 * brute_force_expectation(f_t, (None,) * cs.variable_count) >= cs.total_weight()


def _partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def _explicit_max_agree(g):
    best = Fraction(0)
    for part in _partitions(list(range(g.node_count))):
        label = {v: i for i, block in enumerate(part) for v in block}
        val = sum(
            (e.weight for e in g.edges if (label[e.u] == label[e.v]) == (e.attr.sign.value == "+")),
            Fraction(0),
        )
        best = max(best, val)
    return best


@given(graphs(max_n=7, flavor="signed"))
def test_partition_oracle_matches_enumeration(g):
    assert max_agree_opt(g) == _explicit_max_agree(g)


@given(graphs(max_n=9, flavor="signed"))
def test_partition_optimum_dominates_two_clusters(g):
    assert max_agree_opt(g) >= brute_force_opt(corrclust_instance(g)).opt_value


def test_submodular_checker():
    g = make_graph(6, [(0, 1), (1, 2), (3, 2), (4, 5), (5, 0)], attr=FORWARD)
    inst = dicut_instance(g)
    assert check_submodular(make_utility(inst), inst, 2000, 1).ok
    assert check_submodular(lambda s: Fraction(0), 4, 500, 1).ok
    both = check_submodular(lambda s: Fraction(s[0] & s[1]), 2, 500, 1)
    assert not both.ok
    assert both.to_dict()["violations"] == len(both.violations)


def test_local_delta_checker_flags_a_broken_utility():
    inst = kcut_instance(k3())
    u = make_utility(inst)

    class Broken(type(u)):
        def score(self, key, own, other):
            return int(own != other) + int(own == 1)

    assert check_local_delta(u, inst, 300, 2).ok
    assert not check_local_delta(Broken(inst.graph, 2), inst, 300, 2).ok
