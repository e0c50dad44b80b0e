import random
from fractions import Fraction as F

from hypothesis import given

from conftest import cakes, fractions_matrix
from faircake import (
    Allocation,
    Cake,
    check_envy_free,
    check_esv_probe,
    check_pareto_optimal,
    check_proportional,
    check_weak_pareto_optimal,
    get_rule,
    load_fixture,
    solve_leximin_absolute,
    utilities,
)
from faircake.axioms import plain
from faircake.io import fixture_names


def test_leximin_example_is_not_proportional():
    cake, _ = load_fixture("leximin_example")
    rep = check_proportional(cake, solve_leximin_absolute(cake).allocation)
    assert not rep
    assert rep.witness["agent"] == "Carl"
    assert rep.witness["relative_value"] == F(3, 10)
    assert "Carl" in rep.summary()


def test_tolerance_forgives_small_shortfalls():
    cake = Cake.from_table([[1, 1], [1, 1]])
    alloc = Allocation(((F(49, 100), F(1, 2)), (F(51, 100), F(1, 2))))
    assert not check_proportional(cake, alloc)
    assert check_proportional(cake, alloc, tol=0.01)
    assert not check_envy_free(cake, alloc)
    assert check_envy_free(cake, alloc, tol=0.01)


def test_envy_witness_is_the_largest_pair():
    cake = Cake.from_table({"A": [1, 1, 1], "B": [1, 1, 1], "C": [1, 1, 1]})
    alloc = Allocation.from_owners(cake, ["B", "B", "C"])
    rep = check_envy_free(cake, alloc)
    assert (rep.witness["envious"], rep.witness["envied"]) == ("A", "B")
    assert rep.witness["other_value"] == F(2, 3)


def test_swapped_slices_are_not_weakly_po():
    cake = Cake.from_table({"A": [1, 0], "B": [0, 1]})
    alloc = Allocation.from_owners(cake, ["B", "A"])
    rep = check_weak_pareto_optimal(cake, alloc)
    assert not rep and rep.witness["common_gain"] == 1
    assert not check_pareto_optimal(cake, alloc)


def test_whole_cake_to_one_agent():
    # A cannot gain, so the allocation is weakly PO, yet B can gain for free
    cake = Cake.from_table({"A": [1, 0], "B": [0, 1]})
    alloc = Allocation.whole_to(cake, "A")
    assert check_weak_pareto_optimal(cake, alloc)
    rep = check_pareto_optimal(cake, alloc)
    assert not rep
    better = utilities(cake, Allocation(rep.witness["improving_allocation"])).relative
    assert better == (1, 1)


def test_weakly_but_not_strongly_po():
    cake, _ = load_fixture("weak_po_ceei")
    alloc = Allocation.from_owners(cake, ["Alice", "Alice", "Bob"])
    assert check_weak_pareto_optimal(cake, alloc)
    assert not check_pareto_optimal(cake, alloc)


@given(cakes(max_agents=3, max_slices=4))
def test_po_implies_weak_po(cake):
    rng = random.Random(cake.n_slices * 7 + cake.n_agents)
    alloc = Allocation(fractions_matrix(cake.n_agents, cake.n_slices, rng))
    if check_pareto_optimal(cake, alloc):
        assert check_weak_pareto_optimal(cake, alloc)
    # the improvement found is itself Pareto optimal
    rep = check_pareto_optimal(cake, alloc)
    if not rep:
        assert check_pareto_optimal(cake, Allocation(rep.witness["improving_allocation"]))


@given(cakes(max_agents=3, max_slices=4))
def test_envy_free_implies_proportional(cake):
    res = get_rule("leximin-rel")(cake)
    if check_envy_free(cake, res.allocation):
        assert check_proportional(cake, res.allocation)


def test_esv_probe_refutes_tie_breaking_rules():
    cake, _ = load_fixture("abs_convex_not_esv")
    rep = check_esv_probe(cake, get_rule("util-abs"))
    assert not rep and rep.witness is not None
    assert check_esv_probe(cake, get_rule("nash"))


def test_plain_stringifies_fractions():
    assert plain({"a": (F(1, 2), [F(3)])}) == {"a": ["1/2", ["3"]]}


def test_ef_and_po_give_prop_on_fixtures():
    for name in fixture_names():
        cake, _ = load_fixture(name)
        for rule in ("nash", "leximin-abs", "leximin-rel", "util-abs", "util-rel"):
            alloc = get_rule(rule)(cake).allocation
            if check_envy_free(cake, alloc) and check_pareto_optimal(cake, alloc):
                assert check_proportional(cake, alloc), (name, rule)
