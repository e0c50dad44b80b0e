import random
from fractions import Fraction as F

from hypothesis import given

from conftest import cakes, fractions_matrix
from faircake import (
    Allocation,
    Cake,
    check_esv_probe,
    check_pareto_optimal,
    get_rule,
    load_fixture,
    solve_leximin_absolute,
    solve_leximin_relative,
    utilities,
)


def test_example_goldens():
    cake, _ = load_fixture("leximin_example")
    a = solve_leximin_absolute(cake)
    assert a.utilities.sorted_absolute() == (6, 6, 9)
    assert a.rule == "leximin-abs"
    r = solve_leximin_relative(cake)
    assert r.utilities.relative == (F(5, 12),) * 3


def test_single_agent_gets_everything():
    cake = Cake.from_table([[1, 2, 3]])
    assert solve_leximin_absolute(cake).allocation == Allocation.whole_to(cake, 0)


def test_identical_agents_split_evenly():
    cake = Cake.from_table([[1, 3], [1, 3], [1, 3]])
    res = solve_leximin_relative(cake)
    assert res.utilities.relative == (F(1, 3),) * 3


def test_lexicographically_beats_random_allocations():
    rng = random.Random(5)
    for name in ("leximin_example", "leximin_not_ef", "two_agent_figure", "relative_leximin_rm"):
        cake, _ = load_fixture(name)
        best_a = solve_leximin_absolute(cake).utilities.sorted_absolute()
        best_r = solve_leximin_relative(cake).utilities.sorted_relative()
        for _ in range(250):
            u = utilities(cake, Allocation(fractions_matrix(cake.n_agents, cake.n_slices, rng)))
            assert u.sorted_absolute() <= best_a
            assert u.sorted_relative() <= best_r


@given(cakes(max_agents=3, max_slices=4))
def test_leximin_is_pareto_optimal(cake):
    for solve in (solve_leximin_absolute, solve_leximin_relative):
        assert check_pareto_optimal(cake, solve(cake).allocation)


@given(cakes(min_agents=2, max_agents=3, max_slices=4))
def test_richer_agents_hold_nothing_the_poorest_wants(cake):
    # if the worst-off agent values a slice, nobody better off can keep a share of it
    res = solve_leximin_absolute(cake)
    u = res.utilities.absolute
    low = min(u)
    for i in range(cake.n_agents):
        if u[i] != low:
            continue
        for j in range(cake.n_slices):
            if cake.density(i, j) == 0:
                continue
            for k in range(cake.n_agents):
                if u[k] > low and cake.density(k, j) > 0:
                    # else moving a sliver of j from k to i is a leximin improvement
                    assert res.allocation[k, j] == 0


def test_esv_on_fixtures():
    cake, _ = load_fixture("leximin_not_ef")
    assert check_esv_probe(cake, get_rule("leximin-abs"))
    assert check_esv_probe(cake, get_rule("leximin-rel"))


def test_deterministic():
    cake, _ = load_fixture("relative_leximin_rm")
    assert solve_leximin_relative(cake) == solve_leximin_relative(cake)
