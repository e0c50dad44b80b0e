import itertools
from fractions import Fraction as F

import pytest

from faircake import Cake, SizeCapError, load_fixture, nash_brute_oracle, nash_product, solve_nash
from faircake.cake import Allocation


def exhaustive(cake, grid):
    n, m = cake.n_agents, cake.n_slices
    splits = [c for c in itertools.product(range(grid + 1), repeat=n) if sum(c) == grid]
    best = None
    for pick in itertools.product(splits, repeat=m):
        alloc = Allocation(tuple(tuple(F(pick[j][i], grid) for j in range(m)) for i in range(n)))
        v = nash_product(cake, alloc)
        best = v if best is None else max(best, v)
    return best


@pytest.mark.parametrize("rows", [
    [[1, 2], [2, 1]],
    [[3, 0, 1], [1, 1, 1]],
    [[1, 1], [1, 2], [2, 1]],
    [[5, 1, 0], [0, 1, 5]],
])
def test_matches_exhaustive_search(rows):
    cake = Cake.from_table(rows)
    grid = 6
    ora = nash_brute_oracle(cake, grid)
    assert float(nash_product(cake, ora.allocation)) == pytest.approx(float(exhaustive(cake, grid)), rel=1e-9)


def test_symmetric_cake():
    cake = Cake.from_table([[1, 1], [1, 1]])
    res = nash_brute_oracle(cake, 10)
    assert res.utilities.absolute == (1, 1)
    assert res.rule == "nash-oracle"


def test_close_to_exact_solver():
    cake, _ = load_fixture("ceei_example")
    exact = float(nash_product(cake, solve_nash(cake).allocation))
    grid = float(nash_product(cake, nash_brute_oracle(cake, 20).allocation))
    assert grid <= exact * (1 + 1e-12)
    assert grid == pytest.approx(exact, rel=1e-9)


def test_size_cap():
    with pytest.raises(SizeCapError):
        nash_brute_oracle(Cake.from_table([[1]] * 4))
    with pytest.raises(SizeCapError):
        nash_brute_oracle(Cake.from_table([[1] * 7, [1] * 7]))
