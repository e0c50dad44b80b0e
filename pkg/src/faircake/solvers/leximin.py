"""Leximin-optimal divisions by iterated exact linear programs.

Each round maximises the common level ``t`` of the agents that are still free,
then probes every free agent: if it cannot exceed ``t`` while the others keep at
least ``t`` it is saturated and gets frozen at ``t``. Rounds repeat until every
agent is frozen.
"""
from __future__ import annotations

from fractions import Fraction

from ..cake import Allocation, Cake
from ..lp import LinearProgram, lp_solve
from .base import SolverError, SolveResult, make_result


def _leximin(cake: Cake, relative: bool, rule: str) -> SolveResult:
    n, m = cake.n_agents, cake.n_slices
    vals = cake.relative_value_matrix() if relative else cake.value_matrix()
    # Only pairs with positive value get a variable; whatever is left of a slice
    # is handed to somebody who does not care about it.
    pairs = [(i, j) for i in range(n) for j in range(m) if vals[i][j] > 0]
    nv = len(pairs) + 1
    t_var = len(pairs)

    slice_rows, slice_rhs = [], []
    for j in range(m):
        row = [Fraction(0)] * nv
        for k, (_, jj) in enumerate(pairs):
            if jj == j:
                row[k] = Fraction(1)
        slice_rows.append(row)
        slice_rhs.append(Fraction(1))

    def utility_row(i):
        row = [Fraction(0)] * nv
        for k, (ii, j) in enumerate(pairs):
            if ii == i:
                row[k] = vals[i][j]
        return row

    urows = [utility_row(i) for i in range(n)]

    def utils_of(x):
        return [sum((urows[i][k] * x[k] for k in range(len(pairs)) if urows[i][k]), Fraction(0))
                for i in range(n)]

    def solve(objective, free, level, frozen):
        rows = list(slice_rows)
        senses = ["<="] * m
        rhs = list(slice_rhs)
        for i in free:
            row = list(urows[i])
            if level is None:
                row[t_var] = Fraction(-1)
                rhs.append(Fraction(0))
            else:
                rhs.append(level)
            rows.append(row)
            senses.append(">=")
        for i, lvl in frozen.items():
            rows.append(urows[i])
            senses.append(">=")
            rhs.append(lvl)
        sol = lp_solve(LinearProgram(objective, rows, senses, rhs))
        if not sol.optimal:
            raise SolverError(f"leximin LP unexpectedly {sol.status}")
        return sol

    frozen: dict[int, Fraction] = {}
    lp_count = 0
    x = None
    while len(frozen) < n:
        free = [i for i in range(n) if i not in frozen]
        obj = [Fraction(0)] * nv
        obj[t_var] = Fraction(1)
        sol = solve(obj, free, None, frozen)
        lp_count += 1
        level = sol.x[t_var]
        x = sol.x
        above = {i for i, u in enumerate(utils_of(x)) if i in free and u > level}
        saturated = []
        for k in free:
            if k in above:
                continue
            probe = solve(urows[k], free, level, frozen)
            lp_count += 1
            if probe.objective > level:
                above.add(k)
                above.update(i for i, u in enumerate(utils_of(probe.x)) if i in free and u > level)
            else:
                saturated.append(k)
        if not saturated:
            raise SolverError("leximin round froze no agent")
        for k in saturated:
            frozen[k] = level

    fractions = [[Fraction(0)] * m for _ in range(n)]
    for k, (i, j) in enumerate(pairs):
        fractions[i][j] = x[k]
    for j in range(m):
        left = 1 - sum(fractions[i][j] for i in range(n))
        if left:
            sink = next((i for i in range(n) if vals[i][j] == 0), 0)
            fractions[sink][j] += left
    alloc = Allocation(tuple(tuple(r) for r in fractions))
    return make_result(rule, cake, alloc, lp_solves=lp_count,
                       levels=[frozen[i] for i in range(n)])


def solve_leximin_absolute(cake: Cake) -> SolveResult:
    """Lexicographically maximise the sorted vector of absolute utilities."""
    return _leximin(cake, relative=False, rule="leximin-abs")


def solve_leximin_relative(cake: Cake) -> SolveResult:
    """Lexicographically maximise the sorted vector of relative utilities."""
    return _leximin(cake, relative=True, rule="leximin-rel")
