"""Nash-optimal division as the equilibrium of a linear Fisher market.

Every agent gets a budget of 1. Proportional-response dynamics move each
agent's bids towards the slices in proportion to the value they contribute;
the bids converge to the market equilibrium, whose allocation maximises the
product of utilities. Floats only steer the search: once the bid support
stabilises the equilibrium prices are rebuilt exactly from it and confirmed by
an exact transportation LP, so on success the returned allocation and prices
satisfy the s-CEEI conditions with zero residual.
"""
from __future__ import annotations

import logging
from fractions import Fraction

import numpy as np

from ..cake import Allocation, Cake, absolute_utility
from ..lp import LinearProgram, lp_solve
from .base import ConvergenceError, SolveResult, make_result, rationalize, value_array

log = logging.getLogger(__name__)

MAX_ITER = 10**6
_THRESHOLDS = tuple(10.0 ** -k for k in range(3, 12))


def nash_product(cake: Cake, alloc: Allocation):
    out = Fraction(1)
    for i in range(cake.n_agents):
        out *= absolute_utility(cake, alloc, i)
    return out


def _pr_step(a, b):
    p = b.sum(axis=0)
    x = np.divide(b, p, out=np.zeros_like(b), where=p > 0)
    contrib = a * x
    u = contrib.sum(axis=1)
    return contrib / u[:, None], p, x, u


def _float_residual(a, b):
    """Largest shortfall of a held slice's normalised bang-per-buck from the agent's best."""
    p = b.sum(axis=0)
    x = b / p
    u = (a * x).sum(axis=1)
    ratio = a / (p[None, :] * u[:, None])
    best = ratio.max(axis=1)
    held = x > 1e-12
    gap = np.where(held, best[:, None] - ratio, 0.0)
    return float(gap.max()), x, p


def _components(n, m, edges):
    parent = list(range(n + m))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    forest = []
    for w, i, j in sorted(edges, key=lambda e: (-e[0], e[1], e[2])):
        ri, rj = find(i), find(n + j)
        if ri != rj:
            parent[ri] = rj
            forest.append((i, j))
    return forest, find


def _reconstruct(vals, b, theta):
    """Exact equilibrium prices and bids from the support of ``b``, or None."""
    n, m = b.shape
    picked = {(i, j) for i in range(n) for j in range(m) if b[i, j] > theta and vals[i][j] > 0}
    for i in range(n):
        picked.add((i, int(np.argmax(b[i]))))
    for j in range(m):
        picked.add((int(np.argmax(b[:, j])), j))
    picked = {(i, j) for i, j in picked if vals[i][j] > 0}
    forest, find = _components(n, m, [(b[i, j], i, j) for i, j in picked])

    adj: dict[int, list] = {}
    for i, j in forest:
        adj.setdefault(i, []).append(n + j)
        adj.setdefault(n + j, []).append(i)
    alpha: list = [None] * n
    price: list = [None] * m
    groups: dict[int, list] = {}
    for start in range(n):
        if alpha[start] is not None:
            continue
        alpha[start] = Fraction(1)
        stack = [start]
        members = []
        while stack:
            v = stack.pop()
            members.append(v)
            for w in adj.get(v, ()):
                if w >= n and price[w - n] is None:
                    price[w - n] = vals[v][w - n] / alpha[v]
                    stack.append(w)
                elif w < n and alpha[w] is None:
                    alpha[w] = vals[w][v - n] / price[v - n]
                    stack.append(w)
        groups[find(start)] = members
    if any(q is None for q in price):
        return None
    for members in groups.values():
        agents = [v for v in members if v < n]
        goods = [v - n for v in members if v >= n]
        total = sum((price[j] for j in goods), Fraction(0))
        s = len(agents) / total
        for j in goods:
            price[j] *= s

    best = [max(vals[i][j] / price[j] for j in range(m)) for i in range(n)]
    tight = [(i, j) for i in range(n) for j in range(m)
             if vals[i][j] > 0 and vals[i][j] / price[j] == best[i]]
    nv = len(tight)
    rows, rhs = [], []
    for i in range(n):
        rows.append([1 if ti == i else 0 for ti, _ in tight])
        rhs.append(1)
    for j in range(m):
        rows.append([1 if tj == j else 0 for _, tj in tight])
        rhs.append(price[j])
    sol = lp_solve(LinearProgram([0] * nv, rows, ["="] * len(rows), rhs))
    if not sol.optimal:
        return None
    bids = [[Fraction(0)] * m for _ in range(n)]
    for (i, j), v in zip(tight, sol.x):
        bids[i][j] = v
    return price, bids


def solve_nash(cake: Cake, tol: float = 1e-9, max_iter: int = MAX_ITER) -> SolveResult:
    """Maximise the product of absolute utilities; the result carries equilibrium prices.

    Raises ConvergenceError if neither an exact equilibrium nor a float
    certificate within ``tol`` is found in ``max_iter`` iterations.
    """
    from ..ceei import PriceVector

    if tol <= 0:
        raise ValueError("tol must be positive")
    n, m = cake.n_agents, cake.n_slices
    # Equilibrium prices do not depend on how each agent scales its values;
    # relative values keep the floats well conditioned.
    a = value_array(cake, relative=True)
    vals = cake.value_matrix()
    b = a / a.sum(axis=1)[:, None]
    checkpoint = 32
    tried: set = set()
    it = 0
    lengths = cake.lengths
    while it < max_iter:
        b, *_ = _pr_step(a, b)
        it += 1
        if it < checkpoint and it < max_iter:
            continue
        checkpoint *= 2
        for theta in _THRESHOLDS:
            key = frozenset(zip(*np.nonzero(b > theta)))
            if key in tried:
                continue
            tried.add(key)
            found = _reconstruct(vals, b, theta)
            if found is None:
                continue
            price, bids = found
            alloc = Allocation(tuple(tuple(bids[i][j] / price[j] for j in range(m)) for i in range(n)))
            prices = PriceVector(tuple(price[j] / lengths[j] for j in range(m)))
            log.debug("nash: exact equilibrium after %d iterations (theta=%g)", it, theta)
            return make_result("nash", cake, alloc, prices, iterations=it, exact=True,
                               spend_residual=0.0, bang_per_buck_residual=0.0)
        res, x, p = _float_residual(a, b)
        if res < tol:
            alloc = rationalize(x)
            prices = PriceVector(tuple(float(p[j]) / float(lengths[j]) for j in range(m)))
            return make_result("nash", cake, alloc, prices, iterations=it, exact=False,
                               spend_residual=0.0, bang_per_buck_residual=res)
    res, _, _ = _float_residual(a, b)
    raise ConvergenceError(f"proportional response did not converge in {max_iter} iterations "
                           f"(bang-per-buck residual {res:.3g} > tol {tol:g})")
