"""Prices, CEEI and strong-CEEI verification.

Prices are densities per unit length. A price vector may also carry
per-(agent, slice) sub-densities: the standard price measure of an allocation
prices each agent's share of a slice by that agent's own valuation, so the two
holders of a split slice can face different prices.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .axioms import AxiomReport
from .cake import Allocation, Cake, absolute_utility, utilities


@dataclass(frozen=True)
class PriceVector:
    densities: tuple
    sub_densities: Optional[tuple] = None   # [agent][slice], meaningful where the agent holds a share

    def slice_price(self, cake: Cake, j: int):
        return self.densities[j] * cake.slices[j].length

    def total(self, cake: Cake):
        return sum(self.slice_price(cake, j) for j in range(cake.n_slices))

    def holder_density(self, agent: int, j: int):
        if self.sub_densities is not None:
            return self.sub_densities[agent][j]
        return self.densities[j]

    def piece_price(self, cake: Cake, alloc: Allocation, agent: int):
        row = alloc.fractions[agent]
        return sum(row[j] * self.holder_density(agent, j) * cake.slices[j].length
                   for j in range(cake.n_slices) if row[j])


class PriceError(ValueError):
    pass


def standard_price_measure(cake: Cake, alloc: Allocation) -> PriceVector:
    """Price every agent's share at its value relative to that agent's whole piece.

    The price density on agent i's share of slice j is ``density_ij / v̂_i(X_i)``,
    so each agent's piece costs exactly 1.
    """
    alloc.check_shape(cake)
    n, m = cake.n_agents, cake.n_slices
    own = [absolute_utility(cake, alloc, i) for i in range(n)]
    for i, u in enumerate(own):
        if u <= 0:
            raise PriceError(f"agent {cake.agents[i]!r} has zero value; the standard price is undefined")
    sub = tuple(
        tuple(cake.density(i, j) / own[i] if alloc.fractions[i][j] else Fraction(0) for j in range(m))
        for i in range(n)
    )
    dens = tuple(
        sum((alloc.fractions[i][j] * sub[i][j] for i in range(n)), Fraction(0)) for j in range(m)
    )
    return PriceVector(dens, sub)


def _segments(cake: Cake, alloc: Allocation, prices: PriceVector):
    """Homogeneous (slice, holder) parts with their measure and price density."""
    segs = []
    for j in range(cake.n_slices):
        if prices.sub_densities is None:
            segs.append((j, None, cake.slices[j].length, prices.densities[j]))
            continue
        for k in range(cake.n_agents):
            x = alloc.fractions[k][j]
            if x:
                segs.append((j, k, x * cake.slices[j].length, prices.sub_densities[k][j]))
    return segs


def _check_dims(cake, alloc, prices):
    alloc.check_shape(cake)
    if len(prices.densities) != cake.n_slices:
        raise ValueError(f"{len(prices.densities)} prices for {cake.n_slices} slices")


def _ei(cake, alloc, prices, tol):
    worst = None
    for i in range(cake.n_agents):
        spent = prices.piece_price(cake, alloc, i)
        gap = abs(spent - 1)
        if gap > tol and (worst is None or gap > worst[1]):
            worst = (i, gap, spent)
    return worst


def best_affordable_value(cake: Cake, alloc: Allocation, prices: PriceVector, agent: int,
                          budget=Fraction(1)):
    """Greedy fractional knapsack: the most absolute value ``agent`` can buy with ``budget``.

    Returns ``(value, purchases)`` with purchases as ``(slice, holder, measure)``.
    Free parts with positive value are taken whole.
    """
    items = []
    for j, k, measure, q in _segments(cake, alloc, prices):
        d = cake.density(agent, j)
        if d <= 0 or measure <= 0:
            continue
        items.append((j, k, measure, q, d))
    free = [it for it in items if it[3] <= 0]
    paid = sorted((it for it in items if it[3] > 0), key=lambda it: (-(it[4] / it[3]), it[0]))
    value = sum(it[2] * it[4] for it in free)
    bought = [(j, k, measure) for j, k, measure, _, _ in free]
    left = budget
    for j, k, measure, q, d in paid:
        if left <= 0:
            break
        cost = measure * q
        take = measure if cost <= left else left / q
        value += take * d
        left -= take * q
        bought.append((j, k, take))
    return value, bought


def verify_ceei(cake: Cake, alloc: Allocation, prices: PriceVector, tol=0) -> AxiomReport:
    """Equal incomes (every piece costs 1) and competitive equilibrium (nothing better is affordable)."""
    _check_dims(cake, alloc, prices)
    bad = _ei(cake, alloc, prices, tol)
    if bad is not None:
        i, gap, spent = bad
        return AxiomReport("CEEI", False, {"condition": "EI", "agent": cake.agents[i],
                                           "spent": spent}, tol)
    for i in range(cake.n_agents):
        total = cake.total(i)
        own = absolute_utility(cake, alloc, i) / total
        best, bought = best_affordable_value(cake, alloc, prices, i)
        if best / total - own > tol:
            return AxiomReport("CEEI", False, {
                "condition": "CE", "agent": cake.agents[i], "own_value": own,
                "affordable_value": best / total, "piece": bought}, tol)
    return AxiomReport("CEEI", True, None, tol)


def bang_per_buck(cake: Cake, alloc: Allocation, prices: PriceVector, agent: int):
    """Per-segment value/price ratios of ``agent`` normalised by its own absolute utility."""
    own = absolute_utility(cake, alloc, agent)
    scale = own if own > 0 else 1
    out = []
    for j, k, measure, q in _segments(cake, alloc, prices):
        d = cake.density(agent, j)
        if q > 0:
            r = d / (q * scale)
        else:
            r = float("inf") if d > 0 else 0
        out.append((j, k, r))
    return out


def verify_sceei(cake: Cake, alloc: Allocation, prices: PriceVector, tol=0) -> AxiomReport:
    """Strong CEEI: positive prices, equal incomes, and every held part maximises bang-per-buck."""
    _check_dims(cake, alloc, prices)
    n, m = cake.n_agents, cake.n_slices
    for j in range(m):
        holders = range(n) if prices.sub_densities is not None else [None]
        for k in holders:
            if k is not None and not alloc.fractions[k][j]:
                continue
            q = prices.densities[j] if k is None else prices.sub_densities[k][j]
            if not q > 0:
                return AxiomReport("s-CEEI", False, {"condition": "positive-price", "slice": j,
                                                     "price_density": q}, tol)
    bad = _ei(cake, alloc, prices, tol)
    if bad is not None:
        i, gap, spent = bad
        return AxiomReport("s-CEEI", False, {"condition": "EI", "agent": cake.agents[i],
                                             "spent": spent}, tol)
    for i in range(n):
        ratios = bang_per_buck(cake, alloc, prices, i)
        best = max(r for _, _, r in ratios)
        for j, k, r in ratios:
            held = alloc.fractions[i][j] > tol and (k is None or k == i)
            if held and best - r > tol:
                return AxiomReport("s-CEEI", False, {
                    "condition": "s-CE", "agent": cake.agents[i], "slice": j,
                    "ratio": r, "best_ratio": best}, tol)
    return AxiomReport("s-CEEI", True, None, tol)


def price_gap(a: PriceVector, b: PriceVector, slices: Optional[Sequence[int]] = None) -> float:
    """Largest absolute difference of slice price densities (optionally on a subset)."""
    idx = range(len(a.densities)) if slices is None else slices
    return max((abs(a.densities[j] - b.densities[j]) for j in idx), default=0)


def nash_sceei_equivalence_check(cake: Cake, tol=1e-9, known: Sequence[tuple] = ()) -> AxiomReport:
    """Nash-optimal allocations are s-CEEI with their standard prices, and conversely.

    Forward: solve for the Nash allocation, price it with the standard price
    measure and verify strong CEEI. Converse: every ``(allocation, prices)`` in
    ``known`` that is s-CEEI must give the Nash utilities.
    """
    from .solvers.nash import solve_nash

    res = solve_nash(cake, tol=tol)
    std = standard_price_measure(cake, res.allocation)
    rep = verify_sceei(cake, res.allocation, std, tol)
    if not rep:
        return AxiomReport("Nash=s-CEEI", False, {"direction": "nash->sceei", "detail": rep.witness}, tol)
    if res.prices is not None and price_gap(std, res.prices) > tol:
        return AxiomReport("Nash=s-CEEI", False, {"direction": "certificate",
                                                  "gap": price_gap(std, res.prices)}, tol)
    nash_u = res.utilities.absolute
    for alloc, prices in known:
        if not verify_sceei(cake, alloc, prices, tol):
            continue
        u = utilities(cake, alloc).absolute
        gap = max(abs(a - b) for a, b in zip(u, nash_u))
        if gap > tol:
            return AxiomReport("Nash=s-CEEI", False, {"direction": "sceei->nash",
                                                      "utilities": u, "nash": nash_u}, tol)
    return AxiomReport("Nash=s-CEEI", True, None, tol)
