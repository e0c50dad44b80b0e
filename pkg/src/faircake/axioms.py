"""Fairness axioms with re-checkable witnesses.

PROP and EF compare numbers directly. PO and weak PO are decided by exact
linear programs over the fraction polytope; utilities are linear in the
fractions, so an improving allocation exists iff the LP finds one.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Optional

from .cake import Allocation, Cake, piece_value, utilities
from .lp import LinearProgram, lp_solve


def plain(value):
    """Fractions as "a/b" strings, recursively; for printing witnesses."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {k: plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    return value


@dataclass(frozen=True)
class AxiomReport:
    axiom: str
    passed: bool
    witness: Optional[Any] = None
    tol: Any = 0
    note: str = ""

    def __bool__(self) -> bool:
        return self.passed

    def summary(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        text = f"{self.axiom}: {verdict}"
        if self.witness is not None:
            text += f" {plain(self.witness)}"
        if self.note:
            text += f" ({self.note})"
        return text


def check_proportional(cake: Cake, alloc: Allocation, tol=0) -> AxiomReport:
    rel = utilities(cake, alloc).relative
    share = Fraction(1, cake.n_agents)
    worst = min(range(cake.n_agents), key=lambda i: rel[i])
    witness = {"agent": cake.agents[worst], "relative_value": rel[worst], "fair_share": share}
    if share - rel[worst] > tol:
        return AxiomReport("PROP", False, witness, tol)
    return AxiomReport("PROP", True, None, tol)


def check_envy_free(cake: Cake, alloc: Allocation, tol=0) -> AxiomReport:
    """Fails with the pair of largest relative envy; ties go to the first pair found."""
    n = cake.n_agents
    worst = None
    for i in range(n):
        total = cake.total(i)
        own = piece_value(cake, alloc, i, i) / total
        for j in range(n):
            if i == j:
                continue
            other = piece_value(cake, alloc, i, j) / total
            envy = other - own
            if envy > tol and (worst is None or envy > worst[2]):
                worst = (i, j, envy, own, other)
    if worst is None:
        return AxiomReport("EF", True, None, tol)
    i, j, envy, own, other = worst
    return AxiomReport("EF", False, {"envious": cake.agents[i], "envied": cake.agents[j],
                                     "own_value": own, "other_value": other}, tol)


def _improvement_lp(cake: Cake, alloc: Allocation, weak: bool):
    """Variables: y_ij for every pair, then gains (one per agent, or one shared)."""
    n, m = cake.n_agents, cake.n_slices
    vals = cake.relative_value_matrix()
    base = utilities(cake, alloc).relative
    ny = n * m
    ng = 1 if weak else n
    nv = ny + ng
    rows, senses, rhs = [], [], []
    for j in range(m):
        row = [0] * nv
        for i in range(n):
            row[i * m + j] = 1
        rows.append(row)
        senses.append("=")
        rhs.append(1)
    for i in range(n):
        row = [0] * nv
        for j in range(m):
            row[i * m + j] = vals[i][j]
        row[ny + (0 if weak else i)] = -1
        rows.append(row)
        senses.append(">=")
        rhs.append(base[i])
    obj = [0] * ny + [1] * ng
    bounds = [(0, None)] * ny + ([(None, None)] if weak else [(0, None)] * ng)
    sol = lp_solve(LinearProgram(obj, rows, senses, rhs, bounds))
    y = Allocation(tuple(tuple(sol.x[i * m + j] for j in range(m)) for i in range(n)))
    return sol, y


def check_pareto_optimal(cake: Cake, alloc: Allocation) -> AxiomReport:
    """Maximise total (relative) gain over allocations weakly better for everyone."""
    alloc.check_shape(cake)
    sol, y = _improvement_lp(cake, alloc, weak=False)
    if sol.objective == 0:
        return AxiomReport("PO", True)
    gains = [g for g in sol.x[cake.n_agents * cake.n_slices:]]
    return AxiomReport("PO", False, {"improving_allocation": y.fractions,
                                     "relative_gains": dict(zip(cake.agents, gains))})


def check_weak_pareto_optimal(cake: Cake, alloc: Allocation) -> AxiomReport:
    """Maximise the smallest (relative) gain; weakly PO iff it cannot be made positive."""
    alloc.check_shape(cake)
    sol, y = _improvement_lp(cake, alloc, weak=True)
    if sol.objective <= 0:
        return AxiomReport("weak-PO", True)
    return AxiomReport("weak-PO", False, {"improving_allocation": y.fractions,
                                          "common_gain": sol.objective})


def check_esv_probe(cake: Cake, rule: Callable, trials: int = 10, tol=0, seed: int = 0) -> AxiomReport:
    """Re-solve under agent/slice permutations and compare absolute utility vectors.

    ``rule`` maps a cake to a SolveResult. Agreement is evidence, not proof:
    the probe can refute essential single-valuedness but never certify it.
    """
    n, m = cake.n_agents, cake.n_slices
    base = rule(cake).utilities.absolute
    rng = random.Random(seed)
    orders = []
    for t in range(trials):
        if t == 0:
            agents, slices = list(reversed(range(n))), list(range(m))
        elif t == 1:
            agents, slices = list(range(n)), list(reversed(range(m)))
        else:
            agents, slices = list(range(n)), list(range(m))
            rng.shuffle(agents)
            rng.shuffle(slices)
        orders.append((agents, slices))
    for agents, slices in orders:
        res = rule(cake.permuted(agents, slices))
        got = [None] * n
        for pos, i in enumerate(agents):
            got[i] = res.utilities.absolute[pos]
        gap = max(abs(a - b) for a, b in zip(got, base))
        if gap > tol:
            return AxiomReport("ESV", False, {"agent_order": agents, "slice_order": slices,
                                              "utilities": dict(zip(cake.agents, got)),
                                              "reference": dict(zip(cake.agents, base))},
                               tol, note="probe")
    return AxiomReport("ESV", True, None, tol, note=f"probe over {trials} permuted re-solves")
