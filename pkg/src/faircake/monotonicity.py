"""Resource- and population-monotonicity experiments, and a fuzzer.

Monotonicity is judged on absolute utilities only: a smaller *relative* share
of a bigger cake is not a loss.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .axioms import check_envy_free, check_proportional
from .cake import Allocation, Cake, CakeError, Slice, enlarge, remove_agent
from .rules import Rule, get_rule
from .solvers.base import SolveResult, make_result

log = logging.getLogger(__name__)

RuleLike = Union[str, Rule, Callable]


@dataclass(frozen=True)
class MonotonicityReport:
    rule: str
    property: str                    # "RM" or "PM"
    direction: str                   # upwards / downwards
    agents: tuple
    before: tuple
    after: tuple
    passed: bool
    losers: tuple = ()               # (agent, before, after) moving the wrong way
    tol: float = 0.0
    level: str = "exact"
    cake: Optional[Cake] = field(default=None, compare=False)
    extra: tuple = field(default=(), compare=False)
    leaving: Optional[str] = field(default=None, compare=False)
    note: str = ""

    def __bool__(self) -> bool:
        return self.passed

    def summary(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        text = f"{self.direction} {self.property} [{self.rule}, {self.level}]: {verdict}"
        for name, b, a in self.losers:
            text += f"\n  {name}: {b} -> {a}"
        return text


def _as_rule(rule: RuleLike) -> Rule:
    if isinstance(rule, Rule):
        return rule
    if isinstance(rule, str):
        return get_rule(rule)
    name = getattr(rule, "__name__", "custom")

    def solve(cake: Cake) -> SolveResult:
        out = rule(cake)
        # plain functions may hand back a bare Allocation
        return make_result(name, cake, out) if isinstance(out, Allocation) else out
    return Rule(name, solve, True)


def rm_experiment(cake: Cake, extra_slices: Sequence[Slice], rule: RuleLike,
                  tol: Optional[float] = None) -> MonotonicityReport:
    """Solve before and after appending ``extra_slices``; nobody may lose absolute value."""
    r = _as_rule(rule)
    big = enlarge(cake, extra_slices)
    before = r(cake)
    after = r(big)
    if tol is None:
        tol = max(r.tolerance_for(before), r.tolerance_for(after))
    b, a = before.utilities.absolute, after.utilities.absolute
    losers = tuple((cake.agents[i], b[i], a[i]) for i in range(cake.n_agents) if b[i] - a[i] > tol)
    return MonotonicityReport(r.name, "RM", "upwards", cake.agents, b, a, not losers, losers,
                              tol, r.level, cake, tuple(extra_slices))


def pm_experiment(cake: Cake, leaving_agent, rule: RuleLike,
                  tol: Optional[float] = None) -> MonotonicityReport:
    """Solve with and without ``leaving_agent``; the others may not lose absolute value.

    Slices that only the leaving agent valued are dropped from the smaller
    cake; they are worthless to everybody who stays.
    """
    r = _as_rule(rule)
    k = cake.agent_index(leaving_agent)
    small, pruned = remove_agent(cake, k)
    before = r(cake)
    after = r(small)
    if tol is None:
        tol = max(r.tolerance_for(before), r.tolerance_for(after))
    stay = [i for i in range(cake.n_agents) if i != k]
    b = tuple(before.utilities.absolute[i] for i in stay)
    a = after.utilities.absolute
    names = tuple(cake.agents[i] for i in stay)
    losers = tuple((names[t], b[t], a[t]) for t in range(len(stay)) if b[t] - a[t] > tol)
    note = f"pruned slices {pruned}" if pruned else ""
    return MonotonicityReport(r.name, "PM", "downwards", names, b, a, not losers, losers,
                              tol, r.level, cake, (), cake.agents[k], note)


def cut_and_choose(cake: Cake) -> Allocation:
    """The first agent cuts at the leftmost half-value point, the second picks a side.

    The chooser takes the side worth more to him, the left one on a tie.
    """
    if cake.n_agents != 2:
        raise CakeError(f"cut and choose needs exactly 2 agents, got {cake.n_agents}")
    m = cake.n_slices
    half = cake.total(0) / 2
    cum = Fraction(0)
    left = [Fraction(0)] * m
    for j in range(m):
        v = cake.value(0, j)
        if cum + v >= half:
            left[j] = (half - cum) / v
            break
        left[j] = Fraction(1)
        cum += v
    left_for_chooser = sum((left[j] * cake.value(1, j) for j in range(m)), Fraction(0))
    right_for_chooser = cake.total(1) - left_for_chooser
    right = [1 - x for x in left]
    if left_for_chooser >= right_for_chooser:
        return Allocation((tuple(right), tuple(left)))
    return Allocation((tuple(left), tuple(right)))


# -- random corpus ---------------------------------------------------------------

def _density(rng: random.Random) -> int:
    return 0 if rng.random() < 0.35 else rng.randint(1, 6)


def random_cake(rng: random.Random, n_agents: int, n_slices: int) -> Cake:
    rows = [[_density(rng) for _ in range(n_slices)] for _ in range(n_agents)]
    for j in range(n_slices):
        if not any(r[j] for r in rows):
            rows[rng.randrange(n_agents)][j] = rng.randint(1, 6)
    for r in rows:
        if not any(r):
            r[rng.randrange(n_slices)] = rng.randint(1, 6)
    lengths = [rng.randint(1, 3) for _ in range(n_slices)]
    return Cake.from_table(rows, lengths, [f"A{i + 1}" for i in range(n_agents)])


def random_extra(rng: random.Random, n_agents: int) -> tuple[Slice, ...]:
    extra = []
    for _ in range(rng.randint(1, 2)):
        dens = [_density(rng) for _ in range(n_agents)]
        if not any(dens):
            dens[rng.randrange(n_agents)] = rng.randint(1, 6)
        extra.append(Slice(rng.randint(1, 3), tuple(dens)))
    return tuple(extra)


@dataclass(frozen=True)
class Case:
    """One corpus entry: a cake with an enlargement and an agent to remove."""
    name: str
    cake: Cake
    extra: tuple
    leaving: Optional[int]


def random_case(seed: int, trial: int, n_agents: int = 4, n_slices: int = 6) -> Case:
    rng = random.Random(seed * 1_000_003 + trial)
    n = rng.randint(2, max(2, n_agents))
    m = rng.randint(1, n_slices)
    cake = random_cake(rng, n, m)
    extra = random_extra(rng, n)
    return Case(f"seed{seed}-trial{trial}", cake, extra, rng.randrange(n))


def random_corpus(trials: int, seed: int = 0, n_agents: int = 4, n_slices: int = 6) -> list[Case]:
    return [random_case(seed, t, n_agents, n_slices) for t in range(trials)]


# -- shrinking -------------------------------------------------------------------

def _still_fails(report_fn, cake, extra, leaving):
    try:
        return not report_fn(cake, extra, leaving).passed
    except (CakeError, KeyError):
        return False


def shrink(report_fn, cake: Cake, extra: tuple, leaving: Optional[str]):
    """Greedily drop slices, extra slices and bystanders while the failure persists."""
    changed = True
    while changed:
        changed = False
        for j in range(cake.n_slices):
            if cake.n_slices == 1:
                break
            try:
                cand = cake.take_slices(k for k in range(cake.n_slices) if k != j)
            except CakeError:
                continue
            if _still_fails(report_fn, cand, extra, leaving):
                cake, changed = cand, True
                break
        if changed:
            continue
        for j in range(len(extra)):
            if len(extra) == 1:
                break
            cand = extra[:j] + extra[j + 1:]
            if _still_fails(report_fn, cake, cand, leaving):
                extra, changed = cand, True
                break
        if changed:
            continue
        for name in cake.agents:
            if name == leaving or cake.n_agents <= 2:
                continue
            try:
                i = cake.agent_index(name)
                cand, pruned = remove_agent(cake, i)
                cand_extra = tuple(Slice(s.length, s.densities[:i] + s.densities[i + 1:])
                                   for s in extra)
            except CakeError:
                continue
            if any(not any(s.densities) for s in cand_extra):
                continue
            if _still_fails(report_fn, cand, cand_extra, leaving):
                cake, extra, changed = cand, cand_extra, True
                break
    return cake, extra


def fuzz(rule: RuleLike, n_agents: int = 3, n_slices: int = 5, trials: int = 100,
         seed: int = 0, minimize: bool = True) -> list[MonotonicityReport]:
    """RM and PM reports for ``trials`` seeded random cases (two reports per trial).

    Failing reports carry a shrunken cake; replaying it reproduces the failure.
    """
    r = _as_rule(rule)
    reports = []
    for t in range(trials):
        case = random_case(seed, t, n_agents, n_slices)
        rm = rm_experiment(case.cake, case.extra, r)
        if not rm.passed and minimize:
            small, extra = shrink(lambda c, e, _: rm_experiment(c, e, r), case.cake, case.extra, None)
            rm = replace(rm_experiment(small, extra, r), note=f"shrunk from {case.name}")
        reports.append(rm)
        leaving = case.cake.agents[case.leaving]
        pm = pm_experiment(case.cake, leaving, r)
        if not pm.passed and minimize:
            small, _ = shrink(lambda c, e, who: pm_experiment(c, who, r), case.cake, (), leaving)
            pm = replace(pm_experiment(small, leaving, r), note=f"shrunk from {case.name}")
        reports.append(pm)
    return reports


# -- property matrix --------------------------------------------------------------

PROPERTIES = ("PROP", "EF", "RM", "PM")


@dataclass
class PropertyTally:
    rule: str
    cases: int = 0
    failures: dict = field(default_factory=lambda: {p: 0 for p in PROPERTIES})
    examples: dict = field(default_factory=dict)    # property -> first failing case name

    def record(self, prop: str, passed: bool, case: str) -> None:
        if not passed:
            self.failures[prop] += 1
            self.examples.setdefault(prop, case)


def property_matrix(rules: Sequence[RuleLike], cases: Sequence[Case]) -> dict[str, PropertyTally]:
    """Count PROP / EF / RM / PM failures of every rule over a corpus of cases."""
    out = {}
    for rule in rules:
        r = _as_rule(rule)
        tally = PropertyTally(r.name)
        for case in cases:
            res = r(case.cake)
            tol = r.tolerance_for(res)
            tally.cases += 1
            tally.record("PROP", check_proportional(case.cake, res.allocation, tol).passed, case.name)
            tally.record("EF", check_envy_free(case.cake, res.allocation, tol).passed, case.name)
            if case.extra:
                tally.record("RM", rm_experiment(case.cake, case.extra, r).passed, case.name)
            if case.leaving is not None and case.cake.n_agents > 1:
                try:
                    pm = pm_experiment(case.cake, case.leaving, r)
                except CakeError:
                    continue
                tally.record("PM", pm.passed, case.name)
        out[r.name] = tally
    return out
