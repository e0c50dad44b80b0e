"""Named division rules with the metadata the harness and the CLI need."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .cake import Cake, as_fraction
from .solvers import (
    solve_leximin_absolute,
    solve_leximin_relative,
    solve_nash,
    solve_utilitarian_absolute,
    solve_utilitarian_relative,
    solve_wp_absolute,
    solve_wp_relative,
)
from .solvers.base import SolveResult, make_result
from .solvers.welfare import P_MIN

RULE_NAMES = ("nash", "leximin-abs", "leximin-rel", "util-abs", "util-rel",
              "wp-abs", "wp-rel", "cut-and-choose")

FLOAT_TOL = 1e-6


@dataclass(frozen=True)
class Rule:
    name: str
    solve: Callable[[Cake], SolveResult]
    # single_valued: every call returns the same utilities as any other optimum.
    # Rules that pick one optimum out of many are only checked at selection level.
    single_valued: bool
    tol: float = 0.0
    p: Optional[object] = None

    def __call__(self, cake: Cake) -> SolveResult:
        return self.solve(cake)

    @property
    def level(self) -> str:
        return "exact" if self.single_valued else "selection-level"

    def tolerance_for(self, result: SolveResult) -> float:
        if result.diagnostics.get("exact"):
            return 0.0
        return self.tol


def _cut_and_choose_rule(cake: Cake) -> SolveResult:
    from .monotonicity import cut_and_choose
    return make_result("cut-and-choose", cake, cut_and_choose(cake))


def get_rule(name: str, p=None, tol: float = 1e-9) -> Rule:
    """Look up a rule by its CLI name. ``p`` is required for the wp-* rules."""
    if name == "nash":
        return Rule(name, lambda c: solve_nash(c, tol=tol), True, FLOAT_TOL)
    if name == "leximin-abs":
        return Rule(name, solve_leximin_absolute, True)
    if name == "leximin-rel":
        return Rule(name, solve_leximin_relative, True)
    if name == "util-abs":
        return Rule(name, solve_utilitarian_absolute, False)
    if name == "util-rel":
        return Rule(name, solve_utilitarian_relative, False)
    if name in ("wp-abs", "wp-rel"):
        if p is None:
            raise ValueError(f"rule {name} needs a welfare exponent p")
        p = as_fraction(p)
        if p < P_MIN:
            raise ValueError(f"p = {p} is below the supported range (p >= {P_MIN})")
        fn = solve_wp_absolute if name == "wp-abs" else solve_wp_relative
        # p < 1 is strictly concave, so the optimum utilities are unique
        return Rule(name, lambda c: fn(c, p, tol=tol), p < 1, FLOAT_TOL if p < 1 else 0.0, p)
    if name == "cut-and-choose":
        return Rule(name, _cut_and_choose_rule, True)
    raise KeyError(f"unknown rule {name!r}; choose from {', '.join(RULE_NAMES)}")
