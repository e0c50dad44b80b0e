from .base import ConvergenceError, SizeCapError, SolveResult, SolverError, rationalize
from .leximin import solve_leximin_absolute, solve_leximin_relative
from .nash import nash_product, solve_nash
from .oracle import nash_brute_oracle
from .welfare import (
    WelfareClass,
    WelfareParam,
    classify_welfare,
    solve_utilitarian_absolute,
    solve_utilitarian_relative,
    solve_wp_absolute,
    solve_wp_relative,
)

__all__ = [
    "ConvergenceError", "SizeCapError", "SolveResult", "SolverError", "rationalize",
    "solve_leximin_absolute", "solve_leximin_relative", "nash_product", "solve_nash",
    "nash_brute_oracle", "WelfareClass", "WelfareParam", "classify_welfare",
    "solve_utilitarian_absolute", "solve_utilitarian_relative",
    "solve_wp_absolute", "solve_wp_relative",
]
