"""Fair division of piecewise-homogeneous cakes.

Exact rational models of cakes and divisions, solvers for the Nash-optimal,
leximin, utilitarian and power-welfare rules, fairness and equilibrium
checkers, and monotonicity experiments.
"""
from .axioms import (
    AxiomReport,
    check_envy_free,
    check_esv_probe,
    check_pareto_optimal,
    check_proportional,
    check_weak_pareto_optimal,
)
from .cake import (
    Allocation,
    AllocationError,
    Cake,
    CakeError,
    Slice,
    UtilityVector,
    absolute_utility,
    enlarge,
    piece_value,
    relative_utility,
    remove_agent,
    utilities,
)
from .ceei import (
    PriceError,
    PriceVector,
    nash_sceei_equivalence_check,
    price_gap,
    standard_price_measure,
    verify_ceei,
    verify_sceei,
)
from .io import load_cake, load_fixture
from .lp import LinearProgram, LpSolution, lp_solve
from .monotonicity import (
    MonotonicityReport,
    cut_and_choose,
    fuzz,
    pm_experiment,
    property_matrix,
    rm_experiment,
)
from .rules import Rule, get_rule
from .solvers import (
    ConvergenceError,
    SizeCapError,
    SolveResult,
    SolverError,
    WelfareParam,
    classify_welfare,
    nash_brute_oracle,
    nash_product,
    solve_leximin_absolute,
    solve_leximin_relative,
    solve_nash,
    solve_utilitarian_absolute,
    solve_utilitarian_relative,
    solve_wp_absolute,
    solve_wp_relative,
)

__version__ = "0.1.0"
