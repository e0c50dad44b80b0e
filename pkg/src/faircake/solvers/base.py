from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from ..cake import Allocation, Cake, UtilityVector, utilities


class SolverError(RuntimeError):
    pass


class ConvergenceError(SolverError):
    """Iterative solver hit its iteration cap before meeting the tolerance."""


class SizeCapError(SolverError):
    """Instance too large for an enumerative method."""


@dataclass(frozen=True)
class SolveResult:
    rule: str
    allocation: Allocation
    utilities: UtilityVector
    prices: Optional[Any] = None          # PriceVector, Nash only
    diagnostics: dict = field(default_factory=dict, compare=False)


def make_result(rule: str, cake: Cake, alloc: Allocation, prices=None, **diagnostics) -> SolveResult:
    return SolveResult(rule, alloc, utilities(cake, alloc), prices, diagnostics)


def rationalize(x: np.ndarray, max_denominator: int = 10**9, zero: float = 1e-12) -> Allocation:
    """Round a float fraction matrix to rationals, keeping every column summing to 1.

    Entries below ``zero`` are dropped; the largest entry of each column absorbs
    the rounding remainder.
    """
    n, m = x.shape
    cols = []
    for j in range(m):
        col = np.clip(x[:, j], 0.0, None)
        col = np.where(col < zero, 0.0, col)
        s = col.sum()
        col = col / s if s > 0 else np.full(n, 1.0 / n)
        big = int(np.argmax(col))
        fr = [Fraction(float(v)).limit_denominator(max_denominator) for v in col]
        fr[big] = 0
        rest = sum(fr, Fraction(0))
        if rest > 1:
            fr = [f / rest for f in fr]
            rest = Fraction(1)
        fr[big] = 1 - rest
        cols.append(fr)
    return Allocation(tuple(tuple(cols[j][i] for j in range(m)) for i in range(n)))


def value_array(cake: Cake, relative: bool = False) -> np.ndarray:
    mat = cake.relative_value_matrix() if relative else cake.value_matrix()
    return np.array([[float(v) for v in row] for row in mat])
