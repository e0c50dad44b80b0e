"""Exact rational linear programming.

Dense two-phase tableau simplex with Bland's rule. Every number is a
``fractions.Fraction``, so optimal solutions satisfy the constraints with zero
residual and repeated solves of the same program give identical answers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .cake import as_fraction

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class LinearProgram:
    """``max`` (or ``min``) ``objective . x`` s.t. ``rows[k] . x  senses[k]  rhs[k]``.

    ``bounds[v]`` is ``(lo, hi)`` with ``None`` meaning infinite; the default
    bound is ``(0, None)``.
    """

    objective: Sequence
    rows: Sequence[Sequence] = ()
    senses: Sequence[str] = ()
    rhs: Sequence = ()
    bounds: Optional[Sequence[tuple]] = None
    maximize: bool = True

    def __post_init__(self):
        nv = len(self.objective)
        if not (len(self.rows) == len(self.senses) == len(self.rhs)):
            raise ValueError("rows, senses and rhs must have the same length")
        for k, row in enumerate(self.rows):
            if len(row) != nv:
                raise ValueError(f"row {k} has {len(row)} coefficients for {nv} variables")
        for s in self.senses:
            if s not in ("<=", "=", ">="):
                raise ValueError(f"unknown constraint sense {s!r}")
        if self.bounds is not None:
            if len(self.bounds) != nv:
                raise ValueError("one (lo, hi) bound per variable is required")
            for lo, hi in self.bounds:
                if lo is not None and hi is not None and as_fraction(lo) > as_fraction(hi):
                    raise ValueError(f"lower bound {lo} exceeds upper bound {hi}")

    @property
    def n_vars(self) -> int:
        return len(self.objective)


@dataclass(frozen=True)
class LpSolution:
    status: str
    x: tuple[Fraction, ...] = ()
    objective: Optional[Fraction] = None
    pivots: int = field(default=0, compare=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    """Row r reads ``sum_k rows[r][k] * x_k = rhs[r]`` with ``basis[r]`` its unit column."""

    def __init__(self, rows, rhs, basis, n_cols):
        self.rows = rows          # list[dict[int, Fraction]]
        self.rhs = rhs            # list[Fraction]
        self.basis = basis        # list[int]
        self.n_cols = n_cols
        self.pivots = 0

    def pivot(self, r: int, col: int) -> None:
        prow = self.rows[r]
        piv = prow[col]
        if piv != 1:
            inv = 1 / piv
            prow = {k: v * inv for k, v in prow.items()}
            self.rhs[r] *= inv
            self.rows[r] = prow
        prhs = self.rhs[r]
        items = list(prow.items())
        for k, row in enumerate(self.rows):
            if k == r:
                continue
            f = row.get(col)
            if not f:
                continue
            for c, v in items:
                nv = row.get(c, _ZERO) - f * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
            self.rhs[k] -= f * prhs
        self.basis[r] = col
        self.pivots += 1

    def reduced_costs(self, cost: dict[int, Fraction]) -> dict[int, Fraction]:
        """Reduced costs ``c_k - c_B B^-1 A_k`` for a maximisation objective."""
        red = dict(cost)
        for r, b in enumerate(self.basis):
            cb = cost.get(b)
            if not cb:
                continue
            for c, v in self.rows[r].items():
                nv = red.get(c, _ZERO) - cb * v
                if nv:
                    red[c] = nv
                else:
                    red.pop(c, None)
        return red

    def optimize(self, cost: dict[int, Fraction], allowed: set[int]) -> str:
        """Maximise ``cost . x`` over columns in ``allowed`` using Bland's rule."""
        red = self.reduced_costs(cost)
        while True:
            basic = set(self.basis)
            entering = None
            for c in sorted(red):
                if c in allowed and c not in basic and red[c] > 0:
                    entering = c
                    break
            if entering is None:
                return OPTIMAL
            best = None
            for r, row in enumerate(self.rows):
                a = row.get(entering)
                if a is not None and a > 0:
                    ratio = self.rhs[r] / a
                    key = (ratio, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return UNBOUNDED
            r = best[1]
            d = red[entering]
            self.pivot(r, entering)
            for c, v in self.rows[r].items():
                nv = red.get(c, _ZERO) - d * v
                if nv:
                    red[c] = nv
                else:
                    red.pop(c, None)
            red.pop(entering, None)


def lp_solve(lp: LinearProgram) -> LpSolution:
    """Solve ``lp`` exactly. Infeasibility and unboundedness are reported via ``status``."""
    nv = lp.n_vars
    obj = [as_fraction(c) for c in lp.objective]
    if not lp.maximize:
        obj = [-c for c in obj]
    bounds = lp.bounds if lp.bounds is not None else [(0, None)] * nv

    # Map each original variable onto non-negative columns: x = shift + sum(sign * col).
    col_of: list[list[tuple[int, Fraction]]] = []
    shift: list[Fraction] = []
    extra_rows: list[tuple[dict[int, Fraction], str, Fraction]] = []
    n_cols = 0
    for lo, hi in bounds:
        lo = None if lo is None else as_fraction(lo)
        hi = None if hi is None else as_fraction(hi)
        if lo is not None:
            col_of.append([(n_cols, _ONE)])
            shift.append(lo)
            if hi is not None:
                extra_rows.append(({n_cols: _ONE}, "<=", hi - lo))
            n_cols += 1
        elif hi is not None:
            col_of.append([(n_cols, -_ONE)])
            shift.append(hi)
            n_cols += 1
        else:
            col_of.append([(n_cols, _ONE), (n_cols + 1, -_ONE)])
            shift.append(_ZERO)
            n_cols += 2

    constraints: list[tuple[dict[int, Fraction], str, Fraction]] = []
    for row, sense, b in zip(lp.rows, lp.senses, lp.rhs):
        coeffs: dict[int, Fraction] = {}
        b = as_fraction(b)
        for v, a in enumerate(row):
            a = as_fraction(a)
            if not a:
                continue
            b -= a * shift[v]
            for c, sgn in col_of[v]:
                coeffs[c] = coeffs.get(c, _ZERO) + sgn * a
        constraints.append(({c: a for c, a in coeffs.items() if a}, sense, b))
    constraints.extend(extra_rows)

    cost: dict[int, Fraction] = {}
    for v, c in enumerate(obj):
        if not c:
            continue
        for col, sgn in col_of[v]:
            cost[col] = cost.get(col, _ZERO) + sgn * c

    # Slack / surplus / artificial columns; every row ends up with rhs >= 0.
    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    basis: list[int] = []
    artificials: list[int] = []
    for coeffs, sense, b in constraints:
        if b < 0:
            coeffs = {c: -a for c, a in coeffs.items()}
            b = -b
            sense = {"<=": ">=", ">=": "<=", "=": "="}[sense]
        row = dict(coeffs)
        if sense == "<=":
            row[n_cols] = _ONE
            basis.append(n_cols)
            n_cols += 1
        else:
            if sense == ">=":
                row[n_cols] = -_ONE
                n_cols += 1
            row[n_cols] = _ONE
            basis.append(n_cols)
            artificials.append(n_cols)
            n_cols += 1
        rows.append(row)
        rhs.append(b)

    tab = _Tableau(rows, rhs, basis, n_cols)
    art_set = set(artificials)
    all_cols = set(range(n_cols))

    if artificials:
        phase1 = {a: -_ONE for a in artificials}
        status = tab.optimize(phase1, all_cols)
        infeas = sum((tab.rhs[r] for r, b in enumerate(tab.basis) if b in art_set), _ZERO)
        if status != OPTIMAL or infeas != 0:
            return LpSolution(INFEASIBLE, pivots=tab.pivots)
        # Drive zero-level artificials out of the basis; drop redundant rows.
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] in art_set:
                col = next((c for c in sorted(tab.rows[r]) if c not in art_set
                            and c != tab.basis[r]), None)
                if col is None:
                    del tab.rows[r], tab.rhs[r], tab.basis[r]
                    continue
                tab.pivot(r, col)
            r += 1
        for row in tab.rows:
            for a in artificials:
                row.pop(a, None)

    allowed = all_cols - art_set
    status = tab.optimize(cost, allowed)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, pivots=tab.pivots)

    values = [_ZERO] * n_cols
    for r, b in enumerate(tab.basis):
        values[b] = tab.rhs[r]
    x = []
    for v in range(nv):
        xv = shift[v]
        for c, sgn in col_of[v]:
            xv += sgn * values[c]
        x.append(xv)
    objective = sum((c * xv for c, xv in zip(obj, x)), _ZERO)
    if not lp.maximize:
        objective = -objective
    return LpSolution(OPTIMAL, tuple(x), objective, tab.pivots)
