"""Welfare maximisers for the power family ``w_p(x) = x**p / p`` (``ln x`` at p = 0).

Concave members (p < 1) are solved by spectral projected gradient ascent over
the product of per-slice simplices. p = 1 is linear and solved exactly slice by
slice. Convex members (p > 1) attain their maximum at a vertex, so small
instances are solved by enumerating whole-slice assignments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..cake import Allocation, Cake, as_fraction
from .base import ConvergenceError, SizeCapError, SolveResult, make_result, rationalize, value_array

VERTEX_CAP = 2_000_000
MAX_ITER = 200_000
P_MIN = -10     # below this the float solver loses accuracy; leximin is the limit


@dataclass(frozen=True)
class WelfareParam:
    p: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p", as_fraction(self.p))

    @property
    def kind(self) -> str:
        p = self.p
        if p > 1:
            return "convex"
        if p == 1:
            return "utilitarian"
        if p > 0:
            return "strictly_concave"
        if p == 0:
            return "nash"
        return "hyper_concave"

    @property
    def concave(self) -> bool:
        return self.p <= 1

    @property
    def hyper_concave(self) -> bool:
        """x * w'(x) = x**p is non-increasing iff p <= 0."""
        return self.p <= 0

    def w(self, x: float) -> float:
        p = float(self.p)
        if p == 0:
            return math.log(x) if x > 0 else -math.inf
        if x <= 0:
            return -math.inf if p < 0 else 0.0
        return x ** p / p

    def dw(self, x: float) -> float:
        return x ** (float(self.p) - 1) if x > 0 else math.inf


@dataclass(frozen=True)
class WelfareClass:
    kind: str
    absolute: frozenset
    relative: frozenset

    def expects(self, prop: str, family: str) -> bool:
        return prop in (self.absolute if family == "absolute" else self.relative)


def classify_welfare(p) -> WelfareClass:
    """Properties guaranteed for the w_p-maximising rules, per utility family."""
    wp = WelfareParam(p)
    p = wp.p
    absolute, relative = {"PO"}, {"PO"}
    if p < 1:
        absolute.add("ESV")
        relative.add("ESV")
    if p == 0:
        absolute.add("PROP")
    if p <= 0:
        relative.add("PROP")
    if p <= 1:
        absolute.add("RM")
        absolute.add("PM")
        relative.add("PM")
    if p == 0:
        relative.add("RM")
    return WelfareClass(wp.kind, frozenset(absolute), frozenset(relative))


# -- utilitarian ---------------------------------------------------------------

def _utilitarian(cake: Cake, relative: bool, rule: str) -> SolveResult:
    owners = []
    for j in range(cake.n_slices):
        if relative:
            score = [cake.density(i, j) / cake.total(i) for i in range(cake.n_agents)]
        else:
            score = [cake.density(i, j) for i in range(cake.n_agents)]
        top = max(score)
        owners.append(score.index(top))          # lowest index wins ties
    return make_result(rule, cake, Allocation.from_owners(cake, owners))


def solve_utilitarian_absolute(cake: Cake) -> SolveResult:
    """Each slice to an agent with the highest density; ties to the lowest index."""
    return _utilitarian(cake, False, "util-abs")


def solve_utilitarian_relative(cake: Cake) -> SolveResult:
    """Each slice to an agent with the highest normalised density; ties to the lowest index."""
    return _utilitarian(cake, True, "util-rel")


# -- concave case: spectral projected gradient ------------------------------------

def project_columns(y: np.ndarray) -> np.ndarray:
    """Euclidean projection of every column onto the probability simplex."""
    n = y.shape[0]
    # shifting a column does not move its projection; it keeps huge entries exact
    y = y - y.max(axis=0, keepdims=True)
    u = -np.sort(-y, axis=0)
    css = np.cumsum(u, axis=0) - 1.0
    k = np.arange(1, n + 1)[:, None]
    cond = u - css / k > 0
    rho = n - 1 - np.argmax(cond[::-1], axis=0)
    theta = css[rho, np.arange(y.shape[1])] / (rho + 1)
    return np.maximum(y - theta[None, :], 0.0)


def _objective(U, p):
    if p == 0:
        with np.errstate(divide="ignore"):
            return float(np.log(U).sum()) if (U > 0).all() else -math.inf
    if p < 0 and not (U > 0).all():
        return -math.inf
    return float((np.maximum(U, 0.0) ** p).sum() / p)


def _gradient(A, U, p):
    # w' blows up at 0; a relative floor keeps line-search slopes finite
    floor = max(float(U.max()), 1e-300) * 1e-12
    return (np.maximum(U, floor) ** (p - 1))[:, None] * A


def _first_order_residual(A, X, p, held=1e-9):
    """How far a held share is from going to an agent with the highest marginal welfare."""
    U = (A * X).sum(axis=1)
    G = _gradient(A, U, p)
    best = G.max(axis=0)
    gap = np.where(X > held, best[None, :] - G, 0.0)
    return float((gap / np.maximum(best, 1e-300)[None, :]).max())


def _warm_start(A, p, rounds=5000, tol=1e-12):
    """Proportional response with budgets B_i tracking U_i**p.

    The w_p optimum is a linear-market equilibrium where agent i spends
    U_i**p. With log-damping eta = 2 / (2 - p) the budget map contracts by
    |p| / (2 - p) whatever the market's elasticity. Multiplicative updates
    reach tiny shares that gradient steps crawl to.
    """
    eta = 2 / (2 - p)
    B = np.full(A.shape[0], 1.0 / A.shape[0])
    b = B[:, None] * A / A.sum(axis=1, keepdims=True)
    U_old = np.zeros(A.shape[0])
    for _ in range(rounds):
        q = b.sum(axis=0)
        x = b / np.where(q > 0, q, 1.0)
        U = np.maximum((A * x).sum(axis=1), 1e-300)
        lb = (1 - eta) * np.log(B) + eta * p * np.log(U)
        B_new = np.maximum(np.exp(lb - lb.max()), 1e-300)
        B_new /= B_new.sum()
        b = B_new[:, None] * A * x / U[:, None]
        moved = max(np.abs(B_new - B).max(), np.abs(U - U_old).max() / U.max())
        B, U_old = B_new, U
        if moved < tol:
            break
    q = b.sum(axis=0)
    return np.where(q > 0, b / np.where(q > 0, q, 1.0), 1.0 / A.shape[0])


def _spg(A, p, tol, max_iter):
    X = _warm_start(A, p)
    # w_p is homogeneous, so rescaling values keeps the optimum; O(1) utilities
    # keep gradients and step sizes in a range the step clamps can handle
    A = A / max(float((A * X).sum(axis=1).max()), 1e-300)
    U = (A * X).sum(axis=1)
    f = _objective(U, p)
    if not math.isfinite(f):
        X = np.full(A.shape, 1.0 / A.shape[0])
        U = (A * X).sum(axis=1)
        f = _objective(U, p)
    G = _gradient(A, U, p)
    alpha = 1.0 / max(np.abs(G).max(), 1e-12)
    history = [f]
    best, best_it = f, 0
    for it in range(1, max_iter + 1):
        D = project_columns(X + alpha * G) - X
        # optimality measure: projected gradient with a unit step, scaled
        pg = np.abs(project_columns(X + G / max(np.abs(G).max(), 1e-300)) - X).max()
        if pg < tol:
            return X, it
        slope = float((G * D).sum())
        ref = max(history[-10:])
        lam = 1.0
        while True:
            Xn = X + lam * D
            Un = (A * Xn).sum(axis=1)
            fn = _objective(Un, p)
            if fn >= ref + 1e-4 * lam * slope:
                break
            if lam < 1e-20:
                Xn, Un, fn = X, U, f
                break
            lam *= 0.5
        Gn = _gradient(A, Un, p)
        s = Xn - X
        y = -(Gn - G)
        sy = float((s * y).sum())
        alpha = float((s * s).sum()) / sy if sy > 1e-300 else 1e10
        alpha = min(max(alpha, 1e-10), 1e10)
        X, U, f, G = Xn, Un, fn, Gn
        history.append(f)
        # at float precision progress stops before the projected gradient vanishes
        if f > best + 1e-14 * abs(best):
            best, best_it = f, it
        elif it - best_it >= 200:
            return X, it
    raise ConvergenceError(f"projected gradient did not converge in {max_iter} iterations")


# -- convex case: vertex enumeration -------------------------------------------------

def _vertex_max(cake: Cake, vals, p: Fraction):
    n, m = cake.n_agents, cake.n_slices
    count = n ** m
    if count > VERTEX_CAP:
        raise SizeCapError(f"{n}^{m} vertex allocations exceed the cap of {VERTEX_CAP}")
    A = np.array([[float(v) for v in row] for row in vals])
    pf = float(p)
    best_val, cands = -math.inf, []
    chunk = 1 << 16
    powers = n ** np.arange(m)
    for start in range(0, count, chunk):
        idx = np.arange(start, min(count, start + chunk))
        owners = (idx[:, None] // powers[None, :]) % n               # (N, m)
        U = np.zeros((len(idx), n))
        for i in range(n):
            U[:, i] = ((owners == i) * A[i][None, :]).sum(axis=1)
        obj = (U ** pf).sum(axis=1)
        best_val = max(best_val, float(obj.max()))
        cut = best_val * (1 - 1e-9)
        cands = [c for c in cands if c[1] >= cut]
        cands.extend((int(idx[k]), float(obj[k])) for k in np.nonzero(obj >= cut)[0])

    def owners_of(code):
        return [(code // n ** j) % n for j in range(m)]

    if p.denominator == 1:
        def exact(code):
            own = owners_of(code)
            return sum(sum((vals[i][j] for j in range(m) if own[j] == i), Fraction(0)) ** int(p)
                       for i in range(n))
        scored = [(exact(c), c) for c, _ in cands]
        top = max(s for s, _ in scored)
        code = next(c for s, c in scored if s == top)
    else:
        code = next(c for c, v in cands if v == best_val)
    return owners_of(code), count


# -- public solvers ----------------------------------------------------------------

def _solve_wp(cake: Cake, p, relative: bool, tol: float, max_iter: int) -> SolveResult:
    wp = WelfareParam(p)
    rule = "wp-rel" if relative else "wp-abs"
    if wp.p == 1:
        res = _utilitarian(cake, relative, rule)
        return make_result(rule, cake, res.allocation, p=str(wp.p), method="slice-argmax")
    if wp.p > 1:
        vals = cake.relative_value_matrix() if relative else cake.value_matrix()
        owners, count = _vertex_max(cake, vals, wp.p)
        alloc = Allocation.from_owners(cake, owners)
        return make_result(rule, cake, alloc, p=str(wp.p), method="vertex-enumeration",
                           vertices=count)
    if wp.p < P_MIN:
        raise ValueError(f"p = {wp.p} is below the supported range (p >= {P_MIN}); "
                         "use a leximin rule for the limit")
    A = value_array(cake, relative)
    X, it = _spg(A, float(wp.p), tol, max_iter)
    alloc = rationalize(X)
    Xr = np.array([[float(v) for v in row] for row in alloc.fractions])
    return make_result(rule, cake, alloc, p=str(wp.p), method="projected-gradient",
                       iterations=it, first_order_residual=_first_order_residual(A, Xr, float(wp.p)))


def solve_wp_absolute(cake: Cake, p, tol: float = 1e-9, max_iter: int = MAX_ITER) -> SolveResult:
    """Maximise sum_i w_p(absolute utility of i)."""
    return _solve_wp(cake, p, False, tol, max_iter)


def solve_wp_relative(cake: Cake, p, tol: float = 1e-9, max_iter: int = MAX_ITER) -> SolveResult:
    """Maximise sum_i w_p(relative utility of i)."""
    return _solve_wp(cake, p, True, tol, max_iter)
