"""Brute-force Nash oracle on a grid, for tests.

Every slice is split in multiples of ``1/grid``. The search is exhaustive in
effect but prunes with a sound upper bound: for any weights ``lam > 0``,

    prod_i (U_i + R_i) <= ((sum_i lam_i U_i + sum_{j rest} max_i lam_i a_ij) / n)^n / prod_i lam_i

(weighted AM-GM plus the fact that a slice is worth at most its best weighted
value). Weights are refined per node by a few best-response rounds. A node is
dropped only when its bound cannot beat the incumbent, so the grid optimum is
found up to float rounding (relative 1e-12).
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np

from ..cake import Allocation, Cake
from .base import SizeCapError, SolveResult, make_result, value_array

MAX_AGENTS = 3
MAX_SLICES = 6
_CHUNK = 400_000
_RTOL = 1e-12


def _compositions(g: int, n: int) -> np.ndarray:
    """All ways to write g as an ordered sum of n non-negative integers."""
    out = []
    for bars in combinations(range(g + n - 1), n - 1):
        prev, parts = -1, []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(g + n - 2 - prev)
        out.append(parts)
    return np.array(out, dtype=np.int64)


def _log_bound(U, a_rest, lam0, rounds=4):
    """Upper bound on log prod(U + what is left), one per row of U."""
    n = U.shape[1]
    total_rest = a_rest.sum(axis=1)
    with np.errstate(divide="ignore"):
        best = np.log(U + total_rest[None, :]).sum(axis=1)
    if a_rest.shape[1] == 0:
        return best
    lam = np.broadcast_to(lam0, U.shape).copy()
    for _ in range(rounds):
        weighted = lam[:, :, None] * a_rest[None, :, :]          # (N, n, r)
        top = weighted.max(axis=1)                               # (N, r)
        s = (lam * U).sum(axis=1) + top.sum(axis=1)
        with np.errstate(divide="ignore"):
            b = n * np.log(s / n) - np.log(lam).sum(axis=1)
        best = np.minimum(best, b)
        owner = weighted.argmax(axis=1)                          # (N, r)
        V = U.copy()
        for i in range(n):
            V[:, i] += np.where(owner == i, a_rest[i][None, :], 0.0).sum(axis=1)
        lam = 1.0 / np.maximum(V, 1e-300)
    return best


def _log_product(U):
    with np.errstate(divide="ignore"):
        return np.log(U).sum(axis=-1)


def _local_search(a, g):
    """Grid hill-climbing from the equal split; gives the first incumbent."""
    n, m = a.shape
    base, extra = divmod(g, n)
    K = np.full((n, m), base, dtype=np.int64)
    K[:extra, :] += 1
    U = (a * K).sum(axis=1) / g
    cur = _log_product(U)
    improved = True
    while improved:
        improved = False
        best = (cur, None)
        for j in range(m):
            for i in range(n):
                if K[i, j] == 0:
                    continue
                for k in range(n):
                    if k == i:
                        continue
                    V = U.copy()
                    V[i] -= a[i, j] / g
                    V[k] += a[k, j] / g
                    val = _log_product(V)
                    if val > best[0] + _RTOL:
                        best = (val, (i, k, j, V))
        if best[1] is not None:
            i, k, j, U = best[1]
            K[i, j] -= 1
            K[k, j] += 1
            cur = best[0]
            improved = True
    return K, cur, U


def nash_brute_oracle(cake: Cake, grid: int = 60) -> SolveResult:
    """Best Nash product over fraction matrices with entries in multiples of ``1/grid``."""
    n, m = cake.n_agents, cake.n_slices
    if grid < 1:
        raise ValueError("grid must be a positive integer")
    if n > MAX_AGENTS or m > MAX_SLICES:
        raise SizeCapError(f"oracle handles at most {MAX_AGENTS} agents and {MAX_SLICES} slices, "
                           f"got {n} and {m}")
    a = value_array(cake, relative=True)
    order = sorted(range(m), key=lambda j: -a[:, j].max())
    a = a[:, order]
    comps = _compositions(grid, n)
    shares = comps / grid
    K0, inc, U0 = _local_search(a, grid)
    lam0 = 1.0 / np.maximum(U0, 1e-300)
    best_path = [tuple(K0[:, j]) for j in range(m)]

    # Level-wise expansion; each survivor remembers its parent and composition.
    U = np.zeros((1, n))
    history = []
    nodes = 0
    for d in range(m):
        gain = shares * a[:, d][None, :]
        a_rest = a[:, d + 1:]
        last = d == m - 1
        keep_U, keep_parent, keep_comp = [], [], []
        per = max(1, _CHUNK // len(comps))
        for start in range(0, len(U), per):
            block = U[start:start + per]
            cand = (block[:, None, :] + gain[None, :, :]).reshape(-1, n)
            nodes += len(cand)
            parent = np.repeat(np.arange(start, start + len(block)), len(comps))
            comp = np.tile(np.arange(len(comps)), len(block))
            if last:
                val = _log_product(cand)
                k = int(np.argmax(val))
                if val[k] > inc + _RTOL:
                    inc = float(val[k])
                    path = [int(comp[k])]
                    p = int(parent[k])
                    for lvl in range(d - 1, -1, -1):
                        par, cmp_ = history[lvl]
                        path.append(int(cmp_[p]))
                        p = int(par[p])
                    best_path = [tuple(comps[c]) for c in reversed(path)]
                continue
            bound = _log_bound(cand, a_rest, lam0)
            ok = bound > inc + _RTOL
            if not ok.any():
                continue
            cand, parent, comp = cand[ok], parent[ok], comp[ok]
            # identical partial utilities lead to identical subtrees
            _, first = np.unique(np.round(cand, 12), axis=0, return_index=True)
            keep_U.append(cand[first])
            keep_parent.append(parent[first])
            keep_comp.append(comp[first])
        if last:
            break
        if not keep_U:
            break
        U = np.concatenate(keep_U)
        history.append((np.concatenate(keep_parent), np.concatenate(keep_comp)))

    fractions = [[Fraction(0)] * m for _ in range(n)]
    for pos, j in enumerate(order):
        for i in range(n):
            fractions[i][j] = Fraction(int(best_path[pos][i]), grid)
    alloc = Allocation(tuple(tuple(r) for r in fractions))
    return make_result("nash-oracle", cake, alloc, grid=grid, nodes=nodes)
