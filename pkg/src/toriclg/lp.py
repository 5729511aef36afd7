"""Exact rational linear programming (two-phase simplex, Bland's rule).

Small dense problems only; used for strict-convexity certificates and cone
membership queries where floating point would not be trustworthy.
"""
from __future__ import annotations

from fractions import Fraction

from .rational import frac


def _simplex(T, basis, nrows, ncols):
    # T: tableau rows 0..nrows-1 constraints, last row objective (to minimize,
    # written as z-row: T[-1][j] = reduced costs, T[-1][-1] = -value).
    while True:
        zrow = T[nrows]
        col = next((j for j in range(ncols) if zrow[j] < 0), None)
        if col is None:
            return "optimal"
        ratios = [(T[i][ncols] / T[i][col], basis[i], i)
                  for i in range(nrows) if T[i][col] > 0]
        if not ratios:
            return "unbounded"
        _, _, row = min(ratios, key=lambda t: (t[0], t[1]))
        piv = T[row][col]
        T[row] = [x / piv for x in T[row]]
        for i in range(nrows + 1):
            if i != row and T[i][col] != 0:
                f = T[i][col]
                T[i] = [a - f * b for a, b in zip(T[i], T[row])]
        basis[row] = col


def lp_maximize(c, A_ub=(), b_ub=(), A_eq=(), b_eq=()):
    """Maximize c.x with A_ub x <= b_ub, A_eq x = b_eq, x free.

    Returns (status, value, x); value and x are None unless optimal.
    """
    c = [frac(x) for x in c]
    n = len(c)
    rows = []
    rhs = []
    kinds = []
    for a, b in zip(A_ub, b_ub):
        rows.append([frac(x) for x in a])
        rhs.append(frac(b))
        kinds.append("ub")
    for a, b in zip(A_eq, b_eq):
        rows.append([frac(x) for x in a])
        rhs.append(frac(b))
        kinds.append("eq")
    m = len(rows)
    nslack = sum(1 for k in kinds if k == "ub")
    # variables: x = u - v (2n), slacks, artificials
    ncols = 2 * n + nslack
    data = []
    si = 0
    for i in range(m):
        row = [Fraction(0)] * ncols
        for j in range(n):
            row[j] = rows[i][j]
            row[n + j] = -rows[i][j]
        if kinds[i] == "ub":
            row[2 * n + si] = Fraction(1)
            si += 1
        b = rhs[i]
        if b < 0:
            row = [-x for x in row]
            b = -b
        data.append((row, b))
    # phase 1
    nart = m
    width = ncols + nart
    T = []
    basis = []
    for i, (row, b) in enumerate(data):
        full = row + [Fraction(0)] * nart + [b]
        full[ncols + i] = Fraction(1)
        T.append(full)
        basis.append(ncols + i)
    zrow = [Fraction(0)] * (width + 1)
    for i in range(m):
        zrow = [a - b for a, b in zip(zrow, T[i])]
    # z-row entries of artificial columns must be zero in phase 1 objective
    for i in range(m):
        zrow[ncols + i] = Fraction(0)
    T.append(zrow)
    status = _simplex(T, basis, m, width)
    if status != "optimal" or T[m][width] != 0:
        return "infeasible", None, None
    # drive artificials out of the basis if possible
    for i in range(m):
        if basis[i] >= ncols:
            col = next((j for j in range(ncols) if T[i][j] != 0), None)
            if col is None:
                continue
            piv = T[i][col]
            T[i] = [x / piv for x in T[i]]
            for r in range(m + 1):
                if r != i and T[r][col] != 0:
                    f = T[r][col]
                    T[r] = [a - f * b for a, b in zip(T[r], T[i])]
            basis[i] = col
    # phase 2
    obj = [Fraction(0)] * (width + 1)
    for j in range(n):
        obj[j] = -c[j]       # minimize -c.x
        obj[n + j] = c[j]
    for j in range(ncols, width):
        obj[j] = Fraction(0)
    T[m] = obj
    for i in range(m):
        j = basis[i]
        if T[m][j] != 0:
            f = T[m][j]
            T[m] = [a - f * b for a, b in zip(T[m], T[i])]
    # forbid re-entering artificial columns
    for j in range(ncols, width):
        for i in range(m + 1):
            pass
    status = _simplex(T, basis, m, ncols)
    if status == "unbounded":
        return "unbounded", None, None
    x = [Fraction(0)] * (2 * n)
    for i in range(m):
        if basis[i] < 2 * n:
            x[basis[i]] = T[i][width]
    sol = tuple(x[j] - x[n + j] for j in range(n))
    value = sum(c[j] * sol[j] for j in range(n))
    return "optimal", value, sol


def feasible_strict(A_strict, A_weak=(), b_weak=(), A_eq=(), b_eq=(), cap=Fraction(1)):
    """Decide feasibility of {A_strict x > 0, A_weak x <= b_weak, A_eq x = b_eq}.

    Homogeneous strict rows are handled by maximizing a shared slack eps with
    A_strict x >= eps, eps <= cap; strict feasibility iff the optimum is > 0.
    Returns (feasible, witness_x_or_None).
    """
    n = len(A_strict[0]) if A_strict else (len(A_weak[0]) if A_weak else len(A_eq[0]))
    A_ub = []
    b_ub = []
    for a in A_strict:
        A_ub.append([-frac(x) for x in a] + [Fraction(1)])
        b_ub.append(Fraction(0))
    for a, b in zip(A_weak, b_weak):
        A_ub.append([frac(x) for x in a] + [Fraction(0)])
        b_ub.append(frac(b))
    A_ub.append([Fraction(0)] * n + [Fraction(1)])
    b_ub.append(frac(cap))
    eqs = [[frac(x) for x in a] + [Fraction(0)] for a in A_eq]
    c = [Fraction(0)] * n + [Fraction(1)]
    status, value, x = lp_maximize(c, A_ub, b_ub, eqs, [frac(b) for b in b_eq])
    if status != "optimal" or value <= 0:
        return False, None
    return True, x[:n]
