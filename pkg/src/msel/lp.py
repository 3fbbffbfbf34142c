"""Exact two-phase simplex over the rationals.

Pivoting follows Bland's rule on the column/row order of the input, so a
given problem always yields the same optimizer.  The tableau is dense but
row updates skip zero entries of the pivot row, which is what keeps the
pure-Python ``Fraction`` arithmetic tolerable at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

LE, GE, EQ = "<=", ">=", "="

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "unbounded" | "infeasible"
    value: Optional[Fraction] = None
    x: Optional[tuple] = None
    ray: Optional[tuple] = None  # improving direction when unbounded

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class _Tableau:
    def __init__(self, rows, rhs, basis, ncols):
        self.rows = rows  # list[list[Fraction]]
        self.rhs = rhs  # list[Fraction]
        self.basis = basis  # list[int]
        self.ncols = ncols
        self.obj = [ZERO] * ncols

    def set_objective(self, cost):
        obj = list(cost)
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                row = self.rows[i]
                for j in range(self.ncols):
                    if row[j]:
                        obj[j] -= cb * row[j]
        self.obj = obj

    def pivot(self, r, j):
        prow = self.rows[r]
        p = prow[j]
        nz = [k for k in range(self.ncols) if prow[k]]
        if p != 1:
            inv = 1 / p
            for k in nz:
                prow[k] *= inv
            self.rhs[r] *= inv
        prhs = self.rhs[r]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row[j]
            if f:
                for k in nz:
                    row[k] -= f * prow[k]
                if prhs:
                    self.rhs[i] -= f * prhs
        f = self.obj[j]
        if f:
            for k in nz:
                self.obj[k] -= f * prow[k]
        self.basis[r] = j

    def run(self, allowed):
        """Maximize the current objective; return None or an unbounded column."""
        while True:
            enter = -1
            for j in range(self.ncols):
                if allowed[j] and self.obj[j] > 0:
                    enter = j
                    break
            if enter < 0:
                return None
            leave = -1
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = self.rhs[i] / a
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and self.basis[i] < self.basis[leave])
                    ):
                        best = ratio
                        leave = i
            if leave < 0:
                return enter
            self.pivot(leave, enter)


def maximize(
    c: Sequence[Fraction],
    rows: Sequence[tuple],
    nonneg: Optional[Sequence[bool]] = None,
) -> LPResult:
    """Maximize ``c . x`` subject to ``rows``.

    Each row is ``(a, rel, b)`` with ``rel`` one of ``"<="``, ``">="``,
    ``"="``.  ``nonneg[j]`` marks ``x_j >= 0``; other variables are free.
    """
    n = len(c)
    if nonneg is None:
        nonneg = [False] * n
    # column layout: x_j (or x_j^+, x_j^-), then slacks, then artificials
    colmap = []
    ncols = 0
    for j in range(n):
        if nonneg[j]:
            colmap.append((ncols, None))
            ncols += 1
        else:
            colmap.append((ncols, ncols + 1))
            ncols += 2
    nstruct = ncols
    nslack = sum(1 for _, rel, _ in rows if rel != EQ)
    nart = 0
    trows, rhs, basis, art_rows = [], [], [], []
    slack_at = nstruct
    for a, rel, b in rows:
        if len(a) != n:
            raise ValueError("row length does not match the number of variables")
        row = [ZERO] * (nstruct + nslack)
        for j, v in enumerate(a):
            if v:
                pos, neg = colmap[j]
                row[pos] = Fraction(v)
                if neg is not None:
                    row[neg] = -Fraction(v)
        b = Fraction(b)
        slack = None
        if rel == LE:
            row[slack_at] = ONE
            slack = slack_at
            slack_at += 1
        elif rel == GE:
            row[slack_at] = -ONE
            slack = slack_at
            slack_at += 1
        elif rel != EQ:
            raise ValueError(f"unknown relation {rel!r}")
        if b < 0:
            row = [-v for v in row]
            b = -b
        trows.append(row)
        rhs.append(b)
        if slack is not None and row[slack] == 1:
            basis.append(slack)
        else:
            basis.append(-1)
            art_rows.append(len(trows) - 1)
    nart = len(art_rows)
    total = nstruct + nslack + nart
    for row in trows:
        row.extend([ZERO] * nart)
    for k, i in enumerate(art_rows):
        col = nstruct + nslack + k
        trows[i][col] = ONE
        basis[i] = col
    tab = _Tableau(trows, rhs, basis, total)
    is_art = [j >= nstruct + nslack for j in range(total)]

    if nart:
        cost1 = [ZERO] * total
        for j in range(total):
            if is_art[j]:
                cost1[j] = -ONE
        tab.set_objective(cost1)
        tab.run([True] * total)
        infeas = sum((tab.rhs[i] for i, b in enumerate(tab.basis) if is_art[b]), ZERO)
        if infeas > 0:
            return LPResult("infeasible")
        # drive remaining (zero-level) artificials out of the basis
        i = 0
        while i < len(tab.rows):
            if is_art[tab.basis[i]]:
                row = tab.rows[i]
                j = next((k for k in range(total) if not is_art[k] and row[k]), -1)
                if j >= 0:
                    tab.pivot(i, j)
                    i += 1
                else:
                    del tab.rows[i]
                    del tab.rhs[i]
                    del tab.basis[i]
            else:
                i += 1

    cost2 = [ZERO] * total
    for j in range(n):
        pos, neg = colmap[j]
        cost2[pos] = Fraction(c[j])
        if neg is not None:
            cost2[neg] = -Fraction(c[j])
    tab.set_objective(cost2)
    allowed = [not a for a in is_art]
    unb = tab.run(allowed)

    def to_x(y):
        out = []
        for pos, neg in colmap:
            v = y[pos]
            if neg is not None:
                v = v - y[neg]
            out.append(v)
        return tuple(out)

    y = [ZERO] * total
    for i, b in enumerate(tab.basis):
        y[b] = tab.rhs[i]
    x = to_x(y)
    if unb is not None:
        d = [ZERO] * total
        d[unb] = ONE
        for i, b in enumerate(tab.basis):
            d[b] = -tab.rows[i][unb]
        return LPResult("unbounded", x=x, ray=to_x(d))
    value = sum((Fraction(ci) * xi for ci, xi in zip(c, x) if ci), ZERO)
    return LPResult("optimal", value=value, x=x)


def minimize(c, rows, nonneg=None) -> LPResult:
    res = maximize([-Fraction(v) for v in c], rows, nonneg)
    if res.status == "optimal":
        return LPResult("optimal", value=-res.value, x=res.x)
    return res


def feasible(rows, n, nonneg=None) -> Optional[tuple]:
    res = maximize([ZERO] * n, rows, nonneg)
    return res.x if res.optimal else None
