"""Price bounds in a frictionless market with cone portfolio constraints.

Discounted prices ``S`` live on the tree nodes and the position held at a
node must lie in the cone ``B(n)``.  The upper/lower arbitrage-free prices
of a claim come from a one-step recursion over ``(S, price)`` points; a
single whole-tree hedging LP (:func:`superhedge_oracle`) gives the same
numbers by an independent route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional

from . import lp
from .polyhedra import (
    EQ,
    FaceForm,
    GenForm,
    PolyCone,
    conjugate,
    conv_union,
    intersect,
    minkowski_sum_cone,
    optimize,
    point_set,
    relative_interior,
    to_faceform,
    minimize,
)
from .rational import dot, sub, unit, zeros
from .selection import SelectionProblem, backward_recursion
from .tree import ScenarioTree


class ArbitrageError(ValueError):
    """Raised when an operation needs the no-arbitrage condition."""


@dataclass(frozen=True)
class ConstrainedMarket:
    tree: ScenarioTree
    S: Dict[int, tuple]
    f: Dict[int, Fraction]
    B: Dict[int, PolyCone] = field(default_factory=dict)

    def __post_init__(self):
        d = self.dim
        for n in range(len(self.tree)):
            if n not in self.S or len(self.S[n]) != d:
                raise ValueError(f"bad price vector at node {self.tree.node_id(n)}")
        for n in self.tree.leaves():
            if n not in self.f:
                raise ValueError(f"no payoff at leaf {self.tree.node_id(n)}")
        for n, cone in self.B.items():
            if cone.dim != d:
                raise ValueError(f"constraint cone at {self.tree.node_id(n)} has wrong dimension")

    @property
    def dim(self) -> int:
        return len(self.S[0])

    def cone(self, n: int) -> PolyCone:
        c = self.B.get(n)
        return PolyCone.full(self.dim) if c is None else c


@dataclass(frozen=True)
class PriceInterval:
    lower: object  # Fraction or -math.inf
    upper: object  # Fraction or math.inf
    lower_attained: bool
    upper_attained: bool

    def __str__(self):
        lo = "[" if self.lower_attained else "("
        hi = "]" if self.upper_attained else ")"
        return f"{lo}{self.lower}, {self.upper}{hi}"


@dataclass(frozen=True)
class HedgeCertificate:
    x: Fraction
    gamma: Dict[int, tuple]
    side: str  # "super" | "sub"


@dataclass(frozen=True)
class OracleResult:
    value: object  # Fraction or +/-math.inf
    cert: Optional[HedgeCertificate] = None
    ray: Optional[Dict[int, tuple]] = None  # recession direction when unbounded


@dataclass(frozen=True)
class NAResult:
    arbitrage_free: bool
    failing: tuple = ()


# ------------------------------------------------------------ no-arbitrage


def check_na(m: ConstrainedMarket) -> NAResult:
    """NA holds iff ``V(n) = {S(n)}`` has a ``B``-martingale selector."""
    V = {n: point_set(m.S[n]) for n in range(len(m.tree))}
    rec = backward_recursion(SelectionProblem(m.tree, V, dict(m.B), m.dim))
    return NAResult(rec.solvable, tuple(rec.failing))


class _Strategy:
    """Variable layout for ``gamma(n) = sum lam r + sum mu l`` on internal nodes."""

    def __init__(self, m: ConstrainedMarket, offset: int = 0):
        self.m = m
        self.blocks = {}
        col = offset
        nonneg = []
        for n in m.tree.internal():
            rays, lin = m.cone(n).generators
            self.blocks[n] = (col, rays, lin)
            col += len(rays) + len(lin)
            nonneg += [True] * len(rays) + [False] * len(lin)
        self.width = col - offset
        self.offset = offset
        self.nonneg = nonneg

    def gain_row(self, leaf: int, total: int) -> list:
        """Coefficients of the terminal gain at ``leaf`` over all variables."""
        row = [Fraction(0)] * total
        path = self.m.tree.path(leaf)
        S = self.m.S
        for n, nxt in zip(path, path[1:]):
            col, rays, lin = self.blocks[n]
            dS = sub(S[nxt], S[n])
            for g in tuple(rays) + tuple(lin):
                row[col] = dot(g, dS)
                col += 1
        return row

    def gammas(self, x) -> Dict[int, tuple]:
        out = {}
        d = self.m.dim
        for n, (col, rays, lin) in self.blocks.items():
            g = zeros(d)
            for r in tuple(rays) + tuple(lin):
                w = x[col]
                g = tuple(a + w * b for a, b in zip(g, r))
                col += 1
            out[n] = g
        return out


def arbitrage_lp(m: ConstrainedMarket) -> Optional[Dict[int, tuple]]:
    """An admissible strategy with ``G >= 0`` at every leaf and ``sum G >= 1``."""
    st = _Strategy(m)
    total = st.width
    rows = []
    agg = [Fraction(0)] * total
    for leaf in m.tree.leaves():
        row = st.gain_row(leaf, total)
        rows.append((row, lp.GE, Fraction(0)))
        agg = [a + b for a, b in zip(agg, row)]
    rows.append((agg, lp.GE, Fraction(1)))
    x = lp.feasible(rows, total, st.nonneg)
    return None if x is None else st.gammas(x)


def gains(m: ConstrainedMarket, gamma: Dict[int, tuple]) -> Dict[int, Fraction]:
    out = {}
    for leaf in m.tree.leaves():
        path = m.tree.path(leaf)
        out[leaf] = sum(
            (dot(gamma[n], sub(m.S[nxt], m.S[n])) for n, nxt in zip(path, path[1:])),
            Fraction(0),
        )
    return out


# ------------------------------------------------------------------ bounds


def market_extension(m: ConstrainedMarket) -> SelectionProblem:
    """``(S, f)`` in ``R^(d+1)`` with constraints ``B x R``.

    ``V = {S} x R`` before maturity and ``{(S, f)}`` at the leaves.
    """
    d = m.dim
    tree = m.tree
    V = {}
    for n in range(len(tree)):
        if tree.is_leaf(n):
            V[n] = point_set(tuple(m.S[n]) + (m.f[n],))
        else:
            rows = [(unit(d + 1, i), EQ, m.S[n][i]) for i in range(d)]
            V[n] = FaceForm(d + 1, tuple(rows))
    C = {n: m.cone(n).product(PolyCone.full(1)) for n in tree.internal()}
    return SelectionProblem(tree, V, C, d + 1)


def price_bounds(m: ConstrainedMarket, check: bool = True) -> Dict[int, PriceInterval]:
    """Per-node ``[lower, upper]`` with attainment flags.

    Each endpoint is the extremum, over the closure, of the claim coordinate
    on ``{S(n)} x R ∩ (ri conv(children's points) + B*(n) x {0})``.
    """
    if check:
        na = check_na(m)
        if not na.arbitrage_free:
            ids = ", ".join(m.tree.node_id(n) for n in na.failing)
            raise ArbitrageError(f"market admits arbitrage (failing node {ids})")
    tree, d = m.tree, m.dim
    upper: Dict[int, tuple] = {}
    lower: Dict[int, tuple] = {}
    for leaf in tree.leaves():
        upper[leaf] = (m.f[leaf], True)
        lower[leaf] = (m.f[leaf], True)
    for n in reversed(tree.internal()):
        slice_ = FaceForm(d + 1, tuple((unit(d + 1, i), EQ, m.S[n][i]) for i in range(d)))
        cone = conjugate(m.cone(n).product(PolyCone.full(1)))
        e_y = unit(d + 1, d)
        for table, sense in ((upper, 1), (lower, -1)):
            gens = []
            for c in tree.children(n):
                v = table[c][0]
                if isinstance(v, float):  # infinite child bound
                    base = tuple(m.S[c]) + (Fraction(0),)
                    ray = tuple(sense * x for x in e_y)
                    gens.append(GenForm(d + 1, (base,), (ray,)))
                else:
                    gens.append(GenForm(d + 1, (tuple(m.S[c]) + (v,),)))
            target = minkowski_sum_cone(relative_interior(to_faceform(conv_union(gens))), cone)
            region = intersect(slice_, target)
            res = optimize(e_y, region) if sense > 0 else minimize(e_y, region)
            if res.status == "infeasible":
                raise RuntimeError(
                    f"no arbitrage-free extension at node {tree.node_id(n)}"
                )
            table[n] = (res.value, res.attained)
    return {
        n: PriceInterval(lower[n][0], upper[n][0], lower[n][1], upper[n][1])
        for n in range(len(tree))
    }


def superhedge_oracle(m: ConstrainedMarket, side: str = "super") -> OracleResult:
    """Whole-tree hedging LP.

    ``super``: minimize ``x`` with ``x + G >= f`` at every leaf.
    ``sub``: maximize ``x`` with ``x - G <= f`` at every leaf.
    """
    if side not in ("super", "sub"):
        raise ValueError(f"unknown side {side!r}")
    st = _Strategy(m, offset=1)
    total = 1 + st.width
    rows = []
    for leaf in m.tree.leaves():
        g = st.gain_row(leaf, total)
        g[0] = Fraction(1)
        if side == "super":
            rows.append((g, lp.GE, m.f[leaf]))
        else:
            g = [Fraction(1)] + [-v for v in g[1:]]
            rows.append((g, lp.LE, m.f[leaf]))
    c = [Fraction(0)] * total
    c[0] = Fraction(-1) if side == "super" else Fraction(1)
    res = lp.maximize(c, rows, [False] + st.nonneg)
    if res.status == "unbounded":
        value = -math.inf if side == "super" else math.inf
        return OracleResult(value, ray=st.gammas(res.ray))
    if res.status != "optimal":
        raise RuntimeError("hedging LP infeasible")
    x = res.x[0]
    return OracleResult(x, HedgeCertificate(x, st.gammas(res.x), side))


def verify_hedge(m: ConstrainedMarket, cert: HedgeCertificate) -> bool:
    """Replay the certificate pathwise with exact arithmetic."""
    for n, g in cert.gamma.items():
        if not m.cone(n).contains(g):
            return False
    G = gains(m, cert.gamma)
    if cert.side == "super":
        return all(cert.x + G[leaf] >= m.f[leaf] for leaf in G)
    return all(cert.x - G[leaf] <= m.f[leaf] for leaf in G)
