"""Currency markets with proportional transaction costs.

``Pi[n][i][j]`` is the number of units of currency ``i`` paid for one unit
of currency ``j`` at node ``n``.  The solvency cone ``K`` is generated by
the unit vectors and ``Pi[i][j] e_i - e_j``; a strictly consistent price
process is a P-martingale ``Z`` with ``Z(n)`` in ``ri K*(n)``.  Existence of
such a process is decided by martingale selection with ``V = ri K*``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Dict, Optional

from . import lp
from .polyhedra import (
    EQ,
    FaceForm,
    PolyCone,
    conjugate,
    feasible_full,
    feasible_point,
    membership,
    relative_interior,
)
from .rational import add, dot, q, sub, unit, zeros
from .selection import (
    KernelInconsistency,
    SelectionProblem,
    backward_recursion,
    forward_select,
)
from .tree import ScenarioTree


class BidAskError(ValueError):
    """Invalid bid-ask matrix."""


class SizeGuardError(ValueError):
    """Instance too large for a brute-force oracle."""


class CertificateError(RuntimeError):
    """Arbitrage certificate construction failed; carries the separator."""

    def __init__(self, message, separator=None, node=None):
        super().__init__(message)
        self.separator = separator
        self.node = node


def validate_bidask(matrix, where: str = "") -> tuple:
    """Check ``pi_ij > 0``, ``pi_ii = 1`` and ``pi_ij <= pi_ik pi_kj``."""
    Pi = tuple(tuple(q(v) for v in row) for row in matrix)
    d = len(Pi)
    at = f" at node {where}" if where else ""
    if any(len(row) != d for row in Pi):
        raise BidAskError(f"bid-ask matrix is not square{at}")
    for i in range(d):
        if Pi[i][i] != 1:
            raise BidAskError(f"diagonal entry ({i},{i}) is not 1{at}")
        for j in range(d):
            if Pi[i][j] <= 0:
                raise BidAskError(f"non-positive entry ({i},{j}){at}")
    for i in range(d):
        for j in range(d):
            for k in range(d):
                if Pi[i][j] > Pi[i][k] * Pi[k][j]:
                    raise BidAskError(
                        f"triangle inequality fails for (i,k,j)=({i},{k},{j}){at}"
                    )
    return Pi


@dataclass(frozen=True)
class SolvencyPair:
    K: PolyCone
    Kstar: PolyCone

    @cached_property
    def ri_Kstar(self) -> FaceForm:
        return relative_interior(self.Kstar.face_form())

    @cached_property
    def interior_point(self) -> tuple:
        """Sum of the extreme rays of ``K*`` (a point of its relative interior)."""
        rays, lin = self.Kstar.generators
        if lin:
            raise ValueError("K* is expected to be pointed")
        p = zeros(self.K.dim)
        for r in rays:
            p = add(p, r)
        return p


def solvency_cones(Pi) -> SolvencyPair:
    return _solvency_cones(validate_bidask(Pi))


@lru_cache(maxsize=4096)
def _solvency_cones(Pi: tuple) -> SolvencyPair:
    # SolvencyPair is immutable, so one instance per matrix can be shared
    d = len(Pi)
    gens = [unit(d, i) for i in range(d)]
    for i in range(d):
        for j in range(d):
            if i != j:
                gens.append(sub(tuple(Pi[i][j] * v for v in unit(d, i)), unit(d, j)))
    K = PolyCone.from_generators(d, gens)
    return SolvencyPair(K, conjugate(K))


class CurrencyMarket:
    """A scenario tree carrying a bid-ask matrix at every node."""

    def __init__(self, tree: ScenarioTree, Pi: Dict[int, tuple]):
        self.tree = tree
        self.Pi = {}
        for n in range(len(tree)):
            if n not in Pi:
                raise BidAskError(f"no bid-ask matrix at node {tree.node_id(n)}")
            self.Pi[n] = validate_bidask(Pi[n], tree.node_id(n))
        dims = {len(m) for m in self.Pi.values()}
        if len(dims) != 1:
            raise BidAskError("bid-ask matrices differ in size")
        self.dim = dims.pop()
        self._cones: Dict[int, SolvencyPair] = {}

    def cones(self, n: int) -> SolvencyPair:
        if n not in self._cones:
            self._cones[n] = _solvency_cones(self.Pi[n])
        return self._cones[n]

    def in_minus_K(self, n: int, x) -> bool:
        """Exact test of ``x in -K(n)`` on the generator weights."""
        rays, _ = self.cones(n).K.generators
        d = self.dim
        rows = [
            ([-r[i] for r in rays], lp.EQ, x[i]) for i in range(d)
        ]
        return lp.feasible(rows, len(rays), [True] * len(rays)) is not None


# ------------------------------------------------------------- NA^r checks


@dataclass
class NARResult:
    nar: bool
    W: dict
    failing: tuple = ()
    recursion: object = None


def _price_problem(market: CurrencyMarket) -> SelectionProblem:
    V = {n: market.cones(n).ri_Kstar for n in range(len(market.tree))}
    return SelectionProblem(market.tree, V, {}, market.dim)


def check_nar(market: CurrencyMarket) -> NARResult:
    rec = backward_recursion(_price_problem(market))
    return NARResult(rec.solvable, rec.W, tuple(rec.failing), rec)


@dataclass
class ConsistentPriceProcess:
    Z: Dict[int, tuple]
    xi: Dict[int, tuple] = field(default_factory=dict)
    z: Dict[int, Fraction] = field(default_factory=dict)


def verify_consistent(market: CurrencyMarket, Z: Dict[int, tuple]) -> list:
    """Failures of the martingale and ``ri K*`` checks (empty list = valid)."""
    tree = market.tree
    bad = []
    for n in range(len(tree)):
        if not membership(Z[n], market.cones(n).ri_Kstar):
            bad.append((tree.node_id(n), "ri K* membership"))
    for n in tree.internal():
        mean = zeros(market.dim)
        for c in tree.children(n):
            mean = add(mean, tuple(tree.prob(c) * v for v in Z[c]))
        if mean != tuple(Z[n]):
            bad.append((tree.node_id(n), "martingale"))
    return bad


def consistent_price_process(market: CurrencyMarket, nar: Optional[NARResult] = None) -> ConsistentPriceProcess:
    """``Z = z * xi`` from the forward construction, verified exactly."""
    nar = nar or check_nar(market)
    if not nar.nar:
        raise ValueError("no strictly consistent price process: NA^r fails")
    res = forward_select(_price_problem(market), nar.recursion)
    Z = {n: tuple(res.z[n] * v for v in res.xi[n]) for n in res.xi}
    bad = verify_consistent(market, Z)
    if bad:
        raise KernelInconsistency(f"constructed price process fails checks: {bad}")
    return ConsistentPriceProcess(Z, res.xi, res.z)


def consistent_price_process_lp(market: CurrencyMarket) -> Optional[Dict[int, tuple]]:
    """Direct search: one strict LP over all ``Z(n)``, no recursion involved."""
    tree, d = market.tree, market.dim
    N = len(tree)
    width = N * d
    rows = []
    for n in range(N):
        for a, rel, b in market.cones(n).ri_Kstar.rows:
            row = [Fraction(0)] * width
            row[n * d : (n + 1) * d] = a
            rows.append((tuple(row), rel, b))
    for n in tree.internal():
        for i in range(d):
            row = [Fraction(0)] * width
            row[n * d + i] = Fraction(-1)
            for c in tree.children(n):
                row[c * d + i] = tree.prob(c)
            rows.append((tuple(row), EQ, Fraction(0)))
    sol = feasible_full(FaceForm(width, tuple(rows)))
    if sol is None:
        return None
    return {n: tuple(sol[n * d : (n + 1) * d]) for n in range(N)}


def krs_condition_oracle(market: CurrencyMarket, size_guard=(2, 2, 2)) -> bool:
    """Decide: ``sum_t x_t = 0`` with ``x_t in -K_t`` forces ``x_t in K_t ∩ -K_t``.

    For every node, maximize ``-<x_n, y_n>`` with ``y_n`` in ``ri K*(n)``
    over pathwise-zero-sum families; a positive optimum exhibits an
    ``x_n`` outside the lineality space.  ``size_guard`` bounds
    ``(T, branching, d)``.
    """
    tree, d = market.tree, market.dim
    T_max, b_max, d_max = size_guard
    branching = max((len(tree.children(n)) for n in range(len(tree))), default=0)
    if tree.horizon > T_max or branching > b_max or d > d_max:
        raise SizeGuardError(
            f"instance exceeds the oracle size guard {size_guard}"
        )
    blocks, col = {}, 0
    for n in range(len(tree)):
        rays, _ = market.cones(n).K.generators
        blocks[n] = (col, rays)
        col += len(rays)
    width = col
    rows = []
    for leaf in tree.leaves():
        for i in range(d):
            row = [Fraction(0)] * width
            for n in tree.path(leaf):
                c0, rays = blocks[n]
                for k, r in enumerate(rays):
                    row[c0 + k] -= r[i]
            rows.append((row, lp.EQ, Fraction(0)))
    for n in range(len(tree)):
        y = market.cones(n).interior_point
        c0, rays = blocks[n]
        obj = [Fraction(0)] * width
        for k, r in enumerate(rays):
            obj[c0 + k] = dot(r, y)  # -<x_n, y> with x_n = -sum lam r
        res = lp.maximize(obj, rows + [(obj, lp.LE, Fraction(1))], [True] * width)
        if res.optimal and res.value > 0:
            return False
    return True


# --------------------------------------------------------------- arbitrage


@dataclass
class ArbitrageCertificate:
    node: int  # where the recursion first became empty
    separator: tuple
    x: Dict[int, tuple]  # increments, summing to zero along every path
    theta: Dict[int, tuple]
    eps: Dict[int, tuple]  # nonnegative surplus, carried at the leaves
    m: int  # a depth whose increment leaves the lineality space


def verify_arbitrage(market: CurrencyMarket, theta: Dict[int, tuple]) -> bool:
    """Self-financing, ``theta_T >= 0`` everywhere and ``!= 0`` somewhere."""
    tree, d = market.tree, market.dim
    for n in range(len(tree)):
        if n not in theta:
            return False
        parent = tree.parent(n)
        prev = zeros(d) if parent is None else theta[parent]
        if not market.in_minus_K(n, sub(theta[n], prev)):
            return False
    leaves = tree.leaves()
    if any(v < 0 for leaf in leaves for v in theta[leaf]):
        return False
    return any(v > 0 for leaf in leaves for v in theta[leaf])


def _separate(market, rec, n):
    """``x`` with ``<x, K*(n)> <= 0 <= <x, conv K(n)>``, not identically zero."""
    tree, d = market.tree, market.dim
    kstar_rays, _ = market.cones(n).Kstar.generators
    pts, rays, lin = [], [], []
    for c in tree.children(n):
        G = rec.W_gen[c]
        pts += G.points
        rays += G.rays
        lin += G.lineality
    rows, obj = [], [Fraction(0)] * d
    for k in kstar_rays:
        rows.append((k, lp.LE, Fraction(0)))
        obj = [o - v for o, v in zip(obj, k)]
    for w in list(pts) + list(rays):
        rows.append((w, lp.GE, Fraction(0)))
        obj = [o + v for o, v in zip(obj, w)]
    for w in lin:
        rows.append((w, lp.EQ, Fraction(0)))
    for i in range(d):
        rows.append((unit(d, i), lp.LE, Fraction(1)))
        rows.append((unit(d, i), lp.GE, Fraction(-1)))
    res = lp.maximize(obj, rows)
    if not res.optimal or res.value <= 0:
        return None
    return res.x


def _portfolio_lp(market, start, fixed):
    """Increments on nodes below ``start`` maximizing the terminal surplus.

    ``fixed`` pins the increment at ``start`` (None: free in ``-K``).
    Returns ``{node: increment}`` or None when no positive surplus exists.
    """
    tree, d = market.tree, market.dim
    nodes = [m for m in tree.subtree(start) if fixed is None or m != start]
    blocks, col = {}, 0
    for m in nodes:
        rays, _ = market.cones(m).K.generators
        blocks[m] = (col, rays)
        col += len(rays)
    width = col
    rows, obj = [], [Fraction(0)] * width
    for leaf in tree.subtree(start):
        if not tree.is_leaf(leaf):
            continue
        path = tree.path(leaf)
        path = path[path.index(start):]
        for i in range(d):
            row = [Fraction(0)] * width
            for m in path:
                if m in blocks:
                    c0, rays = blocks[m]
                    for k, r in enumerate(rays):
                        row[c0 + k] -= r[i]
            base = fixed[i] if fixed is not None else Fraction(0)
            rows.append((row, lp.GE, -base))
            rows.append((row, lp.LE, 1 - base))
            obj = [o + v for o, v in zip(obj, row)]
    res = lp.maximize(obj, rows, [True] * width)
    if not res.optimal or res.value + _fixed_total(tree, start, fixed) <= 0:
        return None
    inc = {}
    for m, (c0, rays) in blocks.items():
        v = zeros(d)
        for k, r in enumerate(rays):
            v = sub(v, tuple(res.x[c0 + k] * t for t in r))
        inc[m] = v
    if fixed is not None:
        inc[start] = tuple(fixed)
    return inc


def _fixed_total(tree, start, fixed):
    if fixed is None:
        return Fraction(0)
    nleaves = sum(1 for m in tree.subtree(start) if tree.is_leaf(m))
    return nleaves * sum(fixed)


def arbitrage_certificate(market: CurrencyMarket, nar: Optional[NARResult] = None) -> ArbitrageCertificate:
    """Best-effort arbitrage portfolio when NA^r fails, verified before return.

    Separates ``K*`` from the children's hull at the failing node, extends
    the separator through the subtree by an LP on ``-K`` increments, and
    falls back to the same LP from the root.  Raises
    :class:`CertificateError` when no verified portfolio is found.
    """
    nar = nar or check_nar(market)
    if nar.nar:
        raise ValueError("NA^r holds; there is no arbitrage to certify")
    tree, d = market.tree, market.dim
    n = nar.failing[0]
    sep = _separate(market, nar.recursion, n)
    attempts = []
    if sep is not None:
        attempts.append((n, sep))
    attempts.append((tree.root, None))
    for start, fixed in attempts:
        inc = _portfolio_lp(market, start, fixed)
        if inc is None:
            continue
        theta = {}
        for m in range(len(tree)):
            parent = tree.parent(m)
            prev = zeros(d) if parent is None else theta[parent]
            theta[m] = add(prev, inc.get(m, zeros(d)))
        if not verify_arbitrage(market, theta):
            continue
        x = {m: inc.get(m, zeros(d)) for m in range(len(tree))}
        eps = {}
        for leaf in tree.leaves():
            eps[leaf] = theta[leaf]
            x[leaf] = sub(x[leaf], theta[leaf])
        depth = next(
            (
                tree.depth(m)
                for m in range(len(tree))
                if dot(x[m], market.cones(m).interior_point) != 0
            ),
            tree.horizon,
        )
        return ArbitrageCertificate(n, sep, x, theta, eps, depth)
    raise CertificateError("certificate construction failed", sep, n)


# -------------------------------------------------------------- endowments


def _graph_rows(ri_rows, d, zeta):
    """Rows of ``ri K*`` lifted to ``(x, y)`` plus ``y = <zeta, x>`` when given."""
    rows = [(tuple(a) + (Fraction(0),), rel, b) for a, rel, b in ri_rows]
    if zeta is not None:
        rows.append((tuple(-v for v in zeta) + (Fraction(1),), EQ, Fraction(0)))
    return rows


def _endowment_problem(market, zeta0, zetaT):
    tree, d = market.tree, market.dim
    V = {}
    for n in range(len(tree)):
        ri_rows = market.cones(n).ri_Kstar.rows
        rows = []
        if n == tree.root and zeta0 is not None:
            rows += _graph_rows(ri_rows, d, zeta0)
        if tree.is_leaf(n):
            rows += _graph_rows(ri_rows if not rows else (), d, zetaT[n])
        if not rows:
            rows = _graph_rows(ri_rows, d, None)
        V[n] = FaceForm(d + 1, tuple(rows))
    return SelectionProblem(tree, V, {}, d + 1)


@dataclass
class EndowmentResult:
    ok: bool
    process: Optional[ConsistentPriceProcess] = None


def endowment_check(zeta0, zetaT: Dict[int, tuple], market: CurrencyMarket, check: bool = True) -> EndowmentResult:
    """Is there a strictly consistent ``Z`` with ``<zeta0, Z_0> = E <zeta_T, Z_T>``?"""
    if check and not check_nar(market).nar:
        raise ValueError("endowment check requires NA^r")
    tree, d = market.tree, market.dim
    zeta0 = tuple(q(v) for v in zeta0)
    zetaT = {n: tuple(q(v) for v in z) for n, z in zetaT.items()}
    prob = _endowment_problem(market, zeta0, zetaT)
    rec = backward_recursion(prob)
    if not rec.solvable:
        return EndowmentResult(False)
    res = forward_select(prob, rec)
    Z = {n: tuple(res.z[n] * v for v in res.xi[n][:d]) for n in res.xi}
    lhs = dot(zeta0, Z[tree.root])
    rhs = sum(
        (tree.path_prob(leaf) * dot(zetaT[leaf], Z[leaf]) for leaf in tree.leaves()),
        Fraction(0),
    )
    if lhs != rhs or verify_consistent(market, Z):
        raise KernelInconsistency("endowment price process fails its checks")
    return EndowmentResult(True, ConsistentPriceProcess(Z, res.xi, res.z))


ENDOWMENT_CAVEAT = (
    "ri W0 lives in R^(d+1) over pairs (price, claim value); an endowment "
    "zeta0 is admissible iff the graph {(x, <zeta0, x>) : x in ri K0*} meets it."
)


@dataclass
class EndowmentSet:
    ri_W0: FaceForm
    caveat: str = ENDOWMENT_CAVEAT

    def admits(self, zeta0) -> bool:
        """Does the graph of ``<zeta0, .>`` meet ``ri W0``?"""
        d = self.ri_W0.dim - 1
        zeta0 = tuple(q(v) for v in zeta0)
        row = (tuple(-v for v in zeta0) + (Fraction(1),), EQ, Fraction(0))
        return feasible_point(FaceForm(d + 1, self.ri_W0.rows + (row,))) is not None


def endowment_set_description(zetaT: Dict[int, tuple], market: CurrencyMarket, check: bool = True) -> EndowmentSet:
    if check and not check_nar(market).nar:
        raise ValueError("endowment set requires NA^r")
    zetaT = {n: tuple(q(v) for v in z) for n, z in zetaT.items()}
    prob = _endowment_problem(market, None, zetaT)
    rec = backward_recursion(prob)
    if not rec.solvable:
        raise KernelInconsistency("relaxed endowment problem is unsolvable under NA^r")
    return EndowmentSet(relative_interior(rec.W[market.tree.root]))
