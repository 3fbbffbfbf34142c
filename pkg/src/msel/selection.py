"""Martingale selection on a scenario tree.

Given relatively open polyhedra ``V(n)`` and cones ``C(n)``, decide whether
there is an adapted selector ``xi(n) in V(n)`` and an equivalent measure
``Q`` under which every conditional increment lies in the polar ``C°(n)``.

``backward_recursion`` computes the closed sets ``W`` (``W = cl V`` at the
leaves, ``W = cl(V ∩ Y)`` above, ``Y = ri conv(children's W) + C*``);
the problem is solvable iff none is empty.  ``forward_select`` then builds
an explicit selector and measure, one node at a time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

from . import lp
from .polyhedra import (
    EQ,
    LE,
    LT,
    FaceForm,
    GenForm,
    LiftedSystem,
    PolyCone,
    closed_projection,
    closure,
    conv_union,
    feasible_full,
    feasible_point,
    intersect,
    membership,
    polar,
    relative_interior,
    same_set,
    to_faceform,
    to_genform,
)
from .rational import dot, zeros
from .tree import ScenarioTree, conditional_support, one_step_target


class KernelInconsistency(RuntimeError):
    """A step that must succeed on a nonempty ``W`` did not."""


@dataclass(frozen=True)
class SelectionProblem:
    tree: ScenarioTree
    V: Dict[int, FaceForm]
    C: Dict[int, PolyCone] = field(default_factory=dict)
    dim: int = 0

    def __post_init__(self):
        if not self.dim:
            object.__setattr__(self, "dim", next(iter(self.V.values())).dim)
        for n in range(len(self.tree)):
            if n not in self.V:
                raise ValueError(f"no V entry for node {self.tree.node_id(n)}")
            if self.V[n].dim != self.dim:
                raise ValueError(f"V at node {self.tree.node_id(n)} has wrong dimension")
        for n, cone in self.C.items():
            if cone.dim != self.dim:
                raise ValueError(f"C at node {self.tree.node_id(n)} has wrong dimension")

    def cone(self, n: int) -> PolyCone:
        c = self.C.get(n)
        return PolyCone.full(self.dim) if c is None else c

    def polar_rows(self, n: int):
        """``(normals, eq_normals)`` of ``C°(n)``."""
        c = self.C.get(n)
        if c is None:
            return (), tuple(
                tuple(Fraction(int(i == j)) for j in range(self.dim))
                for i in range(self.dim)
            )
        return polar(c).faces

    def nonopen_nodes(self) -> List[int]:
        """Nodes whose ``V`` is nonempty but not relatively open."""
        bad = []
        for n, V in self.V.items():
            if feasible_point(V) is None:
                continue
            closed = FaceForm(V.dim, closure(V).rows)
            if not same_set(relative_interior(closed), V):
                bad.append(n)
        return sorted(bad)


@dataclass
class Recursion:
    W: Dict[int, FaceForm]
    W_gen: Dict[int, GenForm]
    empty: List[int]  # every node with W empty
    targets: Dict[int, LiftedSystem]  # Y(n) for internal nodes

    @property
    def solvable(self) -> bool:
        return not self.empty

    @property
    def failing(self) -> List[int]:
        """Empty nodes whose children are all nonempty (where emptiness starts)."""
        return [n for n in self.empty if n not in self._propagated]

    _propagated: set = field(default_factory=set, repr=False)


@dataclass
class SelectionResult:
    status: str  # "solvable" | "unsolvable"
    W: Dict[int, FaceForm] = field(default_factory=dict)
    xi: Dict[int, tuple] = field(default_factory=dict)
    delta: Dict[int, Fraction] = field(default_factory=dict)
    z: Dict[int, Fraction] = field(default_factory=dict)
    Q: Dict[int, Fraction] = field(default_factory=dict)
    failing: List[int] = field(default_factory=list)
    recursion: Optional[Recursion] = None

    @property
    def solvable(self) -> bool:
        return self.status == "solvable"


def backward_recursion(prob: SelectionProblem) -> Recursion:
    tree = prob.tree
    W: Dict[int, FaceForm] = {}
    G: Dict[int, GenForm] = {}
    targets: Dict[int, LiftedSystem] = {}
    empty, propagated = [], set()
    for t in range(tree.horizon, -1, -1):
        for n in tree.at_depth(t):
            V = prob.V[n]
            if tree.is_leaf(n):
                if feasible_point(V) is None:
                    _mark_empty(n, W, G, prob.dim, empty)
                    continue
                gen = to_genform(FaceForm(V.dim, closure(V).rows))
                W[n], G[n] = to_faceform(gen), gen
                continue
            if conditional_support(tree, G, n) is None:
                _mark_empty(n, W, G, prob.dim, empty)
                propagated.add(n)
                continue
            Y = one_step_target(tree, n, G, prob.C)
            targets[n] = Y
            S = intersect(V, Y)
            if feasible_point(S) is None:
                _mark_empty(n, W, G, prob.dim, empty)
                continue
            W[n], G[n] = closed_projection(S)
    rec = Recursion(W, G, sorted(empty), targets)
    rec._propagated = propagated
    return rec


def _mark_empty(n, W, G, dim, empty):
    W[n] = FaceForm(dim, ((zeros(dim), LE, -1),))
    G[n] = GenForm(dim)
    empty.append(n)


def forward_select(prob: SelectionProblem, rec: Recursion) -> SelectionResult:
    """Selector, one-step densities and the equivalent measure from ``W``."""
    if not rec.solvable:
        raise ValueError("forward_select needs a solvable recursion")
    tree, d = prob.tree, prob.dim
    root = tree.root
    x0 = feasible_point(relative_interior(rec.W[root]))
    if x0 is None:
        raise KernelInconsistency("relative interior of W at the root is empty")
    xi = {root: x0}
    delta: Dict[int, Fraction] = {}
    z = {root: Fraction(1)}
    Q: Dict[int, Fraction] = {}
    for n in tree.internal():
        eta = _decompose(prob, rec, n, xi[n])
        kids = tree.children(n)
        for c, (point, weight) in zip(kids, _lift(prob, rec, n, eta)):
            xi[c] = point
            Q[c] = weight
            delta[c] = weight / tree.prob(c)
            z[c] = z[n] * delta[c]
    return SelectionResult(
        "solvable", dict(rec.W), xi, delta, z, Q, [], rec
    )


def _decompose(prob, rec, n, x):
    """``eta`` in ``ri conv K(n)`` with ``eta - x`` in ``C°(n)``."""
    tree, d = prob.tree, prob.dim
    hull = relative_interior(to_faceform(conv_union([rec.W_gen[c] for c in tree.children(n)])))
    rows = list(hull.rows)
    normals, eqn = prob.polar_rows(n)
    rows += [(a, EQ, dot(a, x)) for a in eqn]
    rows += [(a, LE, dot(a, x)) for a in normals]
    eta = feasible_point(FaceForm(d, tuple(rows)))
    if eta is None:
        raise KernelInconsistency(
            f"no decomposition of the selector at node {tree.node_id(n)}"
        )
    return eta


def _lift(prob, rec, n, eta):
    """Points ``z_c/w_c`` in ``ri W(c)`` with weights ``w_c > 0`` averaging to ``eta``."""
    tree, d = prob.tree, prob.dim
    kids = tree.children(n)
    k = len(kids)
    width = k * (d + 1)
    rows = []
    for j, c in enumerate(kids):
        off = j * (d + 1)
        for a, rel, b in relative_interior(rec.W[c]).rows:
            row = [Fraction(0)] * width
            row[off : off + d] = a
            row[off + d] = -b
            rows.append((tuple(row), rel, Fraction(0)))
        row = [Fraction(0)] * width
        row[off + d] = Fraction(-1)
        rows.append((tuple(row), LT, Fraction(0)))
    row = [Fraction(0)] * width
    for j in range(k):
        row[j * (d + 1) + d] = Fraction(1)
    rows.append((tuple(row), EQ, Fraction(1)))
    for i in range(d):
        row = [Fraction(0)] * width
        for j in range(k):
            row[j * (d + 1) + i] = Fraction(1)
        rows.append((tuple(row), EQ, eta[i]))
    sol = feasible_full(FaceForm(width, tuple(rows)))
    if sol is None:
        raise KernelInconsistency(
            f"no lifting of the barycentre at node {tree.node_id(n)}"
        )
    out = []
    for j in range(k):
        off = j * (d + 1)
        w = sol[off + d]
        out.append((tuple(v / w for v in sol[off : off + d]), w))
    return out


def solve(prob: SelectionProblem) -> SelectionResult:
    """Backward recursion, then the forward construction when solvable."""
    rec = backward_recursion(prob)
    if not rec.solvable:
        return SelectionResult(
            "unsolvable", dict(rec.W), failing=rec.failing, recursion=rec
        )
    return forward_select(prob, rec)


# ------------------------------------------------------------------ checking


@dataclass
class Report:
    failures: List[tuple] = field(default_factory=list)  # (node, check, message)

    @property
    def ok(self) -> bool:
        return not self.failures

    def add(self, node, check, message):
        self.failures.append((node, check, message))


def verify_selector(result: SelectionResult, prob: SelectionProblem, check_w: bool = True) -> Report:
    """Recheck a selector and measure against the problem definition.

    Checks (i) ``xi in V``, (ii) positive conditional weights summing to
    one, (iii) ``Q``-conditional increments in ``C°`` and, when ``check_w``
    and ``result.W`` are set, (iv) ``xi in W``.
    """
    tree = prob.tree
    rep = Report()
    for n in range(len(tree)):
        nid = tree.node_id(n)
        if n not in result.xi:
            rep.add(nid, "membership", "no selector value")
            continue
        if not membership(result.xi[n], prob.V[n]):
            rep.add(nid, "membership", "selector outside V")
        if check_w and result.W and n in result.W:
            if not membership(result.xi[n], result.W[n]):
                rep.add(nid, "W-membership", "selector outside W")
    for n in tree.internal():
        nid = tree.node_id(n)
        kids = tree.children(n)
        qs = [result.Q.get(c) for c in kids]
        if any(v is None or v <= 0 for v in qs):
            bad = [tree.node_id(c) for c, v in zip(kids, qs) if v is None or v <= 0]
            rep.add(nid, "equivalence", f"non-positive weight at {', '.join(bad)}")
            continue
        if sum(qs) != 1:
            rep.add(nid, "equivalence", f"weights sum to {sum(qs)}")
            continue
        if n not in result.xi or any(c not in result.xi for c in kids):
            continue
        drift = tuple(
            sum(qc * (result.xi[c][i] - result.xi[n][i]) for c, qc in zip(kids, qs))
            for i in range(prob.dim)
        )
        normals, eqn = prob.polar_rows(n)
        if any(dot(a, drift) != 0 for a in eqn) or any(dot(a, drift) > 0 for a in normals):
            rep.add(nid, "drift", "conditional increment outside the polar cone")
    return rep


def selector_for_measure(prob: SelectionProblem, Q: Dict[int, Fraction], objective=None):
    """A selector that works for the fixed conditional weights ``Q``, or None.

    With ``Q`` fixed the problem is a single strict linear system over all
    nodes; it does not use ``W``.  ``objective`` (one vector per node) steers
    the choice toward a different point of the feasible region.
    """
    tree, d = prob.tree, prob.dim
    N = len(tree)
    width = N * d
    rows = []

    def place(blocks):
        row = [Fraction(0)] * width
        for n, coef, a in blocks:
            for i, v in enumerate(a):
                if v:
                    row[n * d + i] += coef * v
        return tuple(row)

    for n in range(N):
        for a, rel, b in prob.V[n].rows:
            rows.append((place([(n, 1, a)]), rel, b))
    for n in tree.internal():
        kids = tree.children(n)
        normals, eqn = prob.polar_rows(n)
        for a, rel in [(a, EQ) for a in eqn] + [(a, LE) for a in normals]:
            blocks = [(c, Q[c], a) for c in kids] + [(n, -1, a)]
            rows.append((place(blocks), rel, Fraction(0)))
    P = FaceForm(width, tuple(rows))
    sol = feasible_full(P)
    if sol is None:
        return None
    if objective is not None:
        sol = _steer(P, sol, objective, width) or sol
    return {n: tuple(sol[n * d : (n + 1) * d]) for n in range(N)}


def _steer(P, start, objective, width):
    # slack that every strict row has at the max-epsilon point
    eps = min(
        (b - dot(a, start) for a, rel, b in P.rows if rel == LT),
        default=Fraction(1),
    )
    margin = eps / 2
    rows = []
    for a, rel, b in P.rows:
        if rel == LT:
            rows.append((a, lp.LE, b - margin))
        else:
            rows.append((a, lp.LE if rel == LE else lp.EQ, b))
    c = [Fraction(0)] * width
    for n, vec in objective.items():
        for i, v in enumerate(vec):
            c[n * len(vec) + i] = Fraction(v)
    # keep the program bounded
    for j in range(width):
        unit_row = [Fraction(0)] * width
        unit_row[j] = Fraction(1)
        rows.append((tuple(unit_row), lp.LE, start[j] + 1))
        rows.append((tuple(unit_row), lp.GE, start[j] - 1))
    res = lp.maximize(c, rows)
    return res.x if res.optimal else None
