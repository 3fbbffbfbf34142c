"""Exact polyhedral geometry with strict-inequality rows.

Sets are described in one of three ways:

* :class:`FaceForm` -- rows ``a.x rel b`` with ``rel`` in ``<=``, ``<``, ``=``.
  A system without ``<`` rows is a closed polyhedron.
* :class:`GenForm` -- ``conv(points) + cone(rays) + span(lineality)``,
  always closed.
* :class:`LiftedSystem` -- rows over ``(x, u)`` denoting the set of ``x``
  for which some auxiliary ``u`` satisfies every row.  Minkowski sums and
  intersections stay in this form until an x-space description is needed.

Cones get their own wrapper, :class:`PolyCone`, which keeps whichever
representation it was built from and converts lazily.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

from . import dd, lp
from .rational import dot, primitive, q, unit, zeros

LE, LT, EQ = "<=", "<", "="
RELATIONS = (LE, LT, EQ)

ZERO = Fraction(0)
ONE = Fraction(1)


class InvalidInput(ValueError):
    """Malformed geometric input (dimension mismatch, bad relation, ...)."""


class EmptySetError(ValueError):
    """Raised by operations whose precondition is a nonempty set."""


def _row(a, rel, b):
    if rel not in RELATIONS:
        raise InvalidInput(f"unknown relation {rel!r}")
    return (tuple(q(v) for v in a), rel, q(b))


@dataclass(frozen=True)
class LiftedSystem:
    """``{x in R^dim : exists u in R^aux with every row holding on (x, u)}``."""

    dim: int
    rows: tuple
    aux: int = 0

    def __post_init__(self):
        rows = tuple(_row(*r) for r in self.rows)
        width = self.dim + self.aux
        for a, _, _ in rows:
            if len(a) != width:
                raise InvalidInput(
                    f"row of length {len(a)} in a system over {width} variables"
                )
        object.__setattr__(self, "rows", rows)

    @property
    def width(self) -> int:
        return self.dim + self.aux

    @property
    def is_closed(self) -> bool:
        return all(rel != LT for _, rel, _ in self.rows)

    def closure_rows(self) -> tuple:
        return tuple((a, LE if rel == LT else rel, b) for a, rel, b in self.rows)


@dataclass(frozen=True)
class FaceForm(LiftedSystem):
    """Constraint description of a (partially open) polyhedron in ``R^dim``."""

    def __post_init__(self):
        if self.aux:
            raise InvalidInput("a FaceForm has no auxiliary variables")
        super().__post_init__()


@dataclass(frozen=True)
class GenForm:
    """``conv(points) + cone(rays) + span(lineality)``; empty when no points."""

    dim: int
    points: tuple = ()
    rays: tuple = ()
    lineality: tuple = ()

    def __post_init__(self):
        for name in ("points", "rays", "lineality"):
            vs = tuple(tuple(q(v) for v in g) for g in getattr(self, name))
            for g in vs:
                if len(g) != self.dim:
                    raise InvalidInput(
                        f"generator of length {len(g)} in dimension {self.dim}"
                    )
            object.__setattr__(self, name, vs)

    @property
    def is_empty(self) -> bool:
        return not self.points


def full_space(dim: int) -> FaceForm:
    return FaceForm(dim, ())


def empty_set(dim: int) -> FaceForm:
    return FaceForm(dim, ((zeros(dim), LE, -1),))


def point_set(x) -> FaceForm:
    """``{x}`` as equality rows."""
    d = len(x)
    return FaceForm(d, tuple((unit(d, i), EQ, x[i]) for i in range(d)))


def closure(P: LiftedSystem) -> LiftedSystem:
    """Relax strict rows.  Denotes the closure only when ``P`` is nonempty."""
    if isinstance(P, FaceForm):
        return FaceForm(P.dim, P.closure_rows())
    return LiftedSystem(P.dim, P.closure_rows(), P.aux)


def as_lifted(P) -> LiftedSystem:
    if isinstance(P, GenForm):
        return to_faceform(P)
    if isinstance(P, PolyCone):
        return P.face_form()
    return P


# ---------------------------------------------------------------- conversions


def to_genform(P: FaceForm) -> GenForm:
    if P.aux:
        raise InvalidInput("project a lifted system before converting it")
    if not P.is_closed:
        raise InvalidInput("generator form requires a closed system")
    le_rows = [(a, b) for a, rel, b in P.rows if rel == LE]
    eq_rows = [(a, b) for a, rel, b in P.rows if rel == EQ]
    points, rays, lines = dd.h_to_v(P.dim, le_rows, eq_rows)
    return GenForm(P.dim, tuple(points), tuple(rays), tuple(lines))


def to_faceform(G: GenForm) -> FaceForm:
    le_rows, eq_rows = dd.v_to_h(G.dim, G.points, G.rays, G.lineality)
    rows = [(a, EQ, b) for a, b in eq_rows] + [(a, LE, b) for a, b in le_rows]
    return FaceForm(G.dim, tuple(rows))


def convert_representation(P):
    """FaceForm (closed) -> GenForm, GenForm -> FaceForm."""
    if isinstance(P, GenForm):
        return to_faceform(P)
    if isinstance(P, LiftedSystem):
        return to_genform(P)
    raise InvalidInput(f"cannot convert {type(P).__name__}")


# ---------------------------------------------------------------------- cones


@dataclass(frozen=True)
class PolyCone:
    """A polyhedral cone, kept in whichever form it was built from.

    Build with :meth:`from_generators` (rays, lineality) or
    :meth:`from_faces` (normals ``n.x <= 0``, equality normals ``n.x = 0``).
    """

    dim: int
    _gens: Optional[tuple] = field(default=None, repr=False)
    _faces: Optional[tuple] = field(default=None, repr=False)

    @classmethod
    def from_generators(cls, dim, rays=(), lineality=()):
        rays = tuple(tuple(q(v) for v in r) for r in rays)
        lin = tuple(tuple(q(v) for v in r) for r in lineality)
        for g in rays + lin:
            if len(g) != dim:
                raise InvalidInput("cone generator has the wrong length")
        return cls(dim, _gens=(rays, lin))

    @classmethod
    def from_faces(cls, dim, normals=(), eq_normals=()):
        normals = tuple(tuple(q(v) for v in r) for r in normals)
        eqn = tuple(tuple(q(v) for v in r) for r in eq_normals)
        for g in normals + eqn:
            if len(g) != dim:
                raise InvalidInput("cone normal has the wrong length")
        return cls(dim, _faces=(normals, eqn))

    @classmethod
    def full(cls, dim):
        return cls.from_generators(dim, (), [unit(dim, i) for i in range(dim)])

    @classmethod
    def zero(cls, dim):
        return cls.from_generators(dim, (), ())

    @classmethod
    def orthant(cls, dim):
        return cls.from_generators(dim, [unit(dim, i) for i in range(dim)])

    @cached_property
    def generators(self) -> tuple:
        """``(rays, lineality)``."""
        if self._gens is not None:
            return self._gens
        normals, eqn = self._faces
        rays, lines = dd.cone_generators(normals, eqn, self.dim)
        return tuple(rays), tuple(lines)

    @cached_property
    def faces(self) -> tuple:
        """``(normals, eq_normals)`` with the cone = ``{n.x <= 0, m.x = 0}``."""
        if self._faces is not None:
            return self._faces
        rays, lin = self._gens
        normals, lines = dd.cone_generators(rays, lin, self.dim)
        # generators of the polar are the normals of the cone
        return tuple(normals), tuple(lines)

    def face_form(self) -> FaceForm:
        normals, eqn = self.faces
        rows = [(n, EQ, 0) for n in eqn] + [(n, LE, 0) for n in normals]
        return FaceForm(self.dim, tuple(rows))

    def gen_form(self) -> GenForm:
        rays, lin = self.generators
        return GenForm(self.dim, (zeros(self.dim),), rays, lin)

    def contains(self, x) -> bool:
        if self._faces is not None:
            normals, eqn = self._faces
            return all(dot(n, x) <= 0 for n in normals) and all(
                dot(n, x) == 0 for n in eqn
            )
        return membership(x, _cone_lifted(self))

    def scaled(self, factors) -> "PolyCone":
        """Same cone with generator ``i`` multiplied by ``factors[i] > 0``."""
        rays, lin = self.generators
        rays = [tuple(f * v for v in r) for f, r in zip(factors, rays)]
        return PolyCone.from_generators(self.dim, rays, lin)

    def negated(self) -> "PolyCone":
        if self._gens is not None:
            rays, lin = self._gens
            return PolyCone.from_generators(
                self.dim, [tuple(-v for v in r) for r in rays], lin
            )
        normals, eqn = self._faces
        return PolyCone.from_faces(
            self.dim, [tuple(-v for v in n) for n in normals], eqn
        )

    def product(self, other: "PolyCone") -> "PolyCone":
        """``self x other`` in ``R^(dim + other.dim)``."""
        pad_r = zeros(other.dim)
        pad_l = zeros(self.dim)
        r1, l1 = self.generators
        r2, l2 = other.generators
        rays = [tuple(r) + pad_r for r in r1] + [pad_l + tuple(r) for r in r2]
        lin = [tuple(r) + pad_r for r in l1] + [pad_l + tuple(r) for r in l2]
        return PolyCone.from_generators(self.dim + other.dim, rays, lin)


def polar(C: PolyCone) -> PolyCone:
    """``{y : <x, y> <= 0 for all x in C}``: generators and normals swap roles."""
    if C._gens is not None:
        rays, lin = C._gens
        return PolyCone.from_faces(C.dim, rays, lin)
    normals, eqn = C._faces
    return PolyCone.from_generators(C.dim, normals, eqn)


def conjugate(C: PolyCone) -> PolyCone:
    """``C* = -C°``."""
    return polar(C).negated()


def _cone_lifted(C: PolyCone) -> LiftedSystem:
    """``C`` as a lifted system over generator weights (avoids conversion)."""
    rays, lin = C.generators
    k, m = len(rays), len(lin)
    d = C.dim
    rows = []
    for i in range(d):
        a = [ZERO] * (d + k + m)
        a[i] = ONE
        for j, r in enumerate(rays):
            a[d + j] = -r[i]
        for j, r in enumerate(lin):
            a[d + k + j] = -r[i]
        rows.append((tuple(a), EQ, ZERO))
    for j in range(k):
        a = [ZERO] * (d + k + m)
        a[d + j] = -ONE
        rows.append((tuple(a), LE, ZERO))
    return LiftedSystem(d, tuple(rows), k + m)


# -------------------------------------------------------------- LP primitives


def _lp_rows(rows):
    return [(a, LE if rel in (LE, LT) else EQ, b) for a, rel, b in rows]


def _strict_point(rows, width):
    """Max-epsilon witness over all variables, or None when empty."""
    lp_rows = []
    for a, rel, b in rows:
        if rel == LT:
            lp_rows.append((a + (ONE,), lp.LE, b))
        else:
            lp_rows.append((a + (ZERO,), LE if rel == LE else EQ, b))
    lp_rows.append((zeros(width) + (ONE,), lp.LE, ONE))
    c = zeros(width) + (ONE,)
    res = lp.maximize(c, lp_rows)
    if res.status != "optimal" or res.value <= 0:
        return None
    return res.x[:width]


def feasible_point(P: LiftedSystem) -> Optional[tuple]:
    """A point of ``P`` (x-part only), or None if ``P`` is empty.

    Solves ``max eps`` with every strict row relaxed to ``a.x + eps <= b``
    and ``eps <= 1``; the set is nonempty iff the optimum is positive.
    """
    P = as_lifted(P)
    v = _strict_point(P.rows, P.width)
    return None if v is None else v[: P.dim]


def feasible_full(P: LiftedSystem) -> Optional[tuple]:
    """Like :func:`feasible_point` but returns the auxiliary coordinates too."""
    return _strict_point(P.rows, P.width)


def is_empty(P) -> bool:
    return feasible_point(P) is None


@dataclass(frozen=True)
class OptResult:
    status: str  # "optimal" | "unbounded" | "infeasible"
    value: object = None  # Fraction, +/-math.inf, or None when infeasible
    attained: bool = False
    witness: Optional[tuple] = None


def optimize(c, P: LiftedSystem) -> OptResult:
    """``sup c.x`` over ``P``, computed on the closure, with an attainment flag."""
    P = as_lifted(P)
    c = tuple(q(v) for v in c)
    if len(c) != P.dim:
        raise InvalidInput("objective length does not match dimension")
    if feasible_point(P) is None:
        return OptResult("infeasible")
    full_c = c + zeros(P.aux)
    res = lp.maximize(full_c, _lp_rows(P.rows))
    if res.status == "unbounded":
        return OptResult("unbounded", math.inf, False)
    v = res.value
    face = LiftedSystem(P.dim, P.rows + ((full_c, EQ, v),), P.aux)
    w = feasible_point(face)
    return OptResult("optimal", v, w is not None, w)


def minimize(c, P: LiftedSystem) -> OptResult:
    res = optimize([-q(v) for v in c], P)
    if res.status == "optimal":
        return OptResult("optimal", -res.value, res.attained, res.witness)
    if res.status == "unbounded":
        return OptResult("unbounded", -math.inf, False)
    return res


def _holds(lhs, rel, b) -> bool:
    if rel == LE:
        return lhs <= b
    if rel == LT:
        return lhs < b
    return lhs == b


def membership(x, P, mode: str = "set") -> bool:
    """Is ``x`` in ``P`` (``mode="set"``) or in its relative interior?"""
    P = as_lifted(P)
    x = tuple(q(v) for v in x)
    if len(x) != P.dim:
        raise InvalidInput("point has the wrong dimension")
    if mode == "relative_interior":
        if is_empty(P):
            return False
        return membership(x, relative_interior(closed_projection(P)[0]))
    if mode != "set":
        raise InvalidInput(f"unknown membership mode {mode!r}")
    if not P.aux:
        return all(_holds(dot(a, x), rel, b) for a, rel, b in P.rows)
    rows = []
    for a, rel, b in P.rows:
        rows.append((a[P.dim :], rel, b - dot(a[: P.dim], x)))
    return _strict_point(tuple(rows), P.aux) is not None


# ------------------------------------------------------------ set operations


def relative_interior(P: FaceForm) -> FaceForm:
    """Mark implicit equalities as ``=`` and strictify every other ``<=`` row."""
    if not isinstance(P, FaceForm) and P.aux:
        raise InvalidInput("relative_interior needs an x-space system")
    if not P.is_closed:
        raise InvalidInput("relative_interior expects a closed system")
    lp_rows = _lp_rows(P.rows)
    if not lp.feasible(lp_rows, P.dim):
        raise EmptySetError("relative interior of an empty set")
    out = []
    for a, rel, b in P.rows:
        if rel == EQ:
            out.append((a, EQ, b))
            continue
        if not any(a):
            continue  # 0 <= b with b >= 0 on a nonempty set
        res = lp.minimize(a, lp_rows)
        implicit = res.status == "optimal" and res.value == b
        out.append((a, EQ if implicit else LT, b))
    return FaceForm(P.dim, tuple(out))


def conv_union(Ps: Sequence[GenForm]) -> GenForm:
    """Generator union; denotes ``cl conv`` of the union of the inputs."""
    if not Ps:
        raise InvalidInput("conv_union of an empty list")
    dim = Ps[0].dim
    points, rays, lin = [], [], []
    for P in Ps:
        if P.dim != dim:
            raise InvalidInput("conv_union inputs differ in dimension")
        if P.is_empty:
            continue
        for src, dst in ((P.points, points), (P.rays, rays), (P.lineality, lin)):
            for g in src:
                if g not in dst:
                    dst.append(g)
    if not points:
        return GenForm(dim)
    return GenForm(dim, tuple(points), tuple(rays), tuple(lin))


def minkowski_sum_cone(P, Q: PolyCone) -> LiftedSystem:
    """``{p + c : p in P, c in Q}`` keeping ``P``'s strictness exactly.

    ``x - sum(lam_i r_i) - sum(mu_j l_j)`` is substituted for ``p`` in each
    row of ``P``; the weights become auxiliary variables.
    """
    P = as_lifted(P)
    if P.dim != Q.dim:
        raise InvalidInput("minkowski_sum_cone dimension mismatch")
    rays, lin = Q.generators
    k, m = len(rays), len(lin)
    if k + m == 0:
        return LiftedSystem(P.dim, P.rows, P.aux)
    d = P.dim
    rows = []
    for a, rel, b in P.rows:
        ax = a[:d]
        extra = tuple(-dot(ax, r) for r in rays) + tuple(-dot(ax, r) for r in lin)
        rows.append((a + extra, rel, b))
    width = d + P.aux + k + m
    for j in range(k):
        a = [ZERO] * width
        a[d + P.aux + j] = -ONE
        rows.append((tuple(a), LE, ZERO))
    return LiftedSystem(d, tuple(rows), P.aux + k + m)


def intersect(P, Q) -> LiftedSystem:
    """Row concatenation over independent auxiliary blocks."""
    P, Q = as_lifted(P), as_lifted(Q)
    if P.dim != Q.dim:
        raise InvalidInput("intersect dimension mismatch")
    d = P.dim
    zp, zq = zeros(P.aux), zeros(Q.aux)
    rows = [(a[:d] + a[d:] + zq, rel, b) for a, rel, b in P.rows]
    rows += [(a[:d] + zp + a[d:], rel, b) for a, rel, b in Q.rows]
    if not P.aux and not Q.aux:
        return FaceForm(d, tuple(rows))
    return LiftedSystem(d, tuple(rows), P.aux + Q.aux)


def closed_projection(P: LiftedSystem):
    """``cl`` of the x-projection of a nonempty ``P`` as ``(FaceForm, GenForm)``.

    Goes through generators: close, convert in ``R^(dim+aux)``, drop the
    auxiliary coordinates, then re-derive irredundant rows and generators.
    """
    P = as_lifted(P)
    d = P.dim
    if P.aux == 0:
        F = FaceForm(d, P.closure_rows())
        G = to_genform(F)
        if G.is_empty:
            return empty_set(d), G
        return to_faceform(G), G
    big = to_genform(FaceForm(P.width, P.closure_rows()))
    if big.is_empty:
        return empty_set(d), GenForm(d)
    pts = []
    for p in big.points:
        p = p[:d]
        if p not in pts:
            pts.append(p)
    rays = []
    for r in big.rays:
        r = primitive(r[:d])
        if any(r) and r not in rays:
            rays.append(r)
    lin = []
    for r in big.lineality:
        r = primitive(r[:d])
        if any(r) and r not in lin:
            lin.append(r)
    F = to_faceform(GenForm(d, tuple(pts), tuple(rays), tuple(lin)))
    return F, to_genform(F)


def contains(outer: FaceForm, inner) -> bool:
    """Exact ``inner ⊆ outer`` for an x-space ``outer`` (strict rows allowed)."""
    inner = as_lifted(inner)
    if outer.dim != inner.dim:
        raise InvalidInput("contains dimension mismatch")
    if is_empty(inner):
        return True
    d = inner.dim
    pad = zeros(inner.aux)
    for a, rel, b in outer.rows:
        full_a = a + pad
        if rel == LT:
            probe = LiftedSystem(d, inner.rows + ((tuple(-v for v in full_a), LE, -b),), inner.aux)
            if not is_empty(probe):
                return False
            continue
        hi = optimize(a, inner)
        if hi.status == "unbounded" or hi.value > b:
            return False
        if rel == EQ:
            lo = minimize(a, inner)
            if lo.status == "unbounded" or lo.value < b:
                return False
    return True


def same_set(P: FaceForm, Q: FaceForm) -> bool:
    return contains(P, Q) and contains(Q, P)


def eliminate_aux(P: LiftedSystem) -> FaceForm:
    """Fourier-Motzkin projection onto x-space, strictness preserved exactly.

    Exponential in the worst case; meant for small systems and as an
    independent check on the generator route.
    """
    P = as_lifted(P)
    d = P.dim
    rows = [tuple(r) for r in P.rows]
    for col in range(P.width - 1, d - 1, -1):
        eq = next((r for r in rows if r[1] == EQ and r[0][col]), None)
        out = []
        if eq is not None:
            ea, _, eb = eq
            for r in rows:
                if r is eq:
                    continue
                a, rel, b = r
                f = a[col] / ea[col]
                if f:
                    a = tuple(x - f * y for x, y in zip(a, ea))
                    b = b - f * eb
                out.append((a, rel, b))
        else:
            pos = [r for r in rows if r[0][col] > 0]
            neg = [r for r in rows if r[0][col] < 0]
            out = [r for r in rows if not r[0][col]]
            for pa, prel, pb in pos:
                for na, nrel, nb in neg:
                    s, t = -na[col], pa[col]
                    a = tuple(s * x + t * y for x, y in zip(pa, na))
                    rel = LT if LT in (prel, nrel) else LE
                    out.append((a, rel, s * pb + t * nb))
        rows = _tidy(out)
    return FaceForm(d, tuple((a[:d], rel, b) for a, rel, b in rows))


def _tidy(rows):
    seen = []
    for a, rel, b in rows:
        if not any(a):
            if _holds(ZERO, rel, b):
                continue
            return [(a, LE, -ONE)]
        den = next(abs(v) for v in a if v)
        a = tuple(v / den for v in a)
        b = b / den
        if rel == EQ and a[next(i for i, v in enumerate(a) if v)] < 0:
            a, b = tuple(-v for v in a), -b
        r = (a, rel, b)
        if r not in seen:
            seen.append(r)
    return seen
