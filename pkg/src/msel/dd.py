"""Double-description conversion for polyhedral cones.

``cone_generators`` turns ``{y : h.y <= 0 (h in ineqs), h.y = 0 (h in eqs)}``
into extreme rays plus a lineality basis.  Lines are consumed first when a
new constraint cuts them; otherwise rays are split with the combinatorial
adjacency test.  Point/ray conversions for general polyhedra homogenize
into this routine.
"""

from __future__ import annotations

from fractions import Fraction

from .rational import dot, primitive


def _combine(alpha, u, beta, v):
    return tuple(alpha * a + beta * b for a, b in zip(u, v))


def cone_generators(ineqs, eqs, dim):
    """Return ``(rays, lines)`` generating the cone cut out by the constraints.

    ``rays`` are primitive integer vectors in sorted order; ``lines`` is a
    basis of the lineality space.
    """
    lines = [tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)]
    rays = []  # list of (vector, tight-bitmask)
    constraints = [(tuple(Fraction(v) for v in h), True) for h in eqs]
    constraints += [(tuple(Fraction(v) for v in h), False) for h in ineqs]
    for idx, (h, is_eq) in enumerate(constraints):
        if len(h) != dim:
            raise ValueError("constraint length does not match dimension")
        bit = 1 << idx
        hit = next((k for k, line in enumerate(lines) if dot(h, line)), -1)
        if hit >= 0:
            pivot = lines.pop(hit)
            hp = dot(h, pivot)
            if hp > 0:
                pivot = tuple(-v for v in pivot)
                hp = -hp
            new_lines = []
            for line in lines:
                hl = dot(h, line)
                if hl:
                    line = primitive(_combine(Fraction(1), line, -hl / hp, pivot))
                new_lines.append(line)
            lines = new_lines
            new_rays = []
            for r, tight in rays:
                hr = dot(h, r)
                if hr:
                    r = primitive(_combine(Fraction(1), r, -hr / hp, pivot))
                new_rays.append((r, tight | bit))
            if not is_eq:
                # the pivot line is tight on every earlier constraint
                new_rays.append((primitive(pivot), bit - 1))
            rays = new_rays
            continue
        vals = [dot(h, r) for r, _ in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        keep = [(rays[k][0], rays[k][1] | bit) for k, v in enumerate(vals) if v == 0]
        if not is_eq:
            keep += [rays[k] for k in neg]
        for i in pos:
            ri, ti = rays[i]
            for j in neg:
                rj, tj = rays[j]
                common = ti & tj
                adjacent = True
                for k, (_, tk) in enumerate(rays):
                    if k != i and k != j and common & ~tk == 0:
                        adjacent = False
                        break
                if adjacent:
                    w = _combine(vals[i], rj, -vals[j], ri)
                    keep.append((primitive(w), common | bit))
        rays = keep
    out_rays = sorted({r for r, _ in rays if any(r)})
    out_lines = [primitive(line) for line in lines]
    return out_rays, out_lines


def h_to_v(dim, le_rows, eq_rows):
    """Generators of ``{x : a.x <= b (le_rows), a.x = b (eq_rows)}``.

    Rows are ``(a, b)`` pairs.  Returns ``(points, rays, lines)``; ``points``
    is empty exactly when the polyhedron is empty.
    """
    eqs = [tuple(a) + (-Fraction(b),) for a, b in eq_rows]
    ineqs = [(Fraction(0),) * dim + (Fraction(-1),)]
    ineqs += [tuple(a) + (-Fraction(b),) for a, b in le_rows]
    gens, lins = cone_generators(ineqs, eqs, dim + 1)
    points, rays = [], []
    for g in gens:
        t = g[-1]
        if t > 0:
            points.append(tuple(v / t for v in g[:-1]))
        else:
            rays.append(g[:-1])
    lines = [line[:-1] for line in lins]
    return points, rays, lines


def v_to_h(dim, points, rays, lines):
    """Irredundant ``(le_rows, eq_rows)`` for ``conv(points)+cone(rays)+span(lines)``.

    Computed by dualizing the homogenized generator cone.
    """
    if not points:
        return [((Fraction(0),) * dim, Fraction(-1))], []
    one = Fraction(1)
    zero = Fraction(0)
    ineqs = [tuple(p) + (one,) for p in points] + [tuple(r) + (zero,) for r in rays]
    eqs = [tuple(line) + (zero,) for line in lines]
    normals, lins = cone_generators(ineqs, eqs, dim + 1)
    le_rows, eq_rows = [], []
    for h in normals:
        a, beta = h[:-1], h[-1]
        if any(a):
            le_rows.append((a, -beta))
    for h in lins:
        a, beta = h[:-1], h[-1]
        if any(a):
            eq_rows.append((a, -beta))
    # a normal inside the span of the equality normals is constant on the
    # affine hull; such a row holds at every point and is redundant
    basis = _echelon([a for a, _ in eq_rows])
    le_rows = [r for r in le_rows if _reduce(r[0], basis) is not None]
    return le_rows, eq_rows


def _echelon(vecs):
    basis = []
    for v in vecs:
        r = _reduce(v, basis)
        if r is not None:
            basis.append(r)
    return basis


def _reduce(v, basis):
    """Remainder of ``v`` against an echelon ``basis`` (None when it vanishes)."""
    v = list(v)
    for b in basis:
        k = next(i for i, x in enumerate(b) if x)
        if v[k]:
            f = v[k] / b[k]
            v = [x - f * y for x, y in zip(v, b)]
    return tuple(v) if any(v) else None
