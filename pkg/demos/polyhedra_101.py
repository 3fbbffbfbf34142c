"""
Exact polyhedra in a few lines
==============================

Face form, generator form, polars and relative interiors, all over the
rationals.
"""

from fractions import Fraction as F

from msel.formats import encode

from msel import FaceForm, PolyCone, closure, membership, polar, relative_interior, to_genform

# the unit square, written as four inequalities
square = FaceForm(2, [((1, 0), "<=", 1), ((-1, 0), "<=", 0), ((0, 1), "<=", 1), ((0, -1), "<=", 0)])
print("vertices:", encode(to_genform(square).points))

# strictening the rows gives the open square; the closure undoes it
open_square = relative_interior(square)
print("(0, 1/2) in square:", membership((0, F(1, 2)), square))
print("(0, 1/2) in its interior:", membership((0, F(1, 2)), open_square))
print("closure round trip:", closure(open_square).rows == square.rows)

# a segment has an empty interior but a nonempty relative interior
segment = FaceForm(2, [((0, 1), "=", 0), ((1, 0), "<=", 1), ((-1, 0), "<=", 0)])
print("midpoint in ri(segment):", membership((F(1, 2), 0), relative_interior(segment)))

# polar of the positive orthant is the negative orthant
orthant = PolyCone.orthant(2)
print("polar rays:", encode(polar(orthant).generators[0]))
