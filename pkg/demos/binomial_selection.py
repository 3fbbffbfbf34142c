"""
A martingale selector on a one-step tree
========================================

The root may sit anywhere on the line x1 = 1.  Each child is pinned to a
single point.  The backward pass finds the admissible root points and the
forward pass picks one together with the measure that makes it a martingale.
"""

from fractions import Fraction as F

from msel.formats import encode

from msel import FaceForm, SelectionProblem, backward_recursion, point_set, solve, validate_tree, verify_selector

tree = validate_tree(
    [
        {"id": "r", "parent": None},
        {"id": "up", "parent": "r", "prob": "1/2"},
        {"id": "down", "parent": "r", "prob": "1/2"},
    ]
)
V = {
    0: FaceForm(2, [((1, 0), "=", 1)]),
    1: point_set((2, 1)),
    2: point_set((F(1, 2), 0)),
}
prob = SelectionProblem(tree, V, {}, 2)

# W at the root shrinks to one point
rec = backward_recursion(prob)
print("W(root):", encode(rec.W[0].rows))

res = solve(prob)
print("xi:", encode(res.xi))
print("Q:", encode(res.Q))
print("density z:", encode(res.z))
print("verified:", verify_selector(res, prob).ok)

# push the down state to the same price as the root: no measure works any more
V[2] = point_set((3, 0))
print("after the move:", solve(SelectionProblem(tree, V, {}, 2)).status)
