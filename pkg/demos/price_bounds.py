"""
Price bounds under portfolio constraints
========================================

One stock, one step, a put paying 1/2 in the down state.  Long-only trading
narrows the no-arbitrage interval.  The superhedging LP confirms the upper
endpoint independently.
"""

from fractions import Fraction as F

from msel import ConstrainedMarket, PolyCone, check_na, price_bounds, superhedge_oracle, validate_tree

tree = validate_tree(
    [
        {"id": "0", "parent": None},
        {"id": "u", "parent": "0", "prob": "1/2"},
        {"id": "d", "parent": "0", "prob": "1/2"},
    ]
)
S = {0: (F(1),), 1: (F(2),), 2: (F(1, 2),)}
put = {1: F(0), 2: F(1, 2)}

free = ConstrainedMarket(tree, S, put)
long_only = ConstrainedMarket(tree, S, put, {0: PolyCone.orthant(1)})

print("NA holds:", check_na(long_only).arbitrage_free)
print("unconstrained:", price_bounds(free)[0])
print("long only:    ", price_bounds(long_only)[0])

sup = superhedge_oracle(long_only, "super")
print("superhedge LP value:", sup.value, "with position", sup.cert.gamma[0][0])
