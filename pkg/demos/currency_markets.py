"""
Two currencies with transaction costs
=====================================

A bid-ask matrix per node gives the exchange rates.  Robust no-arbitrage
holds exactly when a strictly consistent price process exists.
"""

from fractions import Fraction as F

from msel.formats import encode

from msel import (
    CurrencyMarket,
    arbitrage_certificate,
    check_nar,
    consistent_price_process,
    endowment_check,
    validate_tree,
    verify_arbitrage,
)

tree = validate_tree(
    [
        {"id": "0", "parent": None},
        {"id": "a", "parent": "0", "prob": "1/2"},
        {"id": "b", "parent": "0", "prob": "1/2"},
    ]
)

# a constant spread: two units of either currency buy one of the other
spread = ((F(1), F(2)), (F(2), F(1)))
calm = CurrencyMarket(tree, {n: spread for n in range(3)})
print("NA^r:", check_nar(calm).nar)
print("consistent prices:", encode(consistent_price_process(calm).Z))

# which initial holdings replicate one unit of currency 1 at maturity?
claim = {1: (1, 0), 2: (1, 0)}
for zeta0 in [(1, 0), (0, 0), (F(1, 2), F(1, 2))]:
    print("endowment", encode(zeta0), "->", endowment_check(zeta0, claim, calm).ok)

# frictionless, rate 1 today and 2 tomorrow in every state
today = ((F(1), F(1)), (F(1), F(1)))
tomorrow = ((F(1), F(2)), (F(1, 2), F(1)))
jump = CurrencyMarket(tree, {0: today, 1: tomorrow, 2: tomorrow})
nar = check_nar(jump)
print("NA^r:", nar.nar)
cert = arbitrage_certificate(jump, nar)
print("theta:", encode(cert.theta))
print("certificate verified:", verify_arbitrage(jump, cert.theta))
