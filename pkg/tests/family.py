"""The two-currency bid-ask family: T <= 2, branching <= 2, entries in {1, 3/2, 2}."""

import itertools
import random
from fractions import Fraction as F

from msel.kabanov import CurrencyMarket
from msel.tree import validate_tree

ENTRIES = (F(1), F(3, 2), F(2))
MATRICES = tuple(((F(1), a), (b, F(1))) for a in ENTRIES for b in ENTRIES)

# Adds 1/2; the triangle inequality then asks pi12 * pi21 >= 1.
WIDE = tuple(
    ((F(1), a), (b, F(1)))
    for a in (F(1, 2),) + ENTRIES
    for b in (F(1, 2),) + ENTRIES
    if a * b >= 1
)

# Balanced shapes up to swapping siblings, as parent lists (node 0 is the
# root).  "a;b,c" reads: root has a children, which have b and c children.
SHAPES = {
    "0": [None],
    "1": [None, 0],
    "2": [None, 0, 0],
    "1;1": [None, 0, 1],
    "1;2": [None, 0, 1, 1],
    "2;1,1": [None, 0, 0, 1, 2],
    "2;1,2": [None, 0, 0, 1, 2, 2],
    "2;2,2": [None, 0, 0, 1, 1, 2, 2],
}


EXHAUSTIVE = ("0", "1", "2", "1;1", "1;2")
SAMPLED = ("2;1,1", "2;1,2", "2;2,2")


def tree_of(parents):
    kids = {}
    for n, p in enumerate(parents):
        kids.setdefault(p, []).append(n)
    rows = []
    for n, p in enumerate(parents):
        prob = "1" if p is None else F(1, len(kids[p]))
        rows.append({"id": str(n), "parent": None if p is None else str(p), "prob": str(prob)})
    return validate_tree(rows)


def _sibling_classes(parents):
    """Groups of interchangeable leaf siblings (same parent, both leaves)."""
    inner = {p for p in parents if p is not None}
    groups = {}
    for n, p in enumerate(parents):
        if p is not None and n not in inner:
            groups.setdefault(p, []).append(n)
    return [g for g in groups.values() if len(g) == 2]


def canonical(parents, assignment):
    """Drop assignments that a swap of two leaf siblings maps to a smaller one."""
    for a, b in _sibling_classes(parents):
        if assignment[a] > assignment[b]:
            return False
    return True


def exhaustive(shape, matrices=MATRICES):
    parents = SHAPES[shape]
    tree = tree_of(parents)
    for assignment in itertools.product(range(len(matrices)), repeat=len(parents)):
        if canonical(parents, assignment):
            yield CurrencyMarket(tree, {n: matrices[k] for n, k in enumerate(assignment)})


def sampled(shape, count, seed):
    parents = SHAPES[shape]
    tree = tree_of(parents)
    rng = random.Random(f"{shape}:{seed}")
    for _ in range(count):
        assignment = [rng.randrange(len(MATRICES)) for _ in parents]
        yield CurrencyMarket(tree, {n: MATRICES[k] for n, k in enumerate(assignment)})
