"""Finite scenario trees and the one-step operators built on them.

On a finite tree every atom of the time-t sigma-algebra is a node, and the
conditional law given a node charges exactly its children.  The conditional
support of a set-valued map is therefore the union of the children's sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Union

from .polyhedra import (
    FaceForm,
    GenForm,
    LiftedSystem,
    PolyCone,
    conjugate,
    conv_union,
    empty_set,
    minkowski_sum_cone,
    relative_interior,
    to_faceform,
)
from .rational import q

# node index -> set / vector; nodes are the depth-ordered indices of a tree
AdaptedSetMap = Dict[int, Union[FaceForm, GenForm, LiftedSystem]]
AdaptedVector = Dict[int, tuple]


class TreeError(ValueError):
    """Invalid tree description; the message names the offending node."""


@dataclass(frozen=True)
class Node:
    index: int
    id: str
    parent: Optional[int]
    depth: int
    prob: Fraction  # conditional probability given the parent


class ScenarioTree:
    """An explicit event tree with positive conditional probabilities.

    Nodes are stored breadth-first (children in input order), so
    ``nodes[0]`` is the root and depths are nondecreasing along the list.
    """

    def __init__(self, nodes: List[Node]):
        self.nodes = tuple(nodes)
        kids: List[List[int]] = [[] for _ in nodes]
        for nd in nodes:
            if nd.parent is not None:
                kids[nd.parent].append(nd.index)
        self._children = tuple(tuple(k) for k in kids)
        self.horizon = max(nd.depth for nd in nodes)
        self._by_id = {nd.id: nd.index for nd in nodes}

    def __len__(self):
        return len(self.nodes)

    def __repr__(self):
        return f"ScenarioTree(nodes={len(self.nodes)}, T={self.horizon})"

    @property
    def root(self) -> int:
        return 0

    def index(self, node_id: str) -> int:
        return self._by_id[node_id]

    def node_id(self, n: int) -> str:
        return self.nodes[n].id

    def children(self, n: int) -> tuple:
        return self._children[n]

    def parent(self, n: int) -> Optional[int]:
        return self.nodes[n].parent

    def depth(self, n: int) -> int:
        return self.nodes[n].depth

    def prob(self, n: int) -> Fraction:
        return self.nodes[n].prob

    def is_leaf(self, n: int) -> bool:
        return not self._children[n]

    def at_depth(self, t: int) -> List[int]:
        return [nd.index for nd in self.nodes if nd.depth == t]

    def leaves(self) -> List[int]:
        return [nd.index for nd in self.nodes if not self._children[nd.index]]

    def internal(self) -> List[int]:
        return [nd.index for nd in self.nodes if self._children[nd.index]]

    def path(self, n: int) -> List[int]:
        """Nodes from the root down to ``n`` inclusive."""
        out = []
        while n is not None:
            out.append(n)
            n = self.nodes[n].parent
        return out[::-1]

    def path_prob(self, n: int) -> Fraction:
        p = Fraction(1)
        for m in self.path(n)[1:]:
            p *= self.nodes[m].prob
        return p

    def subtree(self, n: int) -> List[int]:
        out, stack = [], [n]
        while stack:
            m = stack.pop()
            out.append(m)
            stack.extend(reversed(self._children[m]))
        return sorted(out)

    def to_raw(self) -> list:
        return [
            {
                "id": nd.id,
                "parent": None if nd.parent is None else self.nodes[nd.parent].id,
                "prob": nd.prob,
            }
            for nd in self.nodes
        ]


def validate_tree(raw: Iterable) -> ScenarioTree:
    """Build a :class:`ScenarioTree` from ``{"id", "parent", "prob"}`` records.

    Checks a single root, known parents, positive probabilities summing to
    one under every internal node and all leaves at the same depth.
    """
    recs = []
    for r in raw:
        if isinstance(r, dict):
            nid, parent, prob = r.get("id"), r.get("parent"), r.get("prob", 1)
        else:
            nid, parent, prob = r
        if nid is None:
            raise TreeError("node without an id")
        recs.append((str(nid), None if parent is None else str(parent), prob))
    if not recs:
        raise TreeError("empty tree")
    ids = [r[0] for r in recs]
    seen = set()
    for nid in ids:
        if nid in seen:
            raise TreeError(f"duplicate node id {nid!r}")
        seen.add(nid)
    roots = [r for r in recs if r[1] is None]
    if len(roots) != 1:
        raise TreeError(f"expected exactly one root, found {len(roots)}")
    kids: Dict[str, list] = {nid: [] for nid in ids}
    probs = {}
    for nid, parent, prob in recs:
        try:
            p = q(prob)
        except (TypeError, ValueError) as exc:
            raise TreeError(f"bad probability at node {nid}: {exc}") from None
        probs[nid] = p
        if parent is None:
            continue
        if parent not in kids:
            raise TreeError(f"orphan node {nid}: unknown parent {parent!r}")
        if p == 0:
            raise TreeError(f"zero-probability node {nid}")
        if p < 0:
            raise TreeError(f"negative probability at node {nid}")
        kids[parent].append(nid)
    root_id = roots[0][0]
    nodes: List[Node] = []
    index = {}
    queue = [(root_id, None, 0)]
    while queue:
        nid, parent, depth = queue.pop(0)
        index[nid] = len(nodes)
        prob = Fraction(1) if parent is None else probs[nid]
        nodes.append(Node(len(nodes), nid, parent, depth, prob))
        for c in kids[nid]:
            queue.append((c, index[nid], depth + 1))
    if len(nodes) != len(recs):
        missing = [nid for nid in ids if nid not in index]
        raise TreeError(f"orphan node {missing[0]}: not reachable from the root")
    for nid, cs in kids.items():
        if cs:
            total = sum((probs[c] for c in cs), Fraction(0))
            if total != 1:
                raise TreeError(f"probabilities sum {total} != 1 at node {nid}")
    horizon = max(nd.depth for nd in nodes)
    for nd in nodes:
        if not kids[nd.id] and nd.depth != horizon:
            raise TreeError(
                f"leaf {nd.id} at depth {nd.depth}, expected horizon {horizon}"
            )
    return ScenarioTree(nodes)


def conditional_support(tree: ScenarioTree, W: Dict[int, GenForm], n: int):
    """The children's sets at ``n``, or None when the support is empty.

    A single empty child empties the whole support (it has positive
    conditional probability).
    """
    out = []
    for c in tree.children(n):
        if c not in W:
            raise KeyError(f"no set recorded for child {tree.node_id(c)}")
        G = W[c]
        if G.is_empty:
            return None
        out.append(G)
    if not out:
        raise ValueError(f"node {tree.node_id(n)} has no children")
    return out


def one_step_target(
    tree: ScenarioTree,
    n: int,
    W: Dict[int, GenForm],
    C: Optional[Dict[int, PolyCone]] = None,
) -> LiftedSystem:
    """``ri conv K(W_next)(n) + C*(n)``, strict rows kept exact.

    Returns an empty system when the conditional support is empty.
    """
    support = conditional_support(tree, W, n)
    dim = next(iter(W.values())).dim
    if support is None:
        return empty_set(dim)
    hull = to_faceform(conv_union(support))
    target = relative_interior(hull)
    cone = None if C is None else C.get(n)
    if cone is None:
        return target
    return minkowski_sum_cone(target, conjugate(cone))
