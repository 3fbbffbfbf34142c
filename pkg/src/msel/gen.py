"""Seeded random instances for fuzzing and the acceptance suite.

Every generator is a pure function of ``seed``: the same seed always yields
the same instance dictionary (and hence the same bytes once dumped).
"""

from __future__ import annotations

import random
from fractions import Fraction

from .polyhedra import GenForm, relative_interior, to_faceform
from .rational import fmt
from .formats import FORMAT_VERSION, encode_row

PROFILES = ("selection", "market", "bidask")
CAP = 16  # bound on numerators/denominators of drawn entries


def _frac(rng, lo, hi, dens=(1, 2, 3, 4)):
    den = rng.choice(dens)
    return Fraction(rng.randint(lo * den, hi * den), den)


def _tree(rng, t_max, b_max, t_min=1):
    """Random tree: horizon in [t_min, t_max], per-node branching in [1, b_max]."""
    T = rng.randint(t_min, t_max)
    nodes = [{"id": "0", "parent": None, "prob": "1"}]
    frontier = ["0"]
    for _ in range(T):
        nxt = []
        for pid in frontier:
            k = rng.randint(1, b_max)
            w = [rng.randint(1, 4) for _ in range(k)]
            for j in range(k):
                cid = f"{pid}.{j}"
                nodes.append({"id": cid, "parent": pid, "prob": fmt(Fraction(w[j], sum(w)))})
                nxt.append(cid)
        frontier = nxt
    return nodes


def _children(nodes):
    kids = {n["id"]: [] for n in nodes}
    for n in nodes:
        if n["parent"] is not None:
            kids[n["parent"]].append(n["id"])
    return kids


def _cone(rng, d):
    r = rng.random()
    if r < 0.4:
        return "full"
    if r < 0.6:
        return "orthant"
    if r < 0.7:
        return "zero"
    rays = []
    for _ in range(rng.randint(1, 3)):
        v = [rng.randint(-2, 2) for _ in range(d)]
        if any(v):
            rays.append([str(x) for x in v])
    lin = []
    if rng.random() < 0.3:
        v = [rng.randint(-1, 1) for _ in range(d)]
        if any(v):
            lin.append([str(x) for x in v])
    return {"rays": rays, "lineality": lin}


def gen_market(seed: int) -> dict:
    """Prices drawn so that about half of the instances are arbitrage-free.

    At a branching node the displacements ``D_c`` are chosen with zero in the
    relative interior of their hull (so the parent price is a strict
    average of the children); a drifted instance then shifts the children
    of one random node by a common vector.
    """
    rng = random.Random(seed)
    d = rng.randint(1, 3)
    nodes = _tree(rng, 4, 3)
    kids = _children(nodes)
    S = {"0": [_frac(rng, 1, 8) for _ in range(d)]}
    internal = [n["id"] for n in nodes if kids[n["id"]]]
    drifted = rng.random() < 0.6
    drift_at = rng.choice(internal) if drifted else None
    for pid in internal:
        cs = kids[pid]
        if len(cs) == 1:
            disp = [[Fraction(0)] * d]
        else:
            disp = [[_frac(rng, -2, 2, (1, 2)) for _ in range(d)] for _ in cs[:-1]]
            weights = [rng.randint(1, 2) for _ in disp]
            disp.append([-sum(w * D[i] for w, D in zip(weights, disp)) for i in range(d)])
        if pid == drift_at:
            shift = [_frac(rng, -2, 2, (1, 2)) for _ in range(d)]
            if not any(shift):
                shift[0] = Fraction(1)
            disp = [[a + b for a, b in zip(D, shift)] for D in disp]
        for c, D in zip(cs, disp):
            S[c] = [a + b for a, b in zip(S[pid], D)]
    leaves = [n["id"] for n in nodes if not kids[n["id"]]]
    strike = _frac(rng, 0, 8)
    f = {}
    for leaf in leaves:
        if rng.random() < 0.7:
            f[leaf] = max(S[leaf][0] - strike, Fraction(0))
        else:
            f[leaf] = _frac(rng, 0, 8)
    B = {pid: _cone(rng, d) for pid in internal}
    if drift_at is not None and rng.random() < 0.5:
        B[drift_at] = "full"
    return {
        "version": FORMAT_VERSION,
        "kind": "market",
        "tree": {"nodes": nodes},
        "payload": {
            "dim": d,
            "S": {k: [fmt(v) for v in vs] for k, vs in S.items()},
            "B": B,
            "f": {k: fmt(v) for k, v in f.items()},
        },
    }


def _open_set(rng, d):
    r = rng.random()
    if r < 0.2:
        return "full"
    if r < 0.35:
        # open box
        rows = []
        for i in range(d):
            lo = rng.randint(-3, 1)
            hi = lo + rng.randint(1, 4)
            e = [0] * d
            e[i] = 1
            rows.append({"a": [str(v) for v in e], "rel": "<", "b": str(hi)})
            rows.append({"a": [str(-v) for v in e], "rel": "<", "b": str(-lo)})
        return {"rows": rows}
    k = rng.randint(1, d + 1)
    pts = [tuple(Fraction(rng.randint(-3, 3)) for _ in range(d)) for _ in range(k)]
    rays = []
    if rng.random() < 0.3:
        rays.append(tuple(Fraction(rng.randint(-1, 1)) for _ in range(d)))
        if not any(rays[0]):
            rays = []
    F = relative_interior(to_faceform(GenForm(d, tuple(pts), tuple(rays))))
    return {"rows": [encode_row(row) for row in F.rows]}


def gen_selection(seed: int) -> dict:
    rng = random.Random(seed)
    d = rng.randint(1, 3)
    nodes = _tree(rng, 3, 3, t_min=0)
    kids = _children(nodes)
    V = {n["id"]: _open_set(rng, d) for n in nodes}
    C = {n["id"]: _cone(rng, d) for n in nodes if kids[n["id"]]}
    return {
        "version": FORMAT_VERSION,
        "kind": "selection",
        "tree": {"nodes": nodes},
        "payload": {"dim": d, "V": V, "C": C},
    }


def _closure(Pi):
    d = len(Pi)
    Pi = [row[:] for row in Pi]
    for k in range(d):
        for i in range(d):
            for j in range(d):
                if Pi[i][k] * Pi[k][j] < Pi[i][j]:
                    Pi[i][j] = Pi[i][k] * Pi[k][j]
    return Pi


def _bidask(rng, mids):
    d = len(mids)
    while True:
        Pi = [[Fraction(1)] * d for _ in range(d)]
        for i in range(d):
            for j in range(d):
                if i != j:
                    spread = rng.choice((Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1)))
                    Pi[i][j] = mids[j] / mids[i] * (1 + spread)
        Pi = _closure(Pi)
        if all(v.numerator <= CAP and v.denominator <= CAP for row in Pi for v in row):
            return Pi
        mids = [Fraction(1)] * d  # fall back to a flat valuation


def gen_bidask(seed: int) -> dict:
    """Triangle-closed bid-ask matrices around randomly moving mid prices."""
    rng = random.Random(seed)
    d = rng.randint(2, 3)
    nodes = _tree(rng, 3, 2)
    kids = _children(nodes)
    mids = {"0": [Fraction(1)] + [_frac(rng, 1, 3, (1, 2)) for _ in range(d - 1)]}
    for n in nodes:
        for c in kids[n["id"]]:
            mids[c] = [Fraction(1)] + [
                max(Fraction(1, 2), m * rng.choice((Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2))))
                for m in mids[n["id"]][1:]
            ]
    Pi = {nid: _bidask(rng, m) for nid, m in mids.items()}
    leaves = [n["id"] for n in nodes if not kids[n["id"]]]
    return {
        "version": FORMAT_VERSION,
        "kind": "bidask",
        "tree": {"nodes": nodes},
        "payload": {
            "dim": d,
            "Pi": {k: [[fmt(v) for v in row] for row in m] for k, m in Pi.items()},
            "zeta0": [fmt(Fraction(1))] + ["0"] * (d - 1),
            "zetaT": {leaf: ["1"] + ["0"] * (d - 1) for leaf in leaves},
        },
    }


def gen(seed: int, profile: str) -> dict:
    if profile == "market":
        return gen_market(seed)
    if profile == "selection":
        return gen_selection(seed)
    if profile == "bidask":
        return gen_bidask(seed)
    raise ValueError(f"unknown profile {profile!r}")
