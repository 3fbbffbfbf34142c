import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from msel.formats import load_instance
from msel.gen import gen_selection
from msel.polyhedra import FaceForm, PolyCone, full_space, membership, point_set, same_set
from msel.selection import (
    SelectionProblem,
    SelectionResult,
    backward_recursion,
    forward_select,
    solve,
    verify_selector,
)
from msel.tree import validate_tree

import cases
from fuzz import candidates, valid_selectors


def binomial():
    return load_instance(cases.BINOMIAL_SELECTION).problem


def test_binomial_recursion():
    rec = backward_recursion(binomial())
    assert rec.solvable
    assert same_set(rec.W[0], point_set((1, F(1, 3))))


def test_binomial_forward():
    prob = binomial()
    res = solve(prob)
    assert res.xi[0] == (1, F(1, 3))
    assert (res.Q[1], res.Q[2]) == (F(1, 3), F(2, 3))
    assert (res.delta[1], res.delta[2]) == (F(2, 3), F(4, 3))
    assert res.z == {0: 1, 1: F(2, 3), 2: F(4, 3)}
    assert verify_selector(res, prob).ok


def test_unsolvable_at_root():
    prob = load_instance(cases.UNSOLVABLE_SELECTION).problem
    res = solve(prob)
    assert res.status == "unsolvable" and res.failing == [0]
    with pytest.raises(ValueError):
        forward_select(prob, res.recursion)


def test_horizon_zero():
    t = validate_tree([{"id": "r", "parent": None, "prob": "1"}])
    V = FaceForm(2, [((1, 0), "<", 1), ((-1, 0), "<", 0), ((0, 1), "=", 2)])
    prob = SelectionProblem(t, {0: V}, {}, 2)
    res = solve(prob)
    assert res.solvable and membership(res.xi[0], V)
    assert res.z == {0: 1} and res.delta == {}
    assert same_set(res.W[0], FaceForm(2, [((1, 0), "<=", 1), ((-1, 0), "<=", 0), ((0, 1), "=", 2)]))


def test_single_child_chain():
    t = validate_tree(cases.chain(2)["nodes"])
    prob = SelectionProblem(t, {n: full_space(1) for n in range(3)}, {}, 1)
    res = solve(prob)
    assert res.Q == {1: 1, 2: 1} and res.delta == {1: 1, 2: 1}
    assert res.xi[0] == res.xi[1] == res.xi[2]
    assert verify_selector(res, prob).ok


def test_verifier_flags_zero_weight():
    prob = binomial()
    res = solve(prob)
    bad = SelectionResult("solvable", xi=res.xi, Q={1: F(0), 2: F(1)})
    rep = verify_selector(bad, prob)
    assert ("0", "equivalence") in [(n, c) for n, c, _ in rep.failures]


def test_verifier_flags_boundary_point():
    t = validate_tree([{"id": "r", "parent": None, "prob": "1"}])
    V = FaceForm(1, [((1,), "<", 1), ((-1,), "<", 0)])
    prob = SelectionProblem(t, {0: V}, {}, 1)
    rep = verify_selector(SelectionResult("solvable", xi={0: (F(0),)}), prob)
    assert [(n, c) for n, c, _ in rep.failures] == [("r", "membership")]


def test_verifier_flags_drift():
    prob = binomial()
    res = solve(prob)
    bad = SelectionResult("solvable", xi=res.xi, Q={1: F(1, 2), 2: F(1, 2)})
    rep = verify_selector(bad, prob)
    assert [(n, c) for n, c, _ in rep.failures] == [("0", "drift")]


def test_unconstrained_condition_is_martingale():
    # with C = R^d the drift check accepts exactly zero drift
    prob = binomial()
    res = solve(prob)
    mean = sum(res.Q[c] * res.xi[c][1] for c in (1, 2))
    assert mean == res.xi[0][1]


def test_nonopen_values_detected():
    t = validate_tree([{"id": "r", "parent": None, "prob": "1"}])
    closed = FaceForm(1, [((1,), "<=", 1), ((-1,), "<=", 0)])
    assert SelectionProblem(t, {0: closed}, {}, 1).nonopen_nodes() == [0]
    half_open = FaceForm(1, [((1,), "<", 1), ((-1,), "<=", 0)])
    assert SelectionProblem(t, {0: half_open}, {}, 1).nonopen_nodes() == [0]
    # a point is its own relative interior
    assert SelectionProblem(t, {0: point_set((1,))}, {}, 1).nonopen_nodes() == []


def test_loader_rejects_nonopen_values():
    data = dict(cases.UNSOLVABLE_SELECTION)
    data["payload"] = dict(data["payload"], V=dict(data["payload"]["V"]))
    data["payload"]["V"]["0"] = {"rows": [{"a": ["1"], "rel": "<=", "b": "1"}]}
    with pytest.raises(ValueError, match=r"V\[0\] is not relatively open"):
        load_instance(data)


seeds = st.integers(0, 10**6)


@settings(max_examples=25)
@given(seeds)
def test_forward_select_verifies(seed):
    prob = load_instance(gen_selection(seed)).problem
    res = solve(prob)
    if res.solvable:
        assert verify_selector(res, prob).ok
        for n in range(len(prob.tree)):
            assert membership(res.xi[n], res.W[n], "relative_interior")


@settings(max_examples=15)
@given(seeds)
def test_valid_selectors_lie_in_W(seed):
    prob = load_instance(gen_selection(seed)).problem
    res = solve(prob)
    rng = random.Random(seed)
    if res.solvable:
        for cand in valid_selectors(prob, res.Q, rng, 5):
            assert verify_selector(cand, prob, check_w=False).ok
            assert all(membership(cand.xi[n], res.W[n]) for n in cand.xi)
    else:
        for cand in candidates(prob, rng, 6):
            assert not verify_selector(cand, prob, check_w=False).ok


@settings(max_examples=20)
@given(seeds, st.integers(0, 10**6))
def test_enlarging_V_keeps_solvability(seed, pick):
    prob = load_instance(gen_selection(seed)).problem
    if not solve(prob).solvable:
        return
    n = pick % len(prob.tree)
    V = dict(prob.V)
    V[n] = full_space(prob.dim)
    assert backward_recursion(SelectionProblem(prob.tree, V, dict(prob.C), prob.dim)).solvable


@settings(max_examples=20)
@given(seeds, st.lists(st.integers(1, 5), min_size=6, max_size=6))
def test_cone_generator_scaling_is_invisible(seed, factors):
    prob = load_instance(gen_selection(seed)).problem
    C = {n: c.scaled([F(f) for f in factors] * 2) for n, c in prob.C.items()}
    scaled = SelectionProblem(prob.tree, dict(prob.V), C, prob.dim)
    a, b = solve(prob), solve(scaled)
    assert a.status == b.status
    for n in a.W:
        assert same_set(a.W[n], b.W[n])
    if a.solvable:
        assert verify_selector(a, scaled).ok


@settings(max_examples=10)
@given(seeds)
def test_deterministic(seed):
    prob = load_instance(gen_selection(seed)).problem
    a, b = solve(prob), solve(load_instance(gen_selection(seed)).problem)
    assert (a.status, a.xi, a.delta, a.Q) == (b.status, b.xi, b.delta, b.Q)
    assert {n: W.rows for n, W in a.W.items()} == {n: W.rows for n, W in b.W.items()}
