from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from msel import lp
from msel.rational import dot, fmt, is_rational_literal, primitive, q

from oracles import brute_max


def test_rational_coercion():
    assert q("3/6") == F(1, 2)
    assert q(4) == 4 and q(F(2, 3)) == F(2, 3)
    with pytest.raises(TypeError):
        q(0.5)
    with pytest.raises(TypeError):
        q(True)
    with pytest.raises(ValueError):
        q("1.5")


def test_fmt_and_literal():
    assert fmt(F(-6, 4)) == "-3/2"
    assert fmt(F(5)) == "5"
    assert fmt(float("inf")) == "inf"
    assert is_rational_literal("-7/3") and not is_rational_literal("0.3")


def test_primitive():
    assert primitive((F(2, 3), F(-4, 3))) == (1, -2)


def test_small_lp():
    # max x + y, x + 2y <= 4, 3x + y <= 6, x, y >= 0
    rows = [((1, 2), lp.LE, 4), ((3, 1), lp.LE, 6)]
    res = lp.maximize((1, 1), rows, [True, True])
    assert res.optimal and res.value == F(14, 5)
    assert res.x == (F(8, 5), F(6, 5))


def test_free_variables_and_equalities():
    rows = [((1, 1), lp.EQ, 1), ((1, -1), lp.LE, 3)]
    res = lp.maximize((1, 0), rows)
    assert res.value == 2 and res.x == (2, -1)


def test_infeasible():
    rows = [((1,), lp.LE, 0), ((1,), lp.GE, 1)]
    assert lp.maximize((1,), rows).status == "infeasible"
    assert lp.feasible(rows, 1) is None


def test_unbounded_ray_is_improving():
    rows = [((1, -1), lp.LE, 1)]
    res = lp.maximize((1, 0), rows, [True, True])
    assert res.status == "unbounded"
    r = res.ray
    assert dot((1, 0), r) > 0 and dot((1, -1), r) <= 0 and all(v >= 0 for v in r)


def test_beale_cycling_example_terminates():
    # classic degenerate instance on which the textbook rule cycles
    c = (F(3, 4), -150, F(1, 50), -6)
    rows = [
        ((F(1, 4), -60, F(-1, 25), 9), lp.LE, 0),
        ((F(1, 2), -90, F(-1, 50), 3), lp.LE, 0),
        ((0, 0, 1, 0), lp.LE, 1),
    ]
    res = lp.maximize(c, rows, [True] * 4)
    assert res.optimal and res.value == F(1, 20)


def test_redundant_equalities():
    rows = [((1, 1), lp.EQ, 1), ((2, 2), lp.EQ, 2), ((1, 0), lp.GE, 0), ((0, 1), lp.GE, 0)]
    res = lp.maximize((1, 2), rows)
    assert res.value == 2


small = st.integers(-3, 3)


@given(st.lists(st.tuples(small, small, small), min_size=1, max_size=5), st.tuples(small, small))
def test_lp_matches_vertex_enumeration(extra, c):
    rows = [((1, 0), "<=", 3), ((-1, 0), "<=", 3), ((0, 1), "<=", 3), ((0, -1), "<=", 3)]
    rows += [((a, b), "<=", r) for a, b, r in extra]
    want = brute_max(c, 2, rows)
    res = lp.maximize(c, [(a, lp.LE, b) for a, _, b in rows])
    if want is None:
        assert res.status == "infeasible"
    else:
        assert res.optimal and res.value == want
