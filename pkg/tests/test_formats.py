import json
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from msel.formats import (
    FormatError,
    decode,
    dumps,
    encode,
    load_instance,
    loads,
    parse_cone,
    parse_set,
    to_csv,
)
from msel.gen import gen
from msel.polyhedra import FaceForm, PolyCone, point_set, same_set, relative_interior

import cases


def test_encode_rationals_as_strings():
    assert encode(F(-3, 4)) == "-3/4"
    assert encode({"x": [F(2), math.inf]}) == {"x": ["2", "inf"]}
    assert encode({"version": 1, "dim": 2, "m": 3}) == {"version": 1, "dim": 2, "m": 3}
    with pytest.raises(TypeError):
        encode(0.25)


def test_decode_keeps_labels():
    raw = {"id": "1", "status": "ok", "x": ["1/2", "-inf"], "node": "2"}
    out = decode(raw)
    assert out == {"id": "1", "status": "ok", "x": [F(1, 2), -math.inf], "node": "2"}


def test_face_form_encoding():
    P = FaceForm(2, [((1, 0), "<", F(1, 2))])
    assert encode(P) == {"rows": [{"a": ["1", "0"], "rel": "<", "b": "1/2"}]}


def test_parse_set_and_cone():
    assert parse_set("full", 2, "V").rows == ()
    ri = parse_set({"ri_hull": {"points": [["0"], ["1"]]}}, 1, "V")
    assert same_set(ri, FaceForm(1, [((1,), "<", 1), ((-1,), "<", 0)]))
    with pytest.raises(FormatError, match="V: ri_hull without points"):
        parse_set({"ri_hull": {"points": []}}, 1, "V")
    with pytest.raises(FormatError, match="bad row 0"):
        parse_set({"rows": [{"a": ["x"], "rel": "<", "b": "1"}]}, 1, "V")
    assert parse_cone("orthant", 2, "C").contains((1, 2))
    C = parse_cone({"normals": [["-1", "0"]], "eq_normals": []}, 2, "C")
    assert C.contains((1, -5)) and not C.contains((-1, 0))
    with pytest.raises(FormatError, match="C: expected a cone object"):
        parse_cone(3, 2, "C")


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda d: d.update(kind="lattice"), "unknown kind"),
        (lambda d: d.update(version=7), "unsupported version"),
        (lambda d: d["payload"].update(dim=0), "payload.dim"),
        (lambda d: d["payload"]["S"].pop("0.1"), "S: bad or missing price at node 0.1"),
        (lambda d: d["payload"]["S"].update({"zz": ["1"]}), "S: unknown node 'zz'"),
        (lambda d: d["payload"]["f"].update({"0": "1"}), "f: payoff given at internal node 0"),
        (lambda d: d["payload"].update(B={"0.0": "full"}), "B: cone given at leaf 0.0"),
        (lambda d: d["payload"]["S"].update({"0": ["0.5"]}), r"S\[0\]"),
        (lambda d: d.pop("tree"), "missing tree.nodes"),
    ],
)
def test_market_schema_errors(mutate, message):
    data = json.loads(json.dumps(cases.CALL))
    mutate(data)
    with pytest.raises(ValueError, match=message):
        load_instance(data)


def test_bidask_schema_errors():
    data = json.loads(json.dumps(cases.CONSTANT_SPREAD))
    data["payload"]["zetaT"].pop("0.1")
    with pytest.raises(FormatError, match="zetaT: no claim at leaf 0.1"):
        load_instance(data)
    data = json.loads(json.dumps(cases.CONSTANT_SPREAD))
    data["payload"]["Pi"]["0.1"] = [["1", "5"], ["1/5", "2"]]
    with pytest.raises(ValueError, match="diagonal entry \\(1,1\\) is not 1 at node 0.1"):
        load_instance(data)


@settings(max_examples=30)
@given(st.integers(0, 10**6), st.sampled_from(["selection", "market", "bidask"]))
def test_instance_parse_print_identity(seed, profile):
    text = dumps(gen(seed, profile))
    assert dumps(loads(text)) == text
    inst = load_instance(loads(text))
    assert inst.kind == profile
    assert load_instance(json.loads(text)).tree.to_raw() == inst.tree.to_raw()


def test_result_parse_print_identity():
    res = {
        "version": 1,
        "tool": "msel 0.1.0",
        "command": "price",
        "input_digest": "sha256:00",
        "status": "arbitrage_free",
        "m": 2,
        "nodes": {
            "0": {"price": {"lower": F(1, 3), "upper": math.inf, "lower_attained": True}, "W": point_set((1, F(1, 3)))},
            "1": {"xi": (F(2), F(-1, 2))},
        },
    }
    text = dumps(res)
    assert dumps(loads(text)) == text
    assert loads(text)["nodes"]["0"]["price"]["upper"] == math.inf


def _strings(obj):
    if isinstance(obj, dict):
        for v in obj.values():
            yield from _strings(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from _strings(v)
    elif isinstance(obj, str):
        yield obj


def test_csv_carries_the_json_rationals():
    res = {
        "status": "ok",
        "nodes": {"0": {"Z": (F(1, 3), F(7)), "W": relative_interior(FaceForm(1, [((1,), "<=", F(5, 2)), ((-1,), "<=", 0)]))}},
    }
    csv = to_csv(res)
    lines = csv.splitlines()
    assert lines[0] == "node_id,field,value"
    assert "0,Z.0,1/3" in lines and "0,Z.1,7" in lines
    assert "0,W.row0,1 < 5/2" in lines
    assert ",status,ok" in lines
    values = {v for line in lines[1:] for v in line.split(",", 2)[2].split()}
    for s in _strings(encode(res["nodes"])):
        if s not in ("<", "<=", "="):
            assert s in values
