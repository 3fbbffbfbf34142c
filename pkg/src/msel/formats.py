"""JSON/CSV instance and result files.

Rationals are written as ``"p/q"`` strings (``"p"`` when integral) and
never as floats.  See ``docs/format.md`` for the schema.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Optional

from .kabanov import CurrencyMarket
from .polyhedra import (
    FaceForm,
    GenForm,
    LiftedSystem,
    PolyCone,
    full_space,
    relative_interior,
    to_faceform,
)
from .pricing import ConstrainedMarket
from .rational import fmt, is_rational_literal, q
from .selection import SelectionProblem
from .tree import validate_tree

FORMAT_VERSION = 1
KINDS = ("selection", "market", "bidask")

# keys whose string values are labels, never rationals
_LABEL_KEYS = {
    "version", "tool", "command", "kind", "status", "input_digest", "id",
    "parent", "node", "failing", "rel", "side", "message", "caveat", "profile",
}


class FormatError(ValueError):
    """Schema violation in an instance file."""


# ------------------------------------------------------------------ encoding


# integer-valued keys kept as JSON numbers
_INT_KEYS = {"version", "dim", "aux", "m"}


def encode(value: Any, key: Optional[str] = None) -> Any:
    """Turn library values into JSON-ready structures (rationals as strings)."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if key in _INT_KEYS and isinstance(value, int):
        return value
    if isinstance(value, (Fraction, int)):
        return fmt(Fraction(value))
    if isinstance(value, float):
        if math.isinf(value):
            return fmt(value)
        raise TypeError("finite floats are not serialized")
    if isinstance(value, LiftedSystem):
        out = {"rows": [encode_row(r) for r in value.rows]}
        if value.aux:
            out["aux"] = value.aux
        return out
    if isinstance(value, GenForm):
        return {
            "points": encode(value.points),
            "rays": encode(value.rays),
            "lineality": encode(value.lineality),
        }
    if isinstance(value, PolyCone):
        rays, lin = value.generators
        return {"rays": encode(rays), "lineality": encode(lin)}
    if isinstance(value, dict):
        return {str(k): encode(v, str(k)) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    raise TypeError(f"cannot encode {type(value).__name__}")


def encode_row(row) -> dict:
    a, rel, b = row
    return {"a": [fmt(v) for v in a], "rel": rel, "b": fmt(b)}


def decode(value: Any, key: Optional[str] = None) -> Any:
    """Inverse of :func:`encode` for plain structures (rational strings -> Fraction)."""
    if isinstance(value, dict):
        return {k: decode(v, k) for k, v in value.items()}
    if isinstance(value, list):
        return [decode(v, key) for v in value]
    if isinstance(value, str) and key not in _LABEL_KEYS:
        if value == "inf":
            return math.inf
        if value == "-inf":
            return -math.inf
        if is_rational_literal(value):
            return q(value)
    return value


def dumps(obj: Any) -> str:
    return json.dumps(encode(obj), indent=2, ensure_ascii=False) + "\n"


def loads(text: str) -> Any:
    return decode(json.loads(text))


def digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def to_csv(result: dict) -> str:
    """``node_id,field,value`` lines; vectors are flattened as ``field.i``."""
    lines = ["node_id,field,value"]

    def emit(node, name, value):
        if isinstance(value, dict) and "rows" in value:
            for i, r in enumerate(value["rows"]):
                text = " ".join(r["a"] + [r["rel"], r["b"]])
                lines.append(f"{node},{name}.row{i},{text}")
        elif isinstance(value, dict):
            for k, v in value.items():
                emit(node, f"{name}.{k}", v)
        elif isinstance(value, list):
            for i, v in enumerate(value):
                emit(node, f"{name}.{i}", v)
        else:
            text = "" if value is None else str(value).lower() if isinstance(value, bool) else str(value)
            if "," in text or '"' in text:
                text = '"' + text.replace('"', '""') + '"'
            lines.append(f"{node},{name},{text}")

    enc = encode(result)
    for key, value in enc.items():
        if key == "nodes":
            continue
        emit("", key, value)
    for node, fields in enc.get("nodes", {}).items():
        for name, value in fields.items():
            emit(node, name, value)
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ decoding


def _vec(raw, where):
    try:
        return tuple(q(v) for v in raw)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{where}: {exc}") from None


def _rows(raw, dim, where):
    rows = []
    for k, r in enumerate(raw):
        try:
            rows.append((_vec(r["a"], where), r["rel"], q(r["b"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"{where}: bad row {k}: {exc}") from None
    try:
        return FaceForm(dim, tuple(rows))
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from None


def parse_set(raw, dim, where) -> FaceForm:
    """A relatively open set: explicit rows, ``"full"``, or ``{"ri_hull": gens}``."""
    if raw == "full":
        return full_space(dim)
    if not isinstance(raw, dict):
        raise FormatError(f"{where}: expected an object")
    if "rows" in raw:
        return _rows(raw["rows"], dim, where)
    if "ri_hull" in raw:
        g = raw["ri_hull"]
        G = GenForm(
            dim,
            tuple(_vec(p, where) for p in g.get("points", [])),
            tuple(_vec(p, where) for p in g.get("rays", [])),
            tuple(_vec(p, where) for p in g.get("lineality", [])),
        )
        if G.is_empty:
            raise FormatError(f"{where}: ri_hull without points")
        return relative_interior(to_faceform(G))
    raise FormatError(f"{where}: expected 'rows' or 'ri_hull'")


def parse_cone(raw, dim, where) -> PolyCone:
    if raw == "full":
        return PolyCone.full(dim)
    if raw == "zero":
        return PolyCone.zero(dim)
    if raw == "orthant":
        return PolyCone.orthant(dim)
    if not isinstance(raw, dict):
        raise FormatError(f"{where}: expected a cone object")
    try:
        if "normals" in raw or "eq_normals" in raw:
            return PolyCone.from_faces(
                dim,
                [_vec(v, where) for v in raw.get("normals", [])],
                [_vec(v, where) for v in raw.get("eq_normals", [])],
            )
        return PolyCone.from_generators(
            dim,
            [_vec(v, where) for v in raw.get("rays", [])],
            [_vec(v, where) for v in raw.get("lineality", [])],
        )
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from None


@dataclass
class Instance:
    kind: str
    tree: Any
    problem: Any  # SelectionProblem | ConstrainedMarket | CurrencyMarket
    extra: Dict[str, Any]


def load_instance(data: dict) -> Instance:
    try:
        return _load_instance(data)
    except (AttributeError, TypeError, KeyError) as exc:
        raise FormatError(f"malformed instance: {exc}") from None


def _section(payload, key, default):
    value = payload.get(key, default)
    if not isinstance(value, type(default)):
        raise FormatError(f"payload.{key} must be a JSON {'object' if isinstance(default, dict) else 'array'}")
    return value


def _load_instance(data):
    if not isinstance(data, dict):
        raise FormatError("instance must be a JSON object")
    kind = data.get("kind")
    if kind not in KINDS:
        raise FormatError(f"unknown kind {kind!r}")
    if data.get("version", FORMAT_VERSION) != FORMAT_VERSION:
        raise FormatError(f"unsupported version {data.get('version')!r}")
    try:
        nodes = data["tree"]["nodes"]
    except (KeyError, TypeError):
        raise FormatError("missing tree.nodes") from None
    tree = validate_tree(nodes)
    payload = data.get("payload", {})
    if not isinstance(payload, dict):
        raise FormatError("payload must be a JSON object")
    dim = payload.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise FormatError("payload.dim must be a positive integer")

    def idx(node_id, section):
        try:
            return tree.index(str(node_id))
        except KeyError:
            raise FormatError(f"{section}: unknown node {node_id!r}") from None

    extra: Dict[str, Any] = {}
    if kind == "selection":
        V = {}
        for nid, raw in _section(payload, "V", {}).items():
            V[idx(nid, "V")] = parse_set(raw, dim, f"V[{nid}]")
        for n in range(len(tree)):
            if n not in V:
                raise FormatError(f"V: no set for node {tree.node_id(n)}")
        C = {}
        for nid, raw in _section(payload, "C", {}).items():
            n = idx(nid, "C")
            if tree.is_leaf(n):
                raise FormatError(f"C: cone given at leaf {nid}")
            C[n] = parse_cone(raw, dim, f"C[{nid}]")
        problem = SelectionProblem(tree, V, C, dim)
        bad = problem.nonopen_nodes()
        if bad:
            raise FormatError(f"V[{tree.node_id(bad[0])}] is not relatively open")
    elif kind == "market":
        S = {}
        for nid, raw in _section(payload, "S", {}).items():
            S[idx(nid, "S")] = _vec(raw, f"S[{nid}]")
        f = {}
        for nid, raw in _section(payload, "f", {}).items():
            n = idx(nid, "f")
            if not tree.is_leaf(n):
                raise FormatError(f"f: payoff given at internal node {nid}")
            f[n] = q(raw)
        B = {}
        for nid, raw in _section(payload, "B", {}).items():
            n = idx(nid, "B")
            if tree.is_leaf(n):
                raise FormatError(f"B: cone given at leaf {nid}")
            B[n] = parse_cone(raw, dim, f"B[{nid}]")
        for n in range(len(tree)):
            if n not in S or len(S[n]) != dim:
                raise FormatError(f"S: bad or missing price at node {tree.node_id(n)}")
        try:
            problem = ConstrainedMarket(tree, S, f, B)
        except ValueError as exc:
            raise FormatError(str(exc)) from None
    else:
        Pi = {}
        for nid, raw in _section(payload, "Pi", {}).items():
            Pi[idx(nid, "Pi")] = tuple(_vec(r, f"Pi[{nid}]") for r in raw)
        problem = CurrencyMarket(tree, Pi)
        if problem.dim != dim:
            raise FormatError("Pi matrices do not match payload.dim")
        if "zeta0" in payload:
            extra["zeta0"] = _vec(payload["zeta0"], "zeta0")
        if "zetaT" in payload:
            zT = {}
            for nid, raw in _section(payload, "zetaT", {}).items():
                n = idx(nid, "zetaT")
                if not tree.is_leaf(n):
                    raise FormatError(f"zetaT: claim given at internal node {nid}")
                zT[n] = _vec(raw, f"zetaT[{nid}]")
            for n in tree.leaves():
                if n not in zT:
                    raise FormatError(f"zetaT: no claim at leaf {tree.node_id(n)}")
            extra["zetaT"] = zT
    return Instance(kind, tree, problem, extra)


def tree_section(tree) -> dict:
    return {
        "nodes": [
            {"id": r["id"], "parent": r["parent"], "prob": fmt(r["prob"])}
            for r in tree.to_raw()
        ]
    }
