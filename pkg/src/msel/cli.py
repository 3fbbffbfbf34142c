"""``msel`` command-line front end.

Exit codes: 0 computed and affirmative, 1 computed and negative, 2 invalid
input, 3 internal inconsistency.  Every run writes a result file (JSON or
CSV) to ``--out`` or stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import __version__
from .formats import FormatError, digest, dumps, load_instance, to_csv
from .gen import PROFILES, gen
from .kabanov import (
    BidAskError,
    CertificateError,
    SizeGuardError,
    arbitrage_certificate,
    check_nar,
    consistent_price_process,
    endowment_check,
    endowment_set_description,
)
from .polyhedra import InvalidInput
from .pricing import arbitrage_lp, check_na, gains, price_bounds, superhedge_oracle
from .selection import backward_recursion, solve, verify_selector
from .tree import TreeError

TOOL = f"msel {__version__}"
COMMANDS = ("check", "select", "price", "na", "oracle", "nar", "ccp", "endow", "gen")
KIND_OF = {
    "check": "selection",
    "select": "selection",
    "price": "market",
    "na": "market",
    "oracle": "market",
    "nar": "bidask",
    "ccp": "bidask",
    "endow": "bidask",
}

OK, NEGATIVE, INVALID, INTERNAL = 0, 1, 2, 3


class InputError(ValueError):
    pass


def _ids(tree, nodes):
    return [tree.node_id(n) for n in nodes]


def _per_node(tree, **tables):
    """``{node_id: {field: value}}`` in tree order, skipping missing entries."""
    out = {}
    for n in range(len(tree)):
        row = {k: t[n] for k, t in tables.items() if n in t}
        if row:
            out[tree.node_id(n)] = row
    return out


# ------------------------------------------------------------------ commands


def _check(inst):
    rec = backward_recursion(inst.problem)
    tree = inst.tree
    status = "solvable" if rec.solvable else "unsolvable"
    nodes = _per_node(tree, W=rec.W, empty={n: n in rec.empty for n in rec.W})
    extra = {} if rec.solvable else {"failing": _ids(tree, rec.failing)}
    return (OK if rec.solvable else NEGATIVE), status, nodes, extra


def _select(inst):
    prob, tree = inst.problem, inst.tree
    res = solve(prob)
    if not res.solvable:
        nodes = _per_node(tree, W=res.W)
        return NEGATIVE, "unsolvable", nodes, {"failing": _ids(tree, res.failing)}
    rep = verify_selector(res, prob)
    if not rep.ok:
        raise RuntimeError(f"selector fails verification: {rep.failures}")
    nodes = _per_node(tree, W=res.W, xi=res.xi, z=res.z, Q=res.Q, delta=res.delta)
    return OK, "solvable", nodes, {}


def _arbitrage_extra(m, na):
    tree = m.tree
    gamma = arbitrage_lp(m)
    if gamma is None:
        raise RuntimeError("recursion reports arbitrage but the arbitrage LP is infeasible")
    extra = {"failing": _ids(tree, na.failing)}
    nodes = _per_node(tree, gamma=gamma, gain=gains(m, gamma))
    return nodes, extra


def _na(inst):
    m = inst.problem
    na = check_na(m)
    if na.arbitrage_free:
        if arbitrage_lp(m) is not None:
            raise RuntimeError("recursion reports NA but the arbitrage LP is feasible")
        return OK, "arbitrage_free", {}, {}
    nodes, extra = _arbitrage_extra(m, na)
    return NEGATIVE, "arbitrage", nodes, extra


def _price(inst):
    m = inst.problem
    na = check_na(m)
    if not na.arbitrage_free:
        nodes, extra = _arbitrage_extra(m, na)
        return NEGATIVE, "arbitrage", nodes, extra
    bounds = price_bounds(m, check=False)
    table = {
        n: {
            "lower": b.lower,
            "upper": b.upper,
            "lower_attained": b.lower_attained,
            "upper_attained": b.upper_attained,
        }
        for n, b in bounds.items()
    }
    return OK, "arbitrage_free", _per_node(inst.tree, price=table), {}


def _oracle(inst):
    m = inst.problem
    extra, gam = {}, {}
    finite = True
    for side in ("super", "sub"):
        res = superhedge_oracle(m, side)
        extra[side] = res.value
        if isinstance(res.value, float):
            finite = False
            gam[side] = res.ray
        else:
            gam[side] = res.cert.gamma
    nodes = _per_node(inst.tree, gamma_super=gam["super"], gamma_sub=gam["sub"])
    if not finite:
        extra["message"] = "hedging LP unbounded; gamma fields hold a recession direction"
    return (OK if finite else NEGATIVE), ("bounded" if finite else "unbounded"), nodes, extra


def _certificate(market, nar):
    tree = market.tree
    try:
        cert = arbitrage_certificate(market, nar)
    except CertificateError as exc:
        sep = {} if exc.separator is None else {"separator": exc.separator}
        return {}, {"message": str(exc), "node": tree.node_id(exc.node), **sep}
    nodes = _per_node(tree, theta=cert.theta, x=cert.x, eps=cert.eps)
    extra = {"node": tree.node_id(cert.node), "m": cert.m}
    if cert.separator is not None:
        extra["separator"] = cert.separator
    return nodes, extra


def _nar(inst):
    market = inst.problem
    nar = check_nar(market)
    if nar.nar:
        return OK, "nar", _per_node(inst.tree, W=nar.W), {}
    nodes, extra = _certificate(market, nar)
    extra["failing"] = _ids(inst.tree, nar.failing)
    return NEGATIVE, "arbitrage", nodes, extra


def _ccp(inst):
    market = inst.problem
    nar = check_nar(market)
    if not nar.nar:
        nodes, extra = _certificate(market, nar)
        extra["failing"] = _ids(inst.tree, nar.failing)
        return NEGATIVE, "arbitrage", nodes, extra
    cpp = consistent_price_process(market, nar)
    return OK, "consistent", _per_node(inst.tree, Z=cpp.Z, xi=cpp.xi, z=cpp.z), {}


def _endow(inst):
    market = inst.problem
    if "zeta0" not in inst.extra or "zetaT" not in inst.extra:
        raise InputError("endow needs payload.zeta0 and payload.zetaT")
    zeta0, zetaT = inst.extra["zeta0"], inst.extra["zetaT"]
    if len(zeta0) != market.dim or any(len(v) != market.dim for v in zetaT.values()):
        raise InputError("zeta0/zetaT do not match payload.dim")
    nar = check_nar(market)
    if not nar.nar:
        return NEGATIVE, "nar_fails", {}, {"failing": _ids(inst.tree, nar.failing)}
    res = endowment_check(zeta0, zetaT, market, check=False)
    eset = endowment_set_description(zetaT, market, check=False)
    if eset.admits(zeta0) != res.ok:
        raise RuntimeError("endowment check disagrees with the endowment set")
    extra = {"endowment_set": eset.ri_W0, "caveat": eset.caveat}
    if not res.ok:
        return NEGATIVE, "not_replicable", {}, extra
    return OK, "ok", _per_node(inst.tree, Z=res.process.Z), extra


HANDLERS = {
    "check": _check,
    "select": _select,
    "price": _price,
    "na": _na,
    "oracle": _oracle,
    "nar": _nar,
    "ccp": _ccp,
    "endow": _endow,
}


# ---------------------------------------------------------------------- main


def result_file(command, input_digest, status, nodes=None, **extra) -> dict:
    out = {
        "version": 1,
        "tool": TOOL,
        "command": command,
        "input_digest": input_digest,
        "status": status,
    }
    out.update(extra)
    out["nodes"] = nodes or {}
    return out


def _load(path: Optional[str]):
    if path is None or path == "-":
        data = sys.stdin.buffer.read()
    else:
        with open(path, "rb") as fh:
            data = fh.read()
    return data


def _emit(text: str, out: Optional[str]):
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="msel", description="Exact martingale selection tools.")
    p.add_argument("--version", action="version", version=TOOL)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--in", dest="inp", metavar="PATH", help="instance file (default stdin)")
    p.add_argument("--out", metavar="PATH", help="result file (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--seed", type=int, help="gen only")
    p.add_argument("--profile", choices=PROFILES, default="market", help="gen only")
    p.add_argument("--size-guard", type=int, metavar="N", help="refuse trees with more than N nodes")
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse usage errors
        return INVALID if exc.code else OK

    if args.command == "gen":
        if args.seed is None:
            print("msel: error: gen requires --seed", file=sys.stderr)
            return INVALID
        if args.format != "json":
            print("msel: error: gen writes JSON only", file=sys.stderr)
            return INVALID
        _emit(dumps(gen(args.seed, args.profile)), args.out)
        return OK
    if args.seed is not None:
        print("msel: error: --seed is only valid with gen", file=sys.stderr)
        return INVALID

    def finish(code, status, nodes=None, **extra):
        res = result_file(args.command, in_digest, status, nodes, **extra)
        _emit(to_csv(res) if args.format == "csv" else dumps(res), args.out)
        return code

    in_digest = None
    try:
        raw = _load(args.inp)
        in_digest = digest(raw)
        data = json.loads(raw.decode("utf-8"))
        inst = load_instance(data)
        want = KIND_OF[args.command]
        if inst.kind != want:
            raise InputError(f"command {args.command} expects a {want} instance, got {inst.kind}")
        if args.size_guard is not None and len(inst.tree) > args.size_guard:
            raise SizeGuardError(
                f"tree has {len(inst.tree)} nodes, above the size guard {args.size_guard}"
            )
    except (OSError, UnicodeDecodeError, json.JSONDecodeError, TreeError, FormatError,
            BidAskError, InvalidInput, SizeGuardError, InputError, ValueError) as exc:
        print(f"msel: invalid input: {exc}", file=sys.stderr)
        if isinstance(exc, OSError) and in_digest is None:
            return INVALID
        return finish(INVALID, "invalid_input", message=str(exc))

    try:
        code, status, nodes, extra = HANDLERS[args.command](inst)
    except InputError as exc:
        print(f"msel: invalid input: {exc}", file=sys.stderr)
        return finish(INVALID, "invalid_input", message=str(exc))
    except Exception as exc:  # noqa: BLE001 - every failure maps to an exit code
        print(f"msel: internal inconsistency: {type(exc).__name__}: {exc}", file=sys.stderr)
        return finish(INTERNAL, "internal_error", message=f"{type(exc).__name__}: {exc}")
    return finish(code, status, nodes, **extra)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
