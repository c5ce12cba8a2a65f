"""Command-line entry point.

Every subcommand except ``run`` and the oracle sweep builds a one-command
scenario from its flags (names refer to declarations in --scenario, or
inline JSON) and runs it through the same engine as ``run``.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Any, Sequence

from . import __version__
from .certified import reset_max_precision, set_max_precision
from .errors import ParseError
from .oracle import hom_from_verdict, oracle_dominance, random_triple
from .scenario import REPORT_SCHEMA, dumps, loads, report_text, run_scenario, run_scenario_text
from .sectors import dominance
from . import serialize as ser


def _value(s: str | None) -> Any:
    """A declaration name, or inline JSON when it looks like JSON."""
    if s is None:
        return None
    t = s.strip()
    if t[:1] in "[{" or t[:1].isdigit() or t[:1] == "-":
        try:
            return json.loads(t)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad inline JSON: {exc.msg}", exc.lineno, exc.colno) from None
    return s


def _base_scenario(path: str | None) -> dict:
    if not path:
        return {"schema": "novistoke-scenario/1"}
    with open(path, encoding="utf-8") as fh:
        data = loads(fh.read())
    if not isinstance(data, dict):
        raise ParseError("a scenario must be a JSON object")
    data = dict(data)
    data["commands"] = []
    return data


def _constant_arg(factor: str | None, arc: str | None, inner: str | None) -> dict:
    c = {"factor": _value(factor), "arc": _value(arc)}
    if inner:
        c["inner_radius"] = _value(inner)
    return c


def _command_from_args(args: argparse.Namespace) -> dict:
    cmd = args.command
    if cmd == "hom":
        if args.arc is not None:
            a = {"kind": "constant", "source": _constant_arg(args.source, args.arc, args.inner_radius), "target": _constant_arg(args.target, args.arc, args.inner_radius)}
        else:
            a = {"kind": args.kind, "source": _value(args.source), "target": _value(args.target)}
            if args.degree is not None:
                a["degree"] = _value(args.degree)
        return {"op": "hom", "args": a}
    if cmd == "tensor":
        if args.arc is not None:
            return {"op": "tensor", "args": {"kind": "constant", "a": _constant_arg(args.a, args.arc, None), "b": _constant_arg(args.b, args.arc, None)}}
        return {"op": "tensor", "args": {"kind": "barcode", "a": _value(args.a), "b": _value(args.b)}}
    if cmd == "dual":
        if args.arc is not None:
            return {"op": "dual", "args": {"kind": "constant", "object": _constant_arg(args.object, args.arc, None)}}
        return {"op": "dual", "args": {"kind": args.kind, "object": _value(args.object)}}
    if cmd == "perverse":
        return {"op": "perverse", "args": {"complex": _value(args.complex)}}
    if cmd == "stokes":
        return {"op": "stokes_diagram", "args": {"factors": [_value(f) for f in args.factors]}}
    if cmd == "rh-table":
        return {"op": "rh_table", "args": {"connections": [_value(c) for c in args.connections], "ray": _value(args.ray or "0")}}
    if cmd == "oracle":
        return {"op": "oracle", "args": {"factor": _value(args.factor), "arc": _value(args.arc)}}
    raise ParseError(f"unknown command {cmd}")


def _oracle_sweep(seed: int, count: int) -> tuple[dict, int]:
    """Compare exact dominance with the numeric oracle on random triples."""
    rng = random.Random(seed)
    checked = ambiguous = 0
    disagreements = []
    while checked < count:
        a, b, arc = random_triple(rng)
        delta = a - b
        o = oracle_dominance(delta, arc)
        if o.ambiguous:
            ambiguous += 1
            continue
        checked += 1
        exact = dominance(delta, arc)
        if hom_from_verdict(exact) != hom_from_verdict(o.verdict):
            disagreements.append({
                "source": ser.factor_to_json(a),
                "target": ser.factor_to_json(b),
                "arc": ser.arc_to_json(arc),
                "exact": exact.value,
                "oracle": o.verdict.value,
            })
    report = {
        "schema": REPORT_SCHEMA,
        "tool_version": __version__,
        "oracle_sweep": {"seed": seed, "checked": checked, "ambiguous_skipped": ambiguous, "disagreements": disagreements},
    }
    return report, 1 if disagreements else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="novistoke", description="Irregular constant sheaves, Stokes data and barcodes.")
    p.add_argument("--version", action="version", version=f"novistoke {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario JSON file with declarations")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--max-precision-bits", type=int, help="cap for certified interval arithmetic")
    common.add_argument("--seed", type=int, help="seed for generated corpora")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("run", parents=[common], help="run every command of a scenario")

    h = sub.add_parser("hom", parents=[common], help="hom dimension between two objects")
    h.add_argument("source")
    h.add_argument("target")
    h.add_argument("--kind", choices=("system", "complex", "barcode"), default="system")
    h.add_argument("--arc", help="treat source and target as factors on this arc")
    h.add_argument("--inner-radius", help="truncate the sector at this radius")
    h.add_argument("--degree", help="graded hom degree for barcodes")

    t = sub.add_parser("tensor", parents=[common], help="tensor product of constants or barcodes")
    t.add_argument("a")
    t.add_argument("b")
    t.add_argument("--arc", help="treat a and b as factors on this arc")

    d = sub.add_parser("dual", parents=[common], help="Verdier or graded dual")
    d.add_argument("object")
    d.add_argument("--kind", choices=("barcode", "system", "complex"), default="complex")
    d.add_argument("--arc", help="treat the object as a factor on this arc")

    pv = sub.add_parser("perverse", parents=[common], help="irregular perversity check")
    pv.add_argument("complex")

    st = sub.add_parser("stokes", parents=[common], help="Stokes diagram of a list of factors")
    st.add_argument("factors", nargs="*")

    rh = sub.add_parser("rh-table", parents=[common], help="connection-side vs sheaf-side hom table")
    rh.add_argument("connections", nargs="+")
    rh.add_argument("--ray", help="angle of the ray for the sectorial table (default 0)")

    o = sub.add_parser("oracle", parents=[common], help="numeric dominance oracle")
    o.add_argument("factor", nargs="?")
    o.add_argument("arc", nargs="?")
    o.add_argument("--count", type=int, default=200, help="sweep size when no factor is given")
    return p


def _emit(report: dict, args: argparse.Namespace) -> None:
    text = report_text(report) if args.format == "text" and "results" in report else dumps(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    token = set_max_precision(args.max_precision_bits) if args.max_precision_bits else None
    try:
        if args.command == "run":
            if not args.scenario:
                parser.error("run needs --scenario")
            report, code = run_scenario(args.scenario)
        elif args.command == "oracle" and args.factor is None:
            report, code = _oracle_sweep(args.seed if args.seed is not None else 0, args.count)
        else:
            try:
                scenario = _base_scenario(args.scenario)
                scenario["commands"] = [_command_from_args(args)]
                report, code = run_scenario_text(json.dumps(scenario))
            except ParseError as exc:
                report = {"schema": REPORT_SCHEMA, "tool_version": __version__, "error": {"code": exc.code, "message": exc.message}, "results": []}
                code = exc.exit_code
            except OSError as exc:
                report = {"schema": REPORT_SCHEMA, "tool_version": __version__, "error": {"code": "PARSE_ERROR", "message": f"cannot read scenario: {exc.strerror}"}, "results": []}
                code = 2
        _emit(report, args)
        return code
    finally:
        if token is not None:
            reset_max_precision(token)


if __name__ == "__main__":
    raise SystemExit(main())
