"""Scenario files: declarations, commands and deterministic reports.

A scenario is a JSON object with schema "novistoke-scenario/1". Named
declarations live in the sections listed in ``SECTIONS``; wherever an
object is expected, a string names a declaration of the matching section
and anything else is an inline definition. Declarations are built lazily
and memoized, so a broken declaration only fails the commands that use it.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from . import __version__
from . import barcodes as bc
from . import linalg as la
from .complexes import (
    CurveComplex,
    Kind,
    Summand,
    hom_complex,
    is_perverse,
    recollement,
    support_profile,
    truncate,
    verdier_dual,
)
from .diagram import diagram_text, stokes_diagram
from .errors import InvalidObject, NovistokeError, ParseError, ReferenceResolutionError
from .irregular import (
    IrregularConstant,
    IrregularMorphism,
    StokesLocalSystem,
    cokernel_morphism,
    dual_constant,
    dual_system,
    ext_dims,
    forget,
    hom_constant,
    hom_global,
    kernel_morphism,
    refine_together,
    sheafhom_constant,
    stalk,
    tensor_constant,
    trivial_system,
)
from .oracle import oracle_dominance
from .rh import ConnectionDatum, hom_comparison, ray_hom_table, sol_lambda, sol_system
from .sectors import PuiseuxFactor, SectorArc, SectorCover, dominance, standard_cover, stokes_directions
from . import serialize as ser

SCENARIO_SCHEMA = "novistoke-scenario/1"
REPORT_SCHEMA = "novistoke-report/1"
SECTIONS = ("factors", "arcs", "covers", "barcodes", "systems", "morphisms", "complexes", "connections")
_TOP_KEYS = set(SECTIONS) | {"schema", "commands", "description"}


def dumps(obj: Any) -> str:
    """The canonical JSON text used for reports and hashes."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", exc.lineno, exc.colno) from None


class Resolver:
    """Builds domain objects from JSON, resolving names against declarations."""

    def __init__(self, declarations: dict[str, dict[str, Any]] | None = None):
        self.decl = {s: dict((declarations or {}).get(s, {})) for s in SECTIONS}
        self._cache: dict[tuple[str, str], Any] = {}
        self._active: set[tuple[str, str]] = set()

    def _named(self, section: str, name: str, build: Callable[[Any, str], Any]) -> Any:
        key = (section, name)
        if key in self._cache:
            cached = self._cache[key]
            if isinstance(cached, NovistokeError):
                raise cached
            return cached
        if name not in self.decl[section]:
            raise ReferenceResolutionError(f"unknown {section[:-1]} {name!r}")
        if key in self._active:
            raise ReferenceResolutionError(f"cyclic declaration involving {section}.{name}")
        self._active.add(key)
        try:
            value = build(self.decl[section][name], f"{section}.{name}")
        except NovistokeError as exc:
            self._cache[key] = exc
            raise
        finally:
            self._active.discard(key)
        self._cache[key] = value
        return value

    def _get(self, section: str, v: Any, where: str, build: Callable[[Any, str], Any]) -> Any:
        if isinstance(v, str):
            return self._named(section, v, build)
        return build(v, where)

    # leaf objects

    def factor(self, v: Any, where: str = "factor") -> PuiseuxFactor:
        return self._get("factors", v, where, ser.factor_from_json)

    def arc(self, v: Any, where: str = "arc") -> SectorArc:
        return self._get("arcs", v, where, ser.arc_from_json)

    def cover(self, v: Any, where: str = "cover") -> SectorCover:
        return self._get("covers", v, where, ser.cover_from_json)

    def barcode(self, v: Any, where: str = "barcode") -> bc.Barcode:
        return self._get("barcodes", v, where, ser.barcode_from_json)

    def factor_list(self, v: Any, where: str) -> list[PuiseuxFactor]:
        if not isinstance(v, list):
            raise ser.SchemaError(f"{where}: expected a list of factors")
        return [self.factor(x, f"{where}[{i}]") for i, x in enumerate(v)]

    def constant(self, v: Any, where: str = "constant") -> IrregularConstant:
        if not isinstance(v, dict) or "factor" not in v or "arc" not in v:
            raise ser.SchemaError(f"{where}: constants need a factor and an arc")
        r = v.get("inner_radius", 0)
        return IrregularConstant(self.factor(v["factor"], where + ".factor"), self.arc(v["arc"], where + ".arc"), ser.rational_from_json(r, where + ".inner_radius"))

    # composite objects

    def system(self, v: Any, where: str = "system") -> StokesLocalSystem:
        return self._get("systems", v, where, self._build_system)

    def _build_system(self, v: Any, where: str) -> StokesLocalSystem:
        if not isinstance(v, dict) or "factors" not in v:
            raise ser.SchemaError(f"{where}: systems need factors")
        extra = set(v) - {"factors", "cover", "gluings"}
        if extra:
            raise ser.SchemaError(f"{where}: unknown keys {sorted(extra)}")
        factors = self.factor_list(v["factors"], where + ".factors")
        cover_v = v.get("cover", "standard")
        cover = standard_cover(factors) if cover_v == "standard" else self.cover(cover_v, where + ".cover")
        gl = v.get("gluings", "identity")
        if gl == "identity":
            return trivial_system(factors, cover)
        if not isinstance(gl, list):
            raise ser.SchemaError(f"{where}.gluings: expected a list of matrices or \"identity\"")
        mats = tuple(ser.matrix_from_json(g, f"{where}.gluings[{i}]") for i, g in enumerate(gl))
        return StokesLocalSystem(tuple(factors), cover, mats)

    def morphism(self, v: Any, where: str = "morphism") -> bc.GradedMorphism | IrregularMorphism:
        return self._get("morphisms", v, where, self._build_morphism)

    def _build_morphism(self, v: Any, where: str):
        if not isinstance(v, dict):
            raise ser.SchemaError(f"{where}: expected an object")
        kind = v.get("type")
        if kind == "barcode":
            src = self.barcode(v.get("source"), where + ".source")
            tgt = self.barcode(v.get("target"), where + ".target")
            deg = ser.rational_from_json(v.get("degree", 0), where + ".degree")
            m = ser.matrix_from_json(v.get("matrix", []), where + ".matrix")
            if not m:
                m = tuple(() for _ in range(len(tgt)))
            return bc.GradedMorphism(src, tgt, deg, m)
        if kind == "system":
            src = self.system(v.get("source"), where + ".source")
            tgt = self.system(v.get("target"), where + ".target")
            if "matrix" in v:
                if src.cover != tgt.cover:
                    src, tgt = refine_together(src, tgt)
                m = ser.matrix_from_json(v["matrix"], where + ".matrix")
                mats = tuple(m for _ in range(len(src.cover)))
            else:
                raw = v.get("matrices")
                if not isinstance(raw, list):
                    raise ser.SchemaError(f"{where}: system morphisms need matrix or matrices")
                mats = tuple(ser.matrix_from_json(x, f"{where}.matrices[{i}]") for i, x in enumerate(raw))
            return IrregularMorphism(src, tgt, mats)
        raise ser.SchemaError(f"{where}: morphism type must be \"barcode\" or \"system\"")

    def complex(self, v: Any, where: str = "complex") -> CurveComplex:
        return self._get("complexes", v, where, self._build_complex)

    def _build_complex(self, v: Any, where: str) -> CurveComplex:
        if isinstance(v, dict):
            v = v.get("summands")
        if not isinstance(v, list):
            raise ser.SchemaError(f"{where}: expected a list of summands")
        out = []
        for i, s in enumerate(v):
            w = f"{where}.summands[{i}]"
            if not isinstance(s, dict) or not {"degree", "kind", "payload"} <= set(s):
                raise ser.SchemaError(f"{w}: summands need degree, kind and payload")
            try:
                kind = Kind(s["kind"])
            except ValueError:
                raise ser.SchemaError(f"{w}: unknown kind {s['kind']!r}") from None
            deg = s["degree"]
            if not isinstance(deg, int) or isinstance(deg, bool):
                raise ser.SchemaError(f"{w}: degree must be an integer")
            payload = self.barcode(s["payload"], w + ".payload") if kind is Kind.SKYSCRAPER else self.system(s["payload"], w + ".payload")
            out.append(Summand(deg, kind, payload))
        return CurveComplex(tuple(out))

    def connection(self, v: Any, where: str = "connection") -> ConnectionDatum:
        return self._get("connections", v, where, self._build_connection)

    def _build_connection(self, v: Any, where: str) -> ConnectionDatum:
        if not isinstance(v, dict) or "factors" not in v:
            raise ser.SchemaError(f"{where}: connections need factors")
        factors = tuple(self.factor_list(v["factors"], where + ".factors"))
        mono = v.get("formal_monodromy")
        mono = None if mono is None else ser.matrix_from_json(mono, where + ".formal_monodromy")
        stokes = []
        for i, s in enumerate(v.get("stokes", [])):
            w = f"{where}.stokes[{i}]"
            if not isinstance(s, dict) or "direction" not in s or "matrix" not in s:
                raise ser.SchemaError(f"{w}: Stokes entries need direction and matrix")
            d = s["direction"]
            key = d["index"] if isinstance(d, dict) and "index" in d else ser.rational_from_json(d, w + ".direction")
            stokes.append((key, ser.matrix_from_json(s["matrix"], w + ".matrix")))
        return ConnectionDatum(factors, mono, tuple(stokes))


def _system_summary(v: StokesLocalSystem) -> dict:
    r, mono = forget(v)
    return {"system": ser.system_to_json(v), "rank": r, "monodromy": ser.matrix_to_json(mono)}


def _hom_dispatch(res: Resolver, args: dict) -> dict:
    kind = args.get("kind")
    src, tgt = args.get("source"), args.get("target")
    if kind == "constant":
        return {"dimension": hom_constant(res.constant(src, "source"), res.constant(tgt, "target"))}
    if kind == "system":
        s, t = res.system(src, "source"), res.system(tgt, "target")
        h = hom_global(s, t)
        e0, e1 = ext_dims(s, t)
        return {"dimension": h.dimension, "ext1": e1, "basis": [[ser.matrix_to_json(m) for m in b] for b in h.basis], "cover": ser.cover_to_json(h.cover)}
    if kind == "complex":
        return {"dimensions": ser.dims_to_json(hom_complex(res.complex(src, "source"), res.complex(tgt, "target")))}
    if kind == "barcode":
        s, t = res.barcode(src, "source"), res.barcode(tgt, "target")
        if "degree" in args:
            pairs = bc.hom_degree(s, t, ser.rational_from_json(args["degree"], "degree"))
            return {"dimension": len(pairs), "pairs": [list(p) for p in pairs]}
        dim, tags = bc.hom_reduced(s, t)
        return {"dimension": dim, "pairs": [list(p) for p in tags]}
    raise ser.SchemaError("hom: kind must be constant, system, complex or barcode")


def _tensor_dispatch(res: Resolver, args: dict) -> dict:
    kind = args.get("kind", "constant")
    if kind == "constant":
        return {"constant": ser.constant_to_json(tensor_constant(res.constant(args.get("a"), "a"), res.constant(args.get("b"), "b")))}
    if kind == "barcode":
        return {"barcode": ser.barcode_to_json(bc.tensor(res.barcode(args.get("a"), "a"), res.barcode(args.get("b"), "b")))}
    raise ser.SchemaError("tensor: kind must be constant or barcode")


def _dual_dispatch(res: Resolver, args: dict) -> dict:
    kind = args.get("kind")
    obj = args.get("object")
    if kind == "constant":
        c, shift = dual_constant(res.constant(obj, "object"))
        return {"constant": ser.constant_to_json(c), "shift": shift}
    if kind == "barcode":
        return {"barcode": ser.barcode_to_json(bc.dual(res.barcode(obj, "object")))}
    if kind == "system":
        return _system_summary(dual_system(res.system(obj, "object")))
    if kind == "complex":
        return {"complex": ser.complex_to_json(verdier_dual(res.complex(obj, "object")))}
    raise ser.SchemaError("dual: kind must be constant, barcode, system or complex")


def _kernel_like(res: Resolver, args: dict, which: str) -> dict:
    f = res.morphism(args.get("morphism"), "morphism")
    if isinstance(f, bc.GradedMorphism):
        out = bc.kernel(f) if which == "kernel" else bc.cokernel(f)
        return {"barcode": ser.barcode_to_json(out)}
    k = kernel_morphism(f) if which == "kernel" else cokernel_morphism(f)
    return _system_summary(k.system)


def _connection_table(res: Resolver, args: dict) -> dict:
    names = args.get("connections")
    if not isinstance(names, list):
        raise ser.SchemaError("rh_table: connections must be a list")
    data = [res.connection(x, f"connections[{i}]") for i, x in enumerate(names)]
    rows = []
    for a in data:
        row = []
        for b in data:
            r = hom_comparison(a, b)
            row.append({"sheaf": r.sheaf, "d_module": r.d_module, "agrees": r.agrees})
        rows.append(row)
    out = {"labels": [x if isinstance(x, str) else f"#{i}" for i, x in enumerate(names)], "full_disk": rows}
    if all(len(d.factors) == 1 for d in data):
        theta = ser.rational_from_json(args.get("ray", 0), "ray")
        out["ray"] = {"theta": ser.rational_to_json(theta), "table": ray_hom_table([d.factors[0] for d in data], theta)}
    return out


def _oracle(res: Resolver, args: dict) -> dict:
    phi = res.factor(args.get("factor"), "factor")
    arc = res.arc(args.get("arc"), "arc")
    o = oracle_dominance(phi, arc, int(args.get("theta_points", 65)))
    exact = dominance(phi, arc)
    return {
        "oracle": None if o.verdict is None else o.verdict.value,
        "exact": exact.value,
        "agrees": None if o.verdict is None else o.verdict is exact,
        "maxima": [format(m, ".6e") for m in o.maxima],
    }


def _stalk(res: Resolver, args: dict) -> dict:
    c = res.constant(args.get("constant"), "constant")
    z = ser.scalar_from_json(args.get("point"), "point")
    return {"barcode": ser.barcode_to_json(stalk(c, z))}


def _complex_op(fn):
    def run(res: Resolver, args: dict) -> dict:
        return fn(res.complex(args.get("complex"), "complex"), args)
    return run


def _truncate(c: CurveComplex, args: dict) -> dict:
    side = args.get("side", "<=0")
    return {"complex": ser.complex_to_json(truncate(c, side))}


def _recollement(c: CurveComplex, args: dict) -> dict:
    r = recollement(c)
    return {
        "open": [{"degree": d, "kind": k.value, "system": ser.system_to_json(v)} for d, k, v in r.open_part],
        "closed": ser.dims_to_json(r.closed_part),
    }


COMMANDS: dict[str, Callable[[Resolver, dict], Any]] = {
    "dominance": lambda r, a: {"verdict": dominance(r.factor(a.get("factor"), "factor"), r.arc(a.get("arc"), "arc")).value},
    "stokes_directions": lambda r, a: {"directions": [ser.angle_to_json(x) for x in stokes_directions(r.factor(a.get("a"), "a"), r.factor(a.get("b"), "b"))]},
    "stokes_diagram": lambda r, a: stokes_diagram(r.factor_list(a.get("factors"), "factors")),
    "standard_cover": lambda r, a: ser.cover_to_json(standard_cover(r.factor_list(a.get("factors"), "factors"))),
    "hom": _hom_dispatch,
    "tensor": _tensor_dispatch,
    "sheafhom": lambda r, a: {"constant": ser.constant_to_json(sheafhom_constant(r.constant(a.get("a"), "a"), r.constant(a.get("b"), "b")))},
    "dual": _dual_dispatch,
    "stalk": _stalk,
    "forget": lambda r, a: _system_summary(r.system(a.get("system"), "system")),
    "kernel": lambda r, a: _kernel_like(r, a, "kernel"),
    "cokernel": lambda r, a: _kernel_like(r, a, "cokernel"),
    "support_profile": _complex_op(lambda c, a: {"profile": ser.profile_to_json(support_profile(c))}),
    "perverse": _complex_op(lambda c, a: ser.perversity_to_json(is_perverse(c))),
    "truncate": _complex_op(_truncate),
    "recollement": _complex_op(_recollement),
    "sol": lambda r, a: {"complex": ser.complex_to_json(sol_lambda(r.connection(a.get("connection"), "connection")))},
    "rh_table": _connection_table,
    "oracle": _oracle,
}


@dataclass
class Scenario:
    raw: dict
    resolver: Resolver
    commands: list[dict]

    @property
    def sha256(self) -> str:
        return hashlib.sha256(dumps(self.raw).encode()).hexdigest()


def parse_scenario(text: str) -> Scenario:
    data = loads(text)
    if not isinstance(data, dict):
        raise ParseError("a scenario must be a JSON object")
    schema = data.get("schema", SCENARIO_SCHEMA)
    if schema != SCENARIO_SCHEMA:
        raise ParseError(f"unsupported schema {schema!r}")
    extra = set(data) - _TOP_KEYS
    if extra:
        raise ParseError(f"unknown top-level keys {sorted(extra)}")
    for s in SECTIONS:
        if not isinstance(data.get(s, {}), dict):
            raise ParseError(f"section {s!r} must map names to objects")
    commands = data.get("commands", [])
    if not isinstance(commands, list):
        raise ParseError("commands must be a list")
    for i, c in enumerate(commands):
        if not isinstance(c, dict) or not isinstance(c.get("op"), str):
            raise ParseError(f"command {i} needs an op")
        if c["op"] not in COMMANDS:
            raise ParseError(f"command {i}: unknown op {c['op']!r}")
        if not isinstance(c.get("args", {}), dict):
            raise ParseError(f"command {i}: args must be an object")
    return Scenario(data, Resolver({s: data.get(s, {}) for s in SECTIONS}), commands)


def run_command(res: Resolver, cmd: dict, index: int) -> dict:
    entry: dict[str, Any] = {"index": index, "op": cmd["op"]}
    if "id" in cmd:
        entry["id"] = cmd["id"]
    try:
        entry["result"] = COMMANDS[cmd["op"]](res, cmd.get("args", {}))
        entry["status"] = "ok"
    except NovistokeError as exc:
        entry["status"] = "error"
        entry["error"] = {"code": exc.code, "message": exc.message}
    except (ValueError, ZeroDivisionError, TypeError, KeyError) as exc:
        entry["status"] = "error"
        entry["error"] = {"code": InvalidObject.code, "message": str(exc)}
    return entry


def run_scenario_text(text: str) -> tuple[dict, int]:
    """Run every command; returns (report, exit code)."""
    try:
        sc = parse_scenario(text)
    except NovistokeError as exc:
        report = {"schema": REPORT_SCHEMA, "tool_version": __version__, "error": {"code": exc.code, "message": exc.message}, "results": []}
        return report, exc.exit_code
    results = [run_command(sc.resolver, c, i) for i, c in enumerate(sc.commands)]
    code = 0
    for r in results:
        if r["status"] == "error":
            ec = 2 if r["error"]["code"] in ("PARSE_ERROR", "REFERENCE_ERROR") else 1
            code = max(code, ec)
    report = {"schema": REPORT_SCHEMA, "tool_version": __version__, "scenario_sha256": sc.sha256, "results": results}
    return report, code


def run_scenario(path: str) -> tuple[dict, int]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        err = ParseError(f"cannot read {path}: {exc.strerror}")
        return {"schema": REPORT_SCHEMA, "tool_version": __version__, "error": {"code": err.code, "message": err.message}, "results": []}, 2
    return run_scenario_text(text)


def report_text(report: dict) -> str:
    """Aligned plain-text rendering of a report."""
    lines = [f"schema {report['schema']}  version {report['tool_version']}"]
    if "error" in report:
        lines.append(f"error {report['error']['code']}: {report['error']['message']}")
        return "\n".join(lines) + "\n"
    lines.append(f"scenario {report['scenario_sha256']}")
    for r in report["results"]:
        label = r.get("id", f"#{r['index']}")
        if r["status"] == "ok":
            res = r["result"]
            if r["op"] == "stokes_diagram":
                body = "\n" + diagram_text(res).rstrip("\n")
            else:
                body = json.dumps(_compact(res), sort_keys=True)
            lines.append(f"{label:<16} {r['op']:<18} ok    {body}")
        else:
            lines.append(f"{label:<16} {r['op']:<18} ERROR {r['error']['code']}: {r['error']['message']}")
    return "\n".join(lines) + "\n"


def _compact(res: Any) -> Any:
    """Drop bulky fields (full systems, bases) from the text view."""
    if isinstance(res, dict):
        return {k: _compact(v) for k, v in res.items() if k not in ("system", "basis", "cover")}
    return res


# canonical forms, used by the round-trip check


def canonical_object(section: str, v: Any) -> Any:
    """serialize(parse(v)) for a single inline object of the given section."""
    res = Resolver()
    build = {
        "factors": lambda x: ser.factor_to_json(res.factor(x)),
        "arcs": lambda x: ser.arc_to_json(res.arc(x)),
        "covers": lambda x: ser.cover_to_json(res.cover(x)),
        "barcodes": lambda x: ser.barcode_to_json(res.barcode(x)),
        "systems": lambda x: ser.system_to_json(res.system(x)),
        "complexes": lambda x: ser.complex_to_json(res.complex(x)),
        "connections": lambda x: ser.connection_to_json(res.connection(x)),
        "morphisms": lambda x: _morphism_json(res.morphism(x)),
    }[section]
    return build(v)


def _morphism_json(f) -> dict:
    if isinstance(f, bc.GradedMorphism):
        return ser.graded_morphism_to_json(f)
    return ser.system_morphism_to_json(f)


def canonical_scenario(text: str) -> dict:
    """Every declaration replaced by its canonical inline form."""
    sc = parse_scenario(text)
    out: dict[str, Any] = {"schema": SCENARIO_SCHEMA}
    getters = {
        "factors": (sc.resolver.factor, ser.factor_to_json),
        "arcs": (sc.resolver.arc, ser.arc_to_json),
        "covers": (sc.resolver.cover, ser.cover_to_json),
        "barcodes": (sc.resolver.barcode, ser.barcode_to_json),
        "systems": (sc.resolver.system, ser.system_to_json),
        "complexes": (sc.resolver.complex, ser.complex_to_json),
        "connections": (sc.resolver.connection, ser.connection_to_json),
        "morphisms": (sc.resolver.morphism, _morphism_json),
    }
    for s in SECTIONS:
        names = sorted(sc.raw.get(s, {}))
        if names:
            get, to_json = getters[s]
            out[s] = {n: to_json(get(n)) for n in names}
    out["commands"] = sc.commands
    return out
