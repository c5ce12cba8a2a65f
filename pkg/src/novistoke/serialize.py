"""Canonical JSON encodings of every domain object.

Rationals are [num, den] pairs with den > 0 in lowest terms; plain JSON
integers are accepted on input. Gaussian rationals are a rational pair when
real and {"re": q, "im": q} otherwise. No floats are accepted.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from .barcodes import Barcode, GradedMorphism, Interval
from .certified import START_PRECISION, Angle
from .complexes import CurveComplex, Kind, PerversityVerdict, Summand
from .errors import ParseError
from .irregular import IrregularConstant, IrregularMorphism, StokesLocalSystem
from .linalg import Matrix
from .novikov import FieldScalar, NovikovScalar
from .rh import ConnectionDatum
from .sectors import PuiseuxFactor, SectorArc, SectorCover, Verdict


class SchemaError(ParseError):
    """A JSON value that does not match the expected shape."""


def _fail(msg: str, where: str) -> SchemaError:
    return SchemaError(f"{where}: {msg}")


# rationals and scalars


def rational_to_json(q: Fraction | int) -> list[int]:
    q = Fraction(q)
    return [q.numerator, q.denominator]


def rational_from_json(v: Any, where: str = "rational") -> Fraction:
    if isinstance(v, bool):
        raise _fail("booleans are not rationals", where)
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        raise _fail("floats are not accepted; use [num, den]", where)
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError):
            raise _fail(f"bad rational string {v!r}", where) from None
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, int) and not isinstance(x, bool) for x in v):
        if v[1] == 0:
            raise _fail("zero denominator", where)
        return Fraction(v[0], v[1])
    raise _fail(f"expected [num, den], got {v!r}", where)


def scalar_to_json(c: FieldScalar) -> Any:
    if c.im == 0:
        return rational_to_json(c.re)
    return {"re": rational_to_json(c.re), "im": rational_to_json(c.im)}


def scalar_from_json(v: Any, where: str = "scalar") -> FieldScalar:
    if isinstance(v, dict):
        extra = set(v) - {"re", "im"}
        if extra:
            raise _fail(f"unknown keys {sorted(extra)}", where)
        return FieldScalar(rational_from_json(v.get("re", 0), where + ".re"), rational_from_json(v.get("im", 0), where + ".im"))
    return FieldScalar(rational_from_json(v, where), Fraction(0))


def matrix_to_json(m: Matrix) -> list:
    return [[scalar_to_json(x) for x in row] for row in m]


def matrix_from_json(v: Any, where: str = "matrix") -> Matrix:
    if not isinstance(v, list) or not all(isinstance(r, list) for r in v):
        raise _fail("expected a list of rows", where)
    rows = tuple(tuple(scalar_from_json(x, f"{where}[{i}][{j}]") for j, x in enumerate(r)) for i, r in enumerate(v))
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise _fail("ragged matrix", where)
    return rows


def novikov_to_json(a: NovikovScalar) -> list:
    return [{"exponent": rational_to_json(e), "coeff": scalar_to_json(c)} for e, c in a.terms]


def novikov_from_json(v: Any, where: str = "novikov") -> NovikovScalar:
    if not isinstance(v, list):
        raise _fail("expected a list of terms", where)
    return NovikovScalar(tuple((rational_from_json(t.get("exponent"), where), scalar_from_json(t.get("coeff", 1), where)) for t in v))


# geometry


def factor_to_json(f: PuiseuxFactor) -> dict:
    return {
        "ramification": f.ramification,
        "terms": [{"order": rational_to_json(q), "coeff": scalar_to_json(c)} for q, c in f.terms],
    }


def factor_from_json(v: Any, where: str = "factor") -> PuiseuxFactor:
    if not isinstance(v, dict):
        raise _fail("expected an object", where)
    extra = set(v) - {"ramification", "terms"}
    if extra:
        raise _fail(f"unknown keys {sorted(extra)}", where)
    terms = v.get("terms", [])
    if not isinstance(terms, list):
        raise _fail("terms must be a list", where)
    parsed = []
    for i, t in enumerate(terms):
        if not isinstance(t, dict) or "order" not in t:
            raise _fail("each term needs an order", f"{where}.terms[{i}]")
        parsed.append((rational_from_json(t["order"], f"{where}.terms[{i}].order"), scalar_from_json(t.get("coeff", 1), f"{where}.terms[{i}].coeff")))
    r = v.get("ramification")
    if r is None:
        r = 1
        for q, _ in parsed:
            r = r * q.denominator // _gcd(r, q.denominator)
    if not isinstance(r, int) or isinstance(r, bool):
        raise _fail("ramification must be an integer", where)
    return PuiseuxFactor(tuple(parsed), r)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def arc_to_json(a: SectorArc) -> dict:
    return {"start": rational_to_json(a.start), "end": rational_to_json(a.end)}


def arc_from_json(v: Any, where: str = "arc") -> SectorArc:
    if not isinstance(v, dict):
        raise _fail("expected an object", where)
    if "ray" in v:
        return SectorArc.ray(rational_from_json(v["ray"], where + ".ray"))
    if "start" not in v or "end" not in v:
        raise _fail("arcs need start and end", where)
    return SectorArc(rational_from_json(v["start"], where + ".start"), rational_from_json(v["end"], where + ".end"))


def cover_to_json(c: SectorCover) -> dict:
    return {"arcs": [arc_to_json(a) for a in c.arcs]}


def cover_from_json(v: Any, where: str = "cover") -> SectorCover:
    if not isinstance(v, dict) or not isinstance(v.get("arcs"), list):
        raise _fail("expected {\"arcs\": [...]}", where)
    return SectorCover(tuple(arc_from_json(a, f"{where}.arcs[{i}]") for i, a in enumerate(v["arcs"])))


def angle_to_json(a: Angle) -> dict:
    if a.exact is not None:
        return {"exact": rational_to_json(a.exact)}
    lo, hi = a.enclosure(START_PRECISION)
    return {
        "rho": rational_to_json(a.rho),
        "kappa": rational_to_json(a.kappa),
        "arg_of": scalar_to_json(a.w),
        "enclosure": [rational_to_json(lo), rational_to_json(hi)],
        "approx": format(a.approx(), ".12f"),
    }


def verdict_to_json(v: Verdict) -> str:
    return v.value


# barcodes


def interval_to_json(i: Interval) -> dict:
    return {"birth": rational_to_json(i.birth), "length": None if i.length is None else rational_to_json(i.length)}


def barcode_to_json(b: Barcode) -> dict:
    return {"intervals": [interval_to_json(i) for i in b.intervals]}


def barcode_from_json(v: Any, where: str = "barcode") -> Barcode:
    if isinstance(v, dict):
        v = v.get("intervals")
    if not isinstance(v, list):
        raise _fail("expected a list of intervals", where)
    out = []
    for i, x in enumerate(v):
        if not isinstance(x, dict) or "birth" not in x:
            raise _fail("intervals need a birth", f"{where}[{i}]")
        length = x.get("length")
        out.append(Interval(rational_from_json(x["birth"], f"{where}[{i}].birth"), None if length is None else rational_from_json(length, f"{where}[{i}].length")))
    return Barcode(tuple(out))


def graded_morphism_to_json(f: GradedMorphism) -> dict:
    return {
        "type": "barcode",
        "source": barcode_to_json(f.source),
        "target": barcode_to_json(f.target),
        "degree": rational_to_json(f.degree),
        "matrix": matrix_to_json(f.matrix),
    }


# sheaves


def constant_to_json(c: IrregularConstant) -> dict:
    out = {"factor": factor_to_json(c.factor), "arc": arc_to_json(c.arc)}
    if c.inner_radius:
        out["inner_radius"] = rational_to_json(c.inner_radius)
    return out


def system_to_json(v: StokesLocalSystem) -> dict:
    return {
        "factors": [factor_to_json(f) for f in v.factors],
        "cover": cover_to_json(v.cover),
        "gluings": [matrix_to_json(g) for g in v.gluings],
    }


def system_morphism_to_json(f: IrregularMorphism) -> dict:
    return {
        "type": "system",
        "source": system_to_json(f.source),
        "target": system_to_json(f.target),
        "matrices": [matrix_to_json(m) for m in f.matrices],
    }


def complex_to_json(c: CurveComplex) -> dict:
    out = []
    for s in c.summands:
        payload = barcode_to_json(s.payload) if s.kind is Kind.SKYSCRAPER else system_to_json(s.payload)
        out.append({"degree": s.degree, "kind": s.kind.value, "payload": payload})
    return {"summands": out}


def perversity_to_json(v: PerversityVerdict) -> dict:
    return {"perverse": v.perverse, "witness": v.witness, "label": str(v)}


def connection_to_json(d: ConnectionDatum) -> dict:
    stokes = []
    for k, m in d.stokes:
        key = {"index": k} if isinstance(k, int) else rational_to_json(k)
        stokes.append({"direction": key, "matrix": matrix_to_json(m)})
    return {
        "factors": [factor_to_json(f) for f in d.factors],
        "formal_monodromy": matrix_to_json(d.formal_monodromy),
        "stokes": stokes,
    }


def profile_to_json(p: dict[int, int | None]) -> dict:
    return {str(j): ("-inf" if d is None else d) for j, d in p.items()}


def dims_to_json(d: dict[int, int]) -> dict:
    return {str(k): v for k, v in sorted(d.items())}


__all__ = [name for name in dir() if name.endswith(("_to_json", "_from_json"))] + ["SchemaError"]
