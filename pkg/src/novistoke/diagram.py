"""Stokes diagrams as data: directions per pair and the sign between them."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .certified import Angle, rational_between
from .sectors import PuiseuxFactor, SectorArc, Verdict, dominance, same_class, stokes_directions
from .serialize import angle_to_json, factor_to_json


def _sign_between(delta: PuiseuxFactor, a: Angle, b: Angle) -> str:
    mid = rational_between(a, b, Fraction(1, 2))
    v = dominance(delta, SectorArc.ray(mid))
    return "+" if v is Verdict.POS_DIVERGENT else "-" if v is Verdict.NEG_DIVERGENT else "0"


def stokes_diagram(factors: Sequence[PuiseuxFactor]) -> dict:
    """Per pair i < j of distinct classes: sorted directions and the sign of
    Re(phi_i - phi_j) on each arc between consecutive directions."""
    classes: list[PuiseuxFactor] = []
    for f in factors:
        if not any(same_class(f, g) for g in classes):
            classes.append(f)
    pairs = []
    for i in range(len(classes)):
        for j in range(i + 1, len(classes)):
            delta = classes[i] - classes[j]
            dirs = stokes_directions(classes[i], classes[j])
            arcs = []
            for k, d in enumerate(dirs):
                nxt = dirs[k + 1] if k + 1 < len(dirs) else dirs[0] + 1
                arcs.append({"from": angle_to_json(d), "to": angle_to_json(nxt), "sign": _sign_between(delta, d, nxt)})
            pairs.append({
                "i": i,
                "j": j,
                "label": f"{classes[i]} vs {classes[j]}",
                "directions": [angle_to_json(d) for d in dirs],
                "arcs": arcs,
            })
    return {"factors": [factor_to_json(f) for f in classes], "labels": [str(f) for f in classes], "pairs": pairs}


def _angle_text(a: dict) -> str:
    if "exact" in a:
        n, d = a["exact"]
        return str(Fraction(n, d))
    return "~" + a["approx"]


def diagram_text(diagram: dict) -> str:
    lines = ["factors: " + ", ".join(diagram["labels"])]
    if not diagram["pairs"]:
        lines.append("no Stokes directions")
    for p in diagram["pairs"]:
        lines.append(f"pair {p['label']}")
        lines.append("  directions: " + "  ".join(_angle_text(a) for a in p["directions"]))
        rows = [(f"({_angle_text(a['from'])}, {_angle_text(a['to'])})", a["sign"]) for a in p["arcs"]]
        width = max([len("arc")] + [len(r[0]) for r in rows])
        lines.append(f"  {'arc'.ljust(width)}  sign")
        for arc, sign in rows:
            lines.append(f"  {arc.ljust(width)}  {sign}")
    return "\n".join(lines) + "\n"
