"""Rank-one-factor Riemann-Hilbert dictionary on the disk.

Connection data are a format: a list of exponential factors, a formal
monodromy and one Stokes matrix per Stokes direction. The solution functor
turns them into j_! of a Stokes local system placed in degree -1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

from . import linalg as la
from .certified import Angle, compare_rational
from .complexes import CurveComplex, hom_complex, j_shriek
from .errors import InvalidObject
from .irregular import IrregularConstant, StokesLocalSystem, hom_constant
from .linalg import Matrix
from .sectors import PuiseuxFactor, SectorArc, pair_directions, same_class, standard_cover

DirectionKey = Union[int, Fraction]


@dataclass(frozen=True)
class ConnectionDatum:
    """Formal type plus Stokes data.

    ``stokes`` maps a direction to its Stokes matrix; a direction is either
    its exact turn (a Fraction, for rational directions) or its index in the
    sorted list of Stokes directions.
    """

    factors: tuple[PuiseuxFactor, ...]
    formal_monodromy: Matrix | None = None
    stokes: tuple[tuple[DirectionKey, Matrix], ...] = ()

    def __post_init__(self) -> None:
        factors = tuple(self.factors)
        n = len(factors)
        mono = la.identity(n) if self.formal_monodromy is None else la.matrix(self.formal_monodromy)
        if len(mono) != n or any(len(r) != n for r in mono):
            raise InvalidObject(f"formal monodromy must be {n}x{n}")
        if n and not la.is_invertible(mono):
            raise InvalidObject("formal monodromy must be invertible")
        items = self.stokes.items() if isinstance(self.stokes, Mapping) else self.stokes
        stokes = []
        for key, m in items:
            m = la.matrix(m)
            if len(m) != n or any(len(r) != n for r in m):
                raise InvalidObject(f"Stokes matrix at {key} must be {n}x{n}")
            for i in range(n):
                if m[i][i] != 1:
                    raise InvalidObject(f"Stokes matrix at {key} must be unipotent")
                for j in range(n):
                    if i != j and same_class(factors[i], factors[j]) and not m[i][j].is_zero():
                        raise InvalidObject(f"Stokes matrix at {key} mixes equal factors")
            stokes.append((key if isinstance(key, int) else Fraction(key), m))
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "formal_monodromy", mono)
        object.__setattr__(self, "stokes", tuple(stokes))


def exponential(phi: PuiseuxFactor) -> ConnectionDatum:
    """The rank-one connection E^phi with trivial data."""
    return ConnectionDatum((phi,))


def _resolve(directions: Sequence[Angle], key: DirectionKey) -> int:
    if isinstance(key, int):
        if not 0 <= key < len(directions):
            raise InvalidObject(f"Stokes direction index {key} out of range")
        return key
    for k, d in enumerate(directions):
        if d.exact is not None and d.exact == key % 1:
            return k
    raise InvalidObject(f"{key} is not a Stokes direction of these factors")


def _overlap_after(cover, directions: Sequence[Angle]) -> list[int]:
    """Index of the first overlap following each direction, cyclically."""
    n = len(cover)
    starts = [cover.overlap(k).start % 1 for k in range(n)]
    order = sorted(range(n), key=lambda k: starts[k])
    out = []
    for d in directions:
        after = [k for k in order if compare_rational(d, starts[k]) < 0]
        out.append(after[0] if after else order[0])
    return out


def sol_system(d: ConnectionDatum) -> StokesLocalSystem:
    factors = d.factors
    n = len(factors)
    directions = pair_directions(factors)
    cover = standard_cover(factors)
    gl = [la.identity(n) for _ in range(len(cover))]
    slots = _overlap_after(cover, directions)
    for key, m in d.stokes:
        k = _resolve(directions, key)
        idx = slots[k]
        gl[idx] = la.matmul(m, gl[idx]) if n else gl[idx]
    # formal monodromy on the overlap just before the first direction
    if directions:
        wrap = (slots[0] - 1) % len(cover)
    else:
        wrap = len(cover) - 1
    gl[wrap] = la.matmul(d.formal_monodromy, gl[wrap]) if n else gl[wrap]
    return StokesLocalSystem(factors, cover, tuple(gl))


def sol_lambda(d: ConnectionDatum) -> CurveComplex:
    return j_shriek(sol_system(d), -1)


def dual_datum(d: ConnectionDatum) -> ConnectionDatum:
    """Negated factors with inverse-transpose formal monodromy and Stokes matrices."""
    inv_t = (lambda m: la.transpose(la.inverse(m))) if d.factors else (lambda m: m)
    return ConnectionDatum(
        tuple(-f for f in d.factors),
        inv_t(d.formal_monodromy),
        tuple((k, inv_t(m)) for k, m in d.stokes),
    )


def d_module_hom(d1: ConnectionDatum, d2: ConnectionDatum) -> int | None:
    """Catalog value of dim Hom(d1, d2) for rank-one exponentials; None when unknown.

    For E^phi1 and E^phi2 with trivial monodromy the homs are the
    meromorphic horizontal sections of E^(phi2 - phi1), so the dimension is
    1 exactly when the factors agree modulo bounded terms.
    """
    if len(d1.factors) != 1 or len(d2.factors) != 1:
        return None
    if d1.formal_monodromy != la.identity(1) or d2.formal_monodromy != la.identity(1):
        return None
    return 1 if same_class(d1.factors[0], d2.factors[0]) else 0


@dataclass(frozen=True)
class ComparisonRow:
    sheaf: int
    d_module: int | None

    @property
    def agrees(self) -> bool | None:
        return None if self.d_module is None else self.sheaf == self.d_module


def hom_comparison(d1: ConnectionDatum, d2: ConnectionDatum) -> ComparisonRow:
    """Hom(d1, d2) on the connection side against Hom(sol d2, sol d1) on the sheaf side."""
    sheaf = hom_complex(sol_lambda(d2), sol_lambda(d1)).get(0, 0)
    return ComparisonRow(sheaf, d_module_hom(d1, d2))


def hom_comparison_table(data: Sequence[ConnectionDatum]) -> list[list[ComparisonRow]]:
    """Row i, column j compares Hom(data[i], data[j]) with its sheaf counterpart."""
    return [[hom_comparison(a, b) for b in data] for a in data]


def ray_hom_table(factors: Sequence[PuiseuxFactor], theta: Fraction = Fraction(0)) -> list[list[int]]:
    """Entry (i, j) = Hom(Lambda^phi_j, Lambda^phi_i) on the ray at angle theta.

    This is the sheaf side of Hom(E^phi_i, E^phi_j) restricted to a ray
    ending at the puncture, where one factor can dominate another.
    """
    arc = SectorArc.ray(theta)
    return [[hom_constant(IrregularConstant(b, arc), IrregularConstant(a, arc)) for b in factors] for a in factors]


__all__ = [
    "ComparisonRow",
    "ConnectionDatum",
    "d_module_hom",
    "dual_datum",
    "exponential",
    "hom_comparison",
    "hom_comparison_table",
    "ray_hom_table",
    "sol_lambda",
    "sol_system",
]
