"""Exponential factors, angular sectors, dominance and Stokes directions.

Angles are measured in turns (fractions of 2pi). A factor
phi(z) = sum c_q z^(-q) has Re(c z^(-q)) = |c| r^(-q) cos 2pi(arg c - q theta)
on the ray of angle theta, so every sign question reduces to locating
psi = arg c - q theta relative to the quarter-turn grid.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .certified import Angle, compare, compare_rational, floor_angle, reduce_mod1
from .errors import IdenticalFactors, InvalidObject
from .novikov import ZERO, FieldScalar, Rational, as_fraction


@dataclass(frozen=True, slots=True)
class PuiseuxFactor:
    """phi(z) = sum c_q z^(-q) modulo bounded terms.

    Orders are positive rationals with denominators dividing
    ``ramification``; terms are stored by strictly decreasing order.
    """

    terms: tuple[tuple[Fraction, FieldScalar], ...] = ()
    ramification: int = 1
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        acc: dict[Fraction, FieldScalar] = {}
        for q, c in self.terms:
            q = as_fraction(q)
            if q <= 0:
                continue
            acc[q] = acc.get(q, ZERO) + FieldScalar.coerce(c)
        terms = tuple((q, acc[q]) for q in sorted(acc, reverse=True) if not acc[q].is_zero())
        r = int(self.ramification)
        if r < 1:
            raise InvalidObject("ramification must be a positive integer")
        for q, _ in terms:
            if r % q.denominator:
                raise InvalidObject(f"order {q} has denominator not dividing ramification {r}")
        minimal = 1
        for q, _ in terms:
            minimal = math.lcm(minimal, q.denominator)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "ramification", minimal)
        object.__setattr__(self, "_hash", hash((terms, minimal)))

    def __hash__(self) -> int:
        return self._hash

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def leading(self) -> tuple[Fraction, FieldScalar] | None:
        return self.terms[0] if self.terms else None

    @property
    def pole_order(self) -> Fraction:
        return self.terms[0][0] if self.terms else Fraction(0)

    def __add__(self, other: "PuiseuxFactor") -> "PuiseuxFactor":
        return PuiseuxFactor(self.terms + other.terms, math.lcm(self.ramification, other.ramification))

    def __neg__(self) -> "PuiseuxFactor":
        return PuiseuxFactor(tuple((q, -c) for q, c in self.terms), self.ramification)

    def __sub__(self, other: "PuiseuxFactor") -> "PuiseuxFactor":
        return self + (-other)

    def scaled(self, c: FieldScalar | Rational) -> "PuiseuxFactor":
        c = FieldScalar.coerce(c)
        return PuiseuxFactor(tuple((q, c * a) for q, a in self.terms), self.ramification)

    def value_at(self, z: FieldScalar) -> FieldScalar:
        """Exact value at a Gaussian rational point (integer orders only)."""
        if self.ramification != 1:
            raise InvalidObject("exact evaluation needs an unramified factor; pull back first")
        total = ZERO
        for q, c in self.terms:
            total = total + c * z ** (-int(q))
        return total

    def sort_key(self) -> tuple:
        return tuple((q, c.re, c.im) for q, c in self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for q, c in self.terms:
            power = "z" if q == 1 else (f"z^{q}" if q.denominator == 1 else f"z^({q})")
            if c == 1:
                num = "1"
            elif c.im == 0 or c.re == 0:
                num = str(c)
            else:
                num = f"({c})"
            parts.append(f"{num}/{power}")
        return " + ".join(parts).replace("+ -", "- ")


def factor(coeffs: Mapping[Rational, FieldScalar | Rational] | Iterable[tuple[Rational, FieldScalar | Rational]] = (), ramification: int | None = None) -> PuiseuxFactor:
    """Build a factor from {order: coefficient}; ramification inferred if omitted."""
    items = list(coeffs.items()) if isinstance(coeffs, Mapping) else list(coeffs)
    terms = tuple((as_fraction(q), FieldScalar.coerce(c)) for q, c in items)
    if ramification is None:
        ramification = 1
        for q, _ in terms:
            ramification = math.lcm(ramification, q.denominator)
    return PuiseuxFactor(terms, ramification)


ZERO_FACTOR = PuiseuxFactor()


def same_class(a: PuiseuxFactor, b: PuiseuxFactor) -> bool:
    """Equality in the quotient by bounded functions."""
    return a.terms == b.terms


def pullback_factor(phi: PuiseuxFactor, r: int) -> PuiseuxFactor:
    """phi(z^r): each order q becomes q*r."""
    if r < 1:
        raise InvalidObject("pullback degree must be a positive integer")
    return PuiseuxFactor(tuple((q * r, c) for q, c in phi.terms), phi.ramification * r)


@dataclass(frozen=True, slots=True)
class SectorArc:
    """The open arc (start, end) in turns; start == end denotes a single ray."""

    start: Fraction
    end: Fraction

    def __post_init__(self) -> None:
        s, e = as_fraction(self.start), as_fraction(self.end)
        if e < s:
            raise InvalidObject(f"arc end {e} precedes start {s}")
        if e - s > 1:
            raise InvalidObject("an arc spans at most one full turn")
        object.__setattr__(self, "start", s)
        object.__setattr__(self, "end", e)

    @staticmethod
    def ray(theta: Rational) -> "SectorArc":
        t = as_fraction(theta)
        return SectorArc(t, t)

    @property
    def is_ray(self) -> bool:
        return self.start == self.end

    def shifted(self, k: Rational) -> "SectorArc":
        k = as_fraction(k)
        return SectorArc(self.start + k, self.end + k)

    def normalized(self) -> "SectorArc":
        k = math.floor(self.start)
        return self.shifted(-k)

    def contains_closed(self, other: "SectorArc") -> bool:
        """closure(other) inside closure(self), up to whole turns."""
        a = self.normalized()
        o = other.normalized()
        for shift in (-1, 0, 1):
            if a.start <= o.start + shift and o.end + shift <= a.end:
                return True
        return False

    def __str__(self) -> str:
        if self.is_ray:
            return f"ray({self.start})"
        return f"({self.start}, {self.end})"


class Verdict(enum.Enum):
    BOUNDED = "BOUNDED"
    NEG_DIVERGENT = "NEG_DIVERGENT"
    POS_DIVERGENT = "POS_DIVERGENT"
    ZERO = "ZERO"


# sign of cos at grid position p: p = 2m means psi = m/4, p = 2k+1 means k/4 < psi < (k+1)/4
_SIGN_BY_P_MOD_8 = (1, 1, 0, -1, -1, -1, 0, 1)


def _grid_position(c: FieldScalar, q: Fraction, theta: Fraction) -> int:
    psi = Angle.arg(c) - q * theta
    f, is_int = floor_angle(psi, 4)
    return 2 * f if is_int else 2 * f + 1


def _sign_at(p: int) -> int:
    return _SIGN_BY_P_MOD_8[p % 8]


def _ray_verdict(terms: Sequence[tuple[Fraction, FieldScalar]], theta: Fraction) -> Verdict:
    for q, c in terms:
        s = _sign_at(_grid_position(c, q, theta))
        if s > 0:
            return Verdict.POS_DIVERGENT
        if s < 0:
            return Verdict.NEG_DIVERGENT
    return Verdict.BOUNDED


@lru_cache(maxsize=200000)
def _dominance_unramified(terms: tuple[tuple[Fraction, FieldScalar], ...], s: Fraction, e: Fraction) -> Verdict:
    q, c = terms[0]
    p_lo = _grid_position(c, q, e)
    p_hi = _grid_position(c, q, s)
    if p_hi - p_lo >= 8:
        return Verdict.POS_DIVERGENT
    signs = [_sign_at(p) for p in range(p_lo, p_hi + 1)]
    if any(x > 0 for x in signs):
        return Verdict.POS_DIVERGENT
    if all(x < 0 for x in signs):
        return Verdict.NEG_DIVERGENT
    rays = []
    if _sign_at(p_lo) == 0:
        rays.append(e)
    if _sign_at(p_hi) == 0 and s != e:
        rays.append(s)
    verdicts = [_ray_verdict(terms[1:], theta) for theta in rays]
    if Verdict.POS_DIVERGENT in verdicts:
        return Verdict.POS_DIVERGENT
    if Verdict.BOUNDED in verdicts:
        return Verdict.BOUNDED
    return Verdict.NEG_DIVERGENT


def dominance(phi: PuiseuxFactor, arc: SectorArc) -> Verdict:
    """Growth class of sup Re(phi) over the closed arc as r -> 0."""
    if phi.is_zero():
        return Verdict.ZERO
    r = phi.ramification
    if r > 1:
        up = pullback_factor(phi, r)
        return _dominance_unramified(up.terms, arc.start / r, arc.end / r)
    return _dominance_unramified(phi.terms, arc.start, arc.end)


@lru_cache(maxsize=1 << 16)
def hom_permitted(source: PuiseuxFactor, target: PuiseuxFactor, arc: SectorArc) -> bool:
    """Whether Hom(Lambda^source, Lambda^target) is nonzero on the sector."""
    return dominance(source - target, arc) is not Verdict.POS_DIVERGENT


def _canonical_difference(a: PuiseuxFactor, b: PuiseuxFactor) -> PuiseuxFactor:
    d = a - b
    _, c = d.terms[0]
    if c.re > 0 or (c.re == 0 and c.im > 0):
        return d
    return -d


def _sort_unique(angles: Iterable[Angle]) -> list[Angle]:
    out: list[Angle] = []
    for a in angles:
        lo, hi = 0, len(out)
        dup = False
        while lo < hi:
            mid = (lo + hi) // 2
            cmp = compare(a, out[mid])
            if cmp == 0:
                dup = True
                break
            if cmp > 0:
                lo = mid + 1
            else:
                hi = mid
        if not dup:
            out.insert(lo, a)
    return out


@lru_cache(maxsize=4096)
def _directions_of(delta: PuiseuxFactor) -> tuple[Angle, ...]:
    r = delta.ramification
    up = pullback_factor(delta, r)
    q, c = up.terms[0]
    qi = int(q)
    found = []
    for n in range(math.floor(Fraction(-3, 2) - 2 * qi) - 1, 3):
        tw = Angle(Fraction(-1, 4) - Fraction(n, 2), Fraction(1), c).scaled(Fraction(1, qi))
        if compare_rational(tw, 0) >= 0 and compare_rational(tw, 1) < 0:
            found.append(reduce_mod1(tw.scaled(r)))
    return tuple(_sort_unique(found))


def stokes_directions(phi1: PuiseuxFactor, phi2: PuiseuxFactor) -> list[Angle]:
    """Directions in [0, 1) where the leading term of Re(phi1 - phi2) changes sign."""
    if same_class(phi1, phi2):
        raise IdenticalFactors("Stokes directions of identical factors are undefined")
    return list(_directions_of(_canonical_difference(phi1, phi2)))


@dataclass(frozen=True)
class SectorCover:
    """A cyclic chain of open arcs covering the circle.

    Arcs are sorted by start in [0, 1); arc k overlaps arc k+1 (arc n is
    arc 0 one turn later) and no three arcs meet, so gluing data lives on
    the n consecutive overlaps.
    """

    arcs: tuple[SectorArc, ...]

    def __post_init__(self) -> None:
        arcs = tuple(a.normalized() for a in self.arcs)
        arcs = tuple(sorted(arcs, key=lambda a: (a.start, a.end)))
        object.__setattr__(self, "arcs", arcs)
        n = len(arcs)
        if n < 2:
            raise InvalidObject("a sector cover needs at least two arcs")
        for k in range(n):
            cur = self.lifted(k)
            nxt = self.lifted(k + 1)
            after = self.lifted(k + 2)
            if cur.is_ray:
                raise InvalidObject("cover arcs must be open arcs, not rays")
            if not nxt.start < cur.end:
                raise InvalidObject(f"arcs {cur} and {nxt} do not overlap")
            if not cur.end < nxt.end:
                raise InvalidObject("cover arcs must be strictly increasing")
            if cur.end > after.start:
                raise InvalidObject("cover must not have triple overlaps")

    def __len__(self) -> int:
        return len(self.arcs)

    def lifted(self, k: int) -> SectorArc:
        n = len(self.arcs)
        return self.arcs[k % n].shifted(k // n)

    def overlap(self, k: int) -> SectorArc:
        """Overlap of arc k with arc k+1 (cyclically)."""
        return SectorArc(self.lifted(k + 1).start, self.lifted(k).end)

    def overlaps(self) -> list[SectorArc]:
        return [self.overlap(k) for k in range(len(self.arcs))]

    def endpoints(self) -> list[Fraction]:
        pts = set()
        for a in self.arcs:
            pts.add(a.start % 1)
            pts.add(a.end % 1)
        return sorted(pts)

    def locate(self, arc: SectorArc) -> int:
        """Lifted index L with arc inside cover arc L (arc start taken in [0,1))."""
        a = arc.normalized()
        n = len(self.arcs)
        best = None
        for L in range(-n, 2 * n):
            c = self.lifted(L)
            if c.start <= a.start and a.end <= c.end:
                best = L
        if best is None:
            raise InvalidObject(f"arc {arc} lies in no arc of the cover")
        return best


def _gap_points(a: Angle, b: Angle, count: int = 4) -> list[Fraction]:
    """``count`` increasing rationals strictly between a < b at even spacing."""
    from .certified import _precisions, _simplify_between
    from .errors import UndecidableSign

    for prec in _precisions():
        la, ha = a.enclosure(prec)
        lb, hb = b.enclosure(prec)
        if ha < lb:
            width = lb - ha
            pts = []
            for j in range(1, count + 1):
                x = ha + width * Fraction(j, count + 1)
                pts.append(_simplify_between(x, x - width / (4 * (count + 1)), x + width / (4 * (count + 1))))
            if all(p < q for p, q in zip(pts, pts[1:])) and ha < pts[0] and pts[-1] < lb:
                return pts
    raise UndecidableSign("cannot separate consecutive breakpoints")


def chain_cover(points: Iterable[Angle]) -> SectorCover:
    """Cover whose arc closures each contain at most one point, in the interior."""
    pts = _sort_unique(reduce_mod1(p) for p in points)
    m = len(pts)
    if m == 0:
        return SectorCover((SectorArc(Fraction(0), Fraction(5, 8)), SectorArc(Fraction(1, 2), Fraction(9, 8))))
    gaps = []
    for k in range(m):
        nxt = pts[k + 1] if k + 1 < m else pts[0] + 1
        gaps.append(_gap_points(pts[k], nxt))
    arcs = []
    for k in range(m):
        a, b, c, e = gaps[k]
        prev_c = gaps[k - 1][2] if k > 0 else gaps[m - 1][2] - 1
        arcs.append(SectorArc(prev_c, b))
        arcs.append(SectorArc(a, e))
    return SectorCover(tuple(arcs))


def _distinct_classes(factors: Iterable[PuiseuxFactor]) -> list[PuiseuxFactor]:
    out: list[PuiseuxFactor] = []
    for f in factors:
        if not any(same_class(f, g) for g in out):
            out.append(f)
    return out


def pair_directions(factors: Iterable[PuiseuxFactor]) -> list[Angle]:
    classes = _distinct_classes(factors)
    dirs: list[Angle] = []
    for i in range(len(classes)):
        for j in range(i + 1, len(classes)):
            dirs.extend(stokes_directions(classes[i], classes[j]))
    return _sort_unique(dirs)


def standard_cover(factors: Iterable[PuiseuxFactor]) -> SectorCover:
    return chain_cover(pair_directions(factors))


def common_refinement(covers: Sequence[SectorCover], factors: Iterable[PuiseuxFactor]) -> SectorCover:
    """A chain cover refining every cover given, separating all Stokes directions."""
    pts = [Angle.rational(x) for cov in covers for x in cov.endpoints()]
    pts.extend(pair_directions(factors))
    return chain_cover(pts)


def cover_is_sound(cover: SectorCover, factors: Iterable[PuiseuxFactor]) -> bool:
    """Every arc closure holds at most one Stokes direction of each pair, in its interior."""
    return _cover_is_sound(cover, tuple(_distinct_classes(factors)))


@lru_cache(maxsize=4096)
def _cover_is_sound(cover: SectorCover, classes: tuple[PuiseuxFactor, ...]) -> bool:
    for i in range(len(classes)):
        for j in range(i + 1, len(classes)):
            dirs = stokes_directions(classes[i], classes[j])
            for arc in cover.arcs:
                inside = 0
                for d in dirs:
                    for shift in (0, 1):
                        lo = compare_rational(d + shift, arc.start)
                        hi = compare_rational(d + shift, arc.end)
                        if lo == 0 or hi == 0:
                            return False
                        if lo > 0 and hi < 0:
                            inside += 1
                if inside > 1:
                    return False
    return True
