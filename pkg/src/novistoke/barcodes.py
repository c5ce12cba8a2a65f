"""R-graded Lambda-modules in interval normal form.

A graded Lambda-module is the same thing as a persistence module indexed by
the grading: T^c maps degree t to degree t + c. Intervals are closed-open,
``free[b, inf)`` or ``torsion[b, b + length)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import linalg
from .errors import InvalidObject
from .linalg import Matrix
from .novikov import ONE, ZERO, FieldScalar, Rational, as_fraction


@dataclass(frozen=True, slots=True)
class Interval:
    birth: Fraction
    length: Optional[Fraction] = None  # None means +infinity

    def __post_init__(self) -> None:
        object.__setattr__(self, "birth", as_fraction(self.birth))
        if self.length is not None:
            length = as_fraction(self.length)
            if length <= 0:
                raise InvalidObject(f"interval length must be positive, got {length}")
            object.__setattr__(self, "length", length)

    @property
    def is_free(self) -> bool:
        return self.length is None

    @property
    def death(self) -> Optional[Fraction]:
        return None if self.length is None else self.birth + self.length

    def alive(self, t: Fraction) -> bool:
        return self.birth <= t and (self.length is None or t < self.birth + self.length)

    def sort_key(self) -> tuple:
        return (self.birth, 1 if self.length is None else 0, self.length or 0)

    def __str__(self) -> str:
        if self.length is None:
            return f"free[{self.birth},inf)"
        return f"torsion[{self.birth},{self.birth + self.length})"


def free(birth: Rational) -> Interval:
    return Interval(as_fraction(birth), None)


def torsion(birth: Rational, length: Rational) -> Interval:
    return Interval(as_fraction(birth), as_fraction(length))


@dataclass(frozen=True, slots=True)
class Barcode:
    intervals: tuple[Interval, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "intervals", tuple(sorted(self.intervals, key=Interval.sort_key)))

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def free_part(self) -> "Barcode":
        return Barcode(tuple(i for i in self.intervals if i.is_free))

    def torsion_part(self) -> "Barcode":
        return Barcode(tuple(i for i in self.intervals if not i.is_free))

    def reduced_rank(self) -> int:
        """Dimension after the reduction to the torsion-free quotient category."""
        return sum(1 for i in self.intervals if i.is_free)

    def shift(self, c: Rational) -> "Barcode":
        c = as_fraction(c)
        return Barcode(tuple(Interval(i.birth + c, i.length) for i in self.intervals))

    def __add__(self, other: "Barcode") -> "Barcode":
        return Barcode(self.intervals + other.intervals)

    def __str__(self) -> str:
        return "{" + ", ".join(str(i) for i in self.intervals) + "}"


def barcode(*intervals: Interval) -> Barcode:
    return Barcode(tuple(intervals))


def reduced_equivalent(a: Barcode, b: Barcode) -> bool:
    """Isomorphism in the reduced category: torsion dies, T-shifts are invertible."""
    return a.reduced_rank() == b.reduced_rank()


def dual(b: Barcode) -> Barcode:
    """Graded dual: free[b] -> free[-b], torsion[b, b+l) -> torsion[-b-l, -b)."""
    out = []
    for i in b.intervals:
        if i.is_free:
            out.append(Interval(-i.birth, None))
        else:
            out.append(Interval(-i.birth - i.length, i.length))
    return Barcode(tuple(out))


def pair_hom_dimension(src: Interval, tgt: Interval, degree: Rational) -> int:
    """dim Hom^degree between two interval modules (0 or 1).

    The generator of ``src`` (degree b) goes to degree b + d of ``tgt``; it
    must land inside the target interval, and the relation T^l of a torsion
    source must be killed there.
    """
    d = as_fraction(degree)
    image_deg = src.birth + d
    if image_deg < tgt.birth:
        return 0
    if tgt.length is not None:
        tgt_death = tgt.birth + tgt.length
        if image_deg >= tgt_death:
            return 0
        if src.length is not None and image_deg + src.length < tgt_death:
            return 0
        return 1
    return 1 if src.length is None else 0


def hom_degree(source: Barcode, target: Barcode, degree: Rational) -> list[tuple[int, int]]:
    """Basis of Hom^degree as elementary (target index, source index) pairs."""
    return [
        (j, i)
        for i, s in enumerate(source.intervals)
        for j, t in enumerate(target.intervals)
        if pair_hom_dimension(s, t, degree)
    ]


def hom_reduced(source: Barcode, target: Barcode) -> tuple[int, list[tuple[int, int]]]:
    """The k-dimension of Hom tensored down along T -> 1, with basis tags.

    A class survives iff no T^a kills it, which happens exactly for
    free-to-free components; all T-shifts of it are identified.
    """
    tags = [
        (j, i)
        for i, s in enumerate(source.intervals)
        for j, t in enumerate(target.intervals)
        if s.is_free and t.is_free
    ]
    return len(tags), tags


def tensor(a: Barcode, b: Barcode) -> Barcode:
    out = []
    for x in a.intervals:
        for y in b.intervals:
            birth = x.birth + y.birth
            if x.length is None:
                out.append(Interval(birth, y.length))
            elif y.length is None:
                out.append(Interval(birth, x.length))
            else:
                out.append(Interval(birth, min(x.length, y.length)))
    return Barcode(tuple(out))


@dataclass(frozen=True)
class GradedMorphism:
    """A homogeneous morphism of degree ``degree`` between interval modules.

    ``matrix[j][i]`` is the field coefficient of the component from source
    interval i to target interval j; the implicit power of T is
    T^(birth_i + degree - birth_j).
    """

    source: Barcode
    target: Barcode
    degree: Fraction
    matrix: Matrix

    def __post_init__(self) -> None:
        object.__setattr__(self, "degree", as_fraction(self.degree))
        m = linalg.matrix(self.matrix) if self.matrix else tuple(() for _ in self.target.intervals)
        object.__setattr__(self, "matrix", m)
        if len(m) != len(self.target):
            raise InvalidObject("morphism matrix must have one row per target interval")
        for row in m:
            if len(row) != len(self.source):
                raise InvalidObject("morphism matrix must have one column per source interval")
        for j, t in enumerate(self.target.intervals):
            for i, s in enumerate(self.source.intervals):
                if not m[j][i].is_zero() and not pair_hom_dimension(s, t, self.degree):
                    raise InvalidObject(f"entry ({j},{i}) is not a graded morphism {s} -> {t} in degree {self.degree}")

    def times_T(self, a: Rational) -> "GradedMorphism":
        """T^a * f: same coefficients, degree raised by a, vanished components dropped."""
        a = as_fraction(a)
        if a < 0:
            raise ValueError("T-power must be nonnegative")
        d = self.degree + a
        rows = []
        for j, t in enumerate(self.target.intervals):
            rows.append(tuple(
                self.matrix[j][i] if pair_hom_dimension(s, t, d) else ZERO
                for i, s in enumerate(self.source.intervals)
            ))
        return GradedMorphism(self.source, self.target, d, tuple(rows))

    def compose(self, other: "GradedMorphism") -> "GradedMorphism":
        """self o other, degrees add."""
        if other.target != self.source:
            raise InvalidObject("composition of incompatible morphisms")
        d = self.degree + other.degree
        prod = linalg.matmul(self.matrix, other.matrix) if self.source.intervals else linalg.zeros(len(self.target), len(other.source))
        rows = []
        for j, t in enumerate(self.target.intervals):
            rows.append(tuple(
                prod[j][i] if pair_hom_dimension(s, t, d) else ZERO
                for i, s in enumerate(other.source.intervals)
            ))
        return GradedMorphism(other.source, self.target, d, tuple(rows))


def _critical_degrees(values: Iterable[Fraction]) -> list[Fraction]:
    return sorted(set(values))


def _alive(bar: Barcode, t: Fraction) -> list[int]:
    return [k for k, iv in enumerate(bar.intervals) if iv.alive(t)]


def _barcode_from_ranks(crit: Sequence[Fraction], rk) -> Barcode:
    """Recover closed-open intervals from the rank invariant on a grid.

    ``rk(k, l)`` is the rank of the structure map from degree crit[k] to
    crit[l]; the last grid point lies beyond every finite endpoint, so
    classes alive there are free.
    """
    n = len(crit)
    last = n - 1

    def r(k: int, l: int) -> int:
        if k < 0 or l < k:
            return 0
        return rk(k, l)

    out: list[Interval] = []
    for k in range(n):
        for l in range(k + 1, n):
            m = r(k, l - 1) - r(k, l) - r(k - 1, l - 1) + r(k - 1, l)
            for _ in range(m):
                out.append(Interval(crit[k], crit[l] - crit[k]))
        m = r(k, last) - r(k - 1, last)
        for _ in range(m):
            out.append(Interval(crit[k], None))
    return Barcode(tuple(out))


def _restrict(vectors: list[tuple], keep_from: list[int], keep_to: list[int]) -> list[tuple]:
    """Apply the structure map (coordinate restriction) to vectors."""
    pos = {idx: p for p, idx in enumerate(keep_from)}
    return [tuple(v[pos[idx]] if idx in pos else ZERO for idx in keep_to) for v in vectors]


def _fmatrix_at(f: GradedMorphism, src_alive: list[int], tgt_alive: list[int]) -> Matrix:
    return tuple(tuple(f.matrix[j][i] for i in src_alive) for j in tgt_alive)


def kernel(f: GradedMorphism) -> Barcode:
    """Barcode of ker f, graded as a submodule of the source."""
    d = f.degree
    pts = []
    for iv in f.source.intervals:
        pts.append(iv.birth)
        if iv.death is not None:
            pts.append(iv.death)
    for iv in f.target.intervals:
        pts.append(iv.birth - d)
        if iv.death is not None:
            pts.append(iv.death - d)
    if not pts:
        return Barcode()
    crit = _critical_degrees(pts)
    crit = crit + [crit[-1] + 1]
    spaces = []
    for t in crit:
        sa = _alive(f.source, t)
        ta = _alive(f.target, t + d)
        a = _fmatrix_at(f, sa, ta)
        basis = linalg.nullspace(a, len(sa)) if ta else [
            tuple(ONE if p == q else ZERO for p in range(len(sa))) for q in range(len(sa))
        ]
        spaces.append((sa, basis))

    def rk(k: int, l: int) -> int:
        sa_k, basis = spaces[k]
        if not basis:
            return 0
        sa_l, _ = spaces[l]
        if not sa_l:
            return 0
        return linalg.rank(_restrict(basis, sa_k, sa_l), len(sa_l))

    return _barcode_from_ranks(crit, rk)


def cokernel(f: GradedMorphism) -> Barcode:
    """Barcode of coker f, graded as a quotient of the target."""
    d = f.degree
    pts = []
    for iv in f.target.intervals:
        pts.append(iv.birth)
        if iv.death is not None:
            pts.append(iv.death)
    for iv in f.source.intervals:
        pts.append(iv.birth + d)
        if iv.death is not None:
            pts.append(iv.death + d)
    if not pts:
        return Barcode()
    crit = _critical_degrees(pts)
    crit = crit + [crit[-1] + 1]
    data = []
    for u in crit:
        ta = _alive(f.target, u)
        sa = _alive(f.source, u - d)
        a = _fmatrix_at(f, sa, ta)
        image = linalg.column_space(a, len(ta)) if sa and ta else []
        data.append((ta, image))

    def rk(k: int, l: int) -> int:
        ta_k, _ = data[k]
        ta_l, image_l = data[l]
        if not ta_k or not ta_l:
            return 0
        units = [tuple(ONE if p == q else ZERO for p in range(len(ta_k))) for q in range(len(ta_k))]
        pushed = _restrict(units, ta_k, ta_l)
        base = len(image_l)
        return linalg.rank(list(image_l) + pushed, len(ta_l)) - base

    return _barcode_from_ranks(crit, rk)


def identity_morphism(b: Barcode) -> GradedMorphism:
    return GradedMorphism(b, b, Fraction(0), linalg.identity(len(b)))


def scalar_morphism(source: Barcode, target: Barcode, degree: Rational, entries: Sequence[Sequence[FieldScalar | int]]) -> GradedMorphism:
    return GradedMorphism(source, target, as_fraction(degree), linalg.matrix(entries))
