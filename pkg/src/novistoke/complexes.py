"""Constructible complexes on the pointed disk built from three generators.

A summand (d, kind, payload) stands for G[-d], i.e. G placed in
cohomological degree d:

* J_SHRIEK  j_! L for a Stokes local system L on the punctured disk,
* J_STAR    Rj_* L,
* SKYSCRAPER  i_* B for a barcode B at the origin.

Conventions: middle perversity on a complex curve. j_! L[1], Rj_* L[1] and
i_* B are perverse, so the perverse degree of a summand is d + 1 for the
open-stratum kinds and d for skyscrapers. Supports are measured after the
grading-forgetful functor, which kills torsion barcodes.
"""

from __future__ import annotations

import enum
from functools import lru_cache
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from . import linalg as la
from .barcodes import Barcode, dual as barcode_dual
from .errors import InvalidObject, NotRepresentable
from .irregular import (
    StokesLocalSystem,
    dual_system,
    ext1_basis,
    ext_dims,
    forget,
    hom_global,
    refine_together,
)
from .linalg import Matrix
from .novikov import ONE, ZERO, FieldScalar


class Kind(enum.Enum):
    J_SHRIEK = "J_SHRIEK"
    J_STAR = "J_STAR"
    SKYSCRAPER = "SKYSCRAPER"


_KIND_ORDER = {Kind.J_SHRIEK: 0, Kind.J_STAR: 1, Kind.SKYSCRAPER: 2}

Payload = Union[StokesLocalSystem, Barcode]


@dataclass(frozen=True)
class Summand:
    degree: int
    kind: Kind
    payload: Payload

    def __post_init__(self) -> None:
        if self.kind is Kind.SKYSCRAPER:
            if not isinstance(self.payload, Barcode):
                raise InvalidObject("skyscraper summands carry a barcode")
        elif not isinstance(self.payload, StokesLocalSystem):
            raise InvalidObject(f"{self.kind.value} summands carry a Stokes local system")

    @property
    def perverse_degree(self) -> int:
        return self.degree if self.kind is Kind.SKYSCRAPER else self.degree + 1

    def is_zero(self) -> bool:
        if self.kind is Kind.SKYSCRAPER:
            return len(self.payload) == 0
        return self.payload.rank == 0


@dataclass(frozen=True)
class CurveComplex:
    summands: tuple[Summand, ...] = ()

    def __post_init__(self) -> None:
        kept = [s for s in self.summands if not s.is_zero()]
        kept.sort(key=lambda s: (s.degree, _KIND_ORDER[s.kind]))
        object.__setattr__(self, "summands", tuple(kept))

    def is_zero(self) -> bool:
        return not self.summands

    def __add__(self, other: "CurveComplex") -> "CurveComplex":
        return CurveComplex(self.summands + other.summands)

    def shift(self, n: int) -> "CurveComplex":
        """c[n]: every summand moves to degree d - n."""
        return CurveComplex(tuple(Summand(s.degree - n, s.kind, s.payload) for s in self.summands))


def complex_of(*summands: tuple[int, Kind, Payload]) -> CurveComplex:
    return CurveComplex(tuple(Summand(d, k, p) for d, k, p in summands))


def j_shriek(system: StokesLocalSystem, degree: int = -1) -> CurveComplex:
    return complex_of((degree, Kind.J_SHRIEK, system))


def j_star(system: StokesLocalSystem, degree: int = -1) -> CurveComplex:
    return complex_of((degree, Kind.J_STAR, system))


def skyscraper(b: Barcode, degree: int = 0) -> CurveComplex:
    return complex_of((degree, Kind.SKYSCRAPER, b))


def verdier_dual(c: CurveComplex) -> CurveComplex:
    out = []
    for s in c.summands:
        if s.kind is Kind.SKYSCRAPER:
            out.append(Summand(-s.degree, Kind.SKYSCRAPER, barcode_dual(s.payload)))
        else:
            swapped = Kind.J_STAR if s.kind is Kind.J_SHRIEK else Kind.J_SHRIEK
            out.append(Summand(-2 - s.degree, swapped, dual_system(s.payload)))
    return CurveComplex(tuple(out))


# supports

EMPTY = None  # dimension of the empty support


@lru_cache(maxsize=1 << 14)
def _invariants_dim(system: StokesLocalSystem) -> int:
    """dim ker(M - 1) = dim coker(M - 1) for the classical monodromy M."""
    r, mono = forget(system)
    if r == 0:
        return 0
    return r - la.rank(la.sub(mono, la.identity(r)), r)


def support_profile(c: CurveComplex) -> dict[int, int | None]:
    """Degree -> dim supp of the forgetful image of H^j (None is the empty set)."""
    prof: dict[int, int | None] = {}

    def bump(j: int, dim: int) -> None:
        cur = prof.get(j)
        prof[j] = dim if cur is None else max(cur, dim)

    for s in c.summands:
        if s.kind is Kind.SKYSCRAPER:
            if s.payload.reduced_rank() > 0:
                bump(s.degree, 0)
        elif s.kind is Kind.J_SHRIEK:
            bump(s.degree, 1)
        else:
            bump(s.degree, 1)
            if _invariants_dim(s.payload) > 0:
                bump(s.degree + 1, 0)
    return dict(sorted(prof.items()))


def _first_violation(c: CurveComplex) -> int | None:
    bad = [j for j, d in support_profile(c).items() if d is not None and d > -j]
    return min(bad) if bad else None


@dataclass(frozen=True)
class PerversityVerdict:
    perverse: bool
    witness: int | None = None

    def __str__(self) -> str:
        return "YES" if self.perverse else f"NO({self.witness})"


def is_perverse(c: CurveComplex) -> PerversityVerdict:
    v1 = _first_violation(c)
    v2 = _first_violation(verdier_dual(c))
    bad = [v for v in (v1, v2) if v is not None]
    if not bad:
        return PerversityVerdict(True)
    return PerversityVerdict(False, min(bad))


def in_perverse_range(c: CurveComplex, lo: int | None = None, hi: int | None = None) -> bool:
    """Whether c lies in pD^[lo, hi], read off summand-wise."""
    for s in c.summands:
        if s.kind is Kind.SKYSCRAPER and s.payload.reduced_rank() == 0:
            continue
        p = s.perverse_degree
        if lo is not None and p < lo:
            return False
        if hi is not None and p > hi:
            return False
    return True


def truncate(c: CurveComplex, side: str, n: int | None = None) -> CurveComplex:
    """Perverse truncation tau^{<=n} (side "<=") or tau^{>=n} (side ">=").

    With n omitted the sides are the standard "<=0" and ">=1". Every
    generator is a shifted perverse object, so the truncation triangle of a
    direct sum splits summand by summand.
    """
    if side in ("<=0", "le0", "<="):
        op, bound = "<=", 0 if n is None else n
    elif side in (">=1", "ge1", ">="):
        op, bound = ">=", 1 if n is None else n
    else:
        raise InvalidObject(f"unknown truncation side {side!r}")
    keep = []
    for s in c.summands:
        p = s.perverse_degree
        if (op == "<=" and p <= bound) or (op == ">=" and p >= bound):
            keep.append(s)
    result = CurveComplex(tuple(keep))
    if any(x not in c.summands for x in result.summands):
        raise NotRepresentable("truncation left the generated class")
    return result


# homs


def _classical_h(system: StokesLocalSystem) -> tuple[int, int]:
    h = _invariants_dim(system)
    return h, h


def _cl_dims(system: StokesLocalSystem) -> dict[int, int]:
    h0, h1 = _classical_h(system)
    return {0: h0, 1: h1}


def _hom_graded(a: dict[int, int], b: dict[int, int], k: int) -> int:
    return sum(a[m] * b.get(m + k, 0) for m in a)


@lru_cache(maxsize=4096)
def _classical_cech(v: StokesLocalSystem) -> tuple[list, list, list, int, int]:
    """H^0 basis (0-cocycles), H^1 representatives, coboundary basis, dims of C^0 and C^1."""
    n = len(v.cover)
    r = v.rank
    c0 = n * r
    rows = []
    for k in range(n):
        kn = (k + 1) % n
        g = v.gluings[k]
        for i in range(r):
            row = [ZERO] * c0
            for a in range(r):
                row[k * r + a] = row[k * r + a] + g[i][a]
            row[kn * r + i] = row[kn * r + i] - ONE
            rows.append(row)
    h0 = la.nullspace(rows, c0) if c0 else []
    image = la.column_space(tuple(tuple(x) for x in rows), len(rows)) if rows else []
    # unit vectors off the pivot columns of the image span a complement
    pivots = set(la.rref(image, c0)[1]) if image else set()
    reps = [tuple(ONE if x == e else ZERO for x in range(c0)) for e in range(c0) if e not in pivots]
    return h0, reps, image, c0, c0


def _rank_mod(vectors: Sequence[Sequence[FieldScalar]], sub: Sequence[Sequence[FieldScalar]], dim: int) -> int:
    if dim == 0 or not vectors:
        return 0
    r_sub = la.rank(list(sub), dim) if sub else 0
    return la.rank(list(sub) + list(vectors), dim) - r_sub


def _block(vec: Sequence[FieldScalar], k: int, r: int) -> list[FieldScalar]:
    return list(vec[k * r:(k + 1) * r])


def _apply(m: Matrix, x: Sequence[FieldScalar]) -> list[FieldScalar]:
    return list(la.matvec(m, x)) if m else []


@lru_cache(maxsize=1 << 14)
def _delta_ranks(src: StokesLocalSystem, tgt: StokesLocalSystem) -> tuple[int, int]:
    """Ranks of Ext^k(L, L') -> Hom^k(RGamma L, RGamma L') for k = 0, 1."""
    s, t = refine_together(src, tgt)
    n = len(s.cover)
    rs, rt = s.rank, t.rank
    h0s, h1s, _, _, _ = _classical_cech(s)
    h0t, _, imt, c0t, c1t = _classical_cech(t)

    # layout of Hom(H^0, H^0') + Hom(H^1, H^1') images: concatenated cochains
    blocks = len(h0s) * c0t + len(h1s) * c1t
    sub = []
    offset = len(h0s) * c0t
    for q in range(len(h1s)):
        for w in imt:
            vec = [ZERO] * blocks
            vec[offset + q * c1t: offset + (q + 1) * c1t] = list(w)
            sub.append(vec)
    images0 = []
    for mats in hom_global(s, t).basis:
        vec: list[FieldScalar] = []
        for x in h0s:
            for k in range(n):
                vec.extend(_apply(mats[k], _block(x, k, rs)) if rt else [])
        for tau in h1s:
            for k in range(n):
                vec.extend(_apply(mats[(k + 1) % n], _block(tau, k, rs)) if rt else [])
        images0.append(vec)
    rank0 = _rank_mod(images0, sub, blocks)

    _, reps = ext1_basis(s, t)
    blocks1 = len(h0s) * c1t
    sub1 = []
    for q in range(len(h0s)):
        for w in imt:
            vec = [ZERO] * blocks1
            vec[q * c1t:(q + 1) * c1t] = list(w)
            sub1.append(vec)
    images1 = []
    for eta in reps:
        vec = []
        for x in h0s:
            for k in range(n):
                vec.extend(_apply(eta[k], _block(x, k, rs)) if rt else [])
        images1.append(vec)
    rank1 = _rank_mod(images1, sub1, blocks1)
    return rank0, rank1


def _ext_generators(a: Summand, b: Summand, k: int) -> int:
    """dim Ext^k between two generators (payload-level, no shifts)."""
    ka, kb = a.kind, b.kind
    if ka is Kind.SKYSCRAPER and kb is Kind.SKYSCRAPER:
        return a.payload.reduced_rank() * b.payload.reduced_rank() if k == 0 else 0
    if ka is Kind.J_SHRIEK and kb is Kind.SKYSCRAPER:
        return 0
    if ka is Kind.SKYSCRAPER and kb is Kind.J_STAR:
        return 0
    if ka is Kind.SKYSCRAPER and kb is Kind.J_SHRIEK:
        # i^! j_! L' is the cohomology of L' near the puncture, shifted by one
        return a.payload.reduced_rank() * _cl_dims(b.payload).get(k - 1, 0)
    if ka is Kind.J_STAR and kb is Kind.SKYSCRAPER:
        return b.payload.reduced_rank() * _cl_dims(a.payload).get(-k, 0)
    if ka is Kind.J_STAR and kb is Kind.J_SHRIEK:
        if k < 0 or k > 2:
            return 0
        e = dict(enumerate(ext_dims(a.payload, b.payload)))
        ca, cb = _cl_dims(a.payload), _cl_dims(b.payload)
        r0, r1 = _delta_ranks(a.payload, b.payload)
        rk = {0: r0, 1: r1}
        coker_prev = _hom_graded(ca, cb, k - 1) - rk.get(k - 1, 0)
        ker_here = e.get(k, 0) - rk.get(k, 0)
        return coker_prev + ker_here
    # j_! -> j_!, j_! -> j_*, j_* -> j_*: homs on the open stratum
    if k not in (0, 1):
        return 0
    return ext_dims(a.payload, b.payload)[k]


def hom_complex(c1: CurveComplex, c2: CurveComplex) -> dict[int, int]:
    """Degree n -> dim Hom(c1, c2[n]); zero entries omitted."""
    out: dict[int, int] = {}
    for a in c1.summands:
        for b in c2.summands:
            # Hom^n(A[-d1], B[-d2]) = Ext^{n + d1 - d2}(A, B); Ext^k lives in -2 <= k <= 2
            for k in range(-2, 3):
                dim = _ext_generators(a, b, k)
                if dim:
                    n = k - a.degree + b.degree
                    out[n] = out.get(n, 0) + dim
    return dict(sorted((n, d) for n, d in out.items() if d))


# recollement


@dataclass(frozen=True)
class Recollement:
    """j^* c on the open stratum and i^{-1} c at the origin (reduced ranks)."""

    open_part: tuple[tuple[int, Kind, StokesLocalSystem], ...]
    closed_part: dict[int, int]


def recollement(c: CurveComplex) -> Recollement:
    open_part = []
    closed: dict[int, int] = {}
    for s in c.summands:
        if s.kind is Kind.SKYSCRAPER:
            r = s.payload.reduced_rank()
            if r:
                closed[s.degree] = closed.get(s.degree, 0) + r
        else:
            open_part.append((s.degree, s.kind, s.payload))
            if s.kind is Kind.J_STAR:
                for m, h in _cl_dims(s.payload).items():
                    if h:
                        closed[s.degree + m] = closed.get(s.degree + m, 0) + h
    return Recollement(tuple(open_part), dict(sorted(closed.items())))


def reconstruct(data: Recollement, skyscraper_barcodes: Iterable[tuple[int, Barcode]] = ()) -> CurveComplex:
    """Rebuild c from its recollement data.

    Open-stratum summands come back with their extension type. The part of
    i^{-1} c not accounted for by the Rj_* summands is returned as free
    skyscrapers, unless explicit barcodes are supplied for it.
    """
    closed = dict(data.closed_part)
    for d, kind, system in data.open_part:
        if kind is Kind.J_STAR:
            for m, h in _cl_dims(system).items():
                if h:
                    closed[d + m] = closed.get(d + m, 0) - h
    if any(v < 0 for v in closed.values()):
        raise InvalidObject("recollement data is inconsistent")
    summands = [Summand(d, k, p) for d, k, p in data.open_part]
    given = list(skyscraper_barcodes)
    if given:
        for d, b in given:
            if closed.get(d, 0) != b.reduced_rank():
                raise InvalidObject("supplied skyscraper barcodes disagree with the closed stratum")
            summands.append(Summand(d, Kind.SKYSCRAPER, b))
    else:
        from .barcodes import free
        for d, r in closed.items():
            if r:
                summands.append(Summand(d, Kind.SKYSCRAPER, Barcode(tuple(free(0) for _ in range(r)))))
    return CurveComplex(tuple(summands))


__all__ = [
    "CurveComplex",
    "Kind",
    "PerversityVerdict",
    "Recollement",
    "Summand",
    "complex_of",
    "hom_complex",
    "in_perverse_range",
    "is_perverse",
    "j_shriek",
    "j_star",
    "reconstruct",
    "recollement",
    "skyscraper",
    "support_profile",
    "truncate",
    "verdier_dual",
]
