"""Irregular constant sheaves and Stokes-filtered local systems.

A StokesLocalSystem is a list of unramified factors (one per slot) on a
chain cover together with one gluing matrix per consecutive overlap. The
gluing on overlap k carries coordinates in the frame of arc k to the frame
of arc k+1; entry (i, j) maps slot j to slot i and is allowed only when
phi_j - phi_i is not POS_DIVERGENT there.

Global homs and Ext^1 come from the two-term Cech complex of the Hom
sheaf on a common refinement, which is exact because no three arcs meet.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Sequence

from . import linalg as la
from .barcodes import Barcode, free
from .errors import ArcMismatch, InvalidObject
from .linalg import Matrix
from .novikov import ONE, ZERO, FieldScalar, Rational, as_fraction
from .sectors import (
    PuiseuxFactor,
    SectorArc,
    SectorCover,
    Verdict,
    ZERO_FACTOR,
    common_refinement,
    dominance,
    hom_permitted,
    same_class,
    standard_cover,
)
from .certified import Angle, compare_rational


@dataclass(frozen=True)
class IrregularConstant:
    """Lambda^phi on a sector of the given arc.

    ``inner_radius`` > 0 truncates the sector away from the puncture, where
    every factor is bounded.
    """

    factor: PuiseuxFactor
    arc: SectorArc
    inner_radius: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        r = as_fraction(self.inner_radius)
        if r < 0:
            raise InvalidObject("inner radius must be non-negative")
        object.__setattr__(self, "inner_radius", r)


def _same_sector(a: IrregularConstant, b: IrregularConstant) -> None:
    if a.arc != b.arc or a.inner_radius != b.inner_radius:
        raise ArcMismatch(f"sectors differ: {a.arc} vs {b.arc}")


def hom_constant(a: IrregularConstant, b: IrregularConstant) -> int:
    _same_sector(a, b)
    if a.inner_radius > 0:
        return 1
    return 1 if hom_permitted(a.factor, b.factor, a.arc) else 0


def tensor_constant(a: IrregularConstant, b: IrregularConstant) -> IrregularConstant:
    _same_sector(a, b)
    return IrregularConstant(a.factor + b.factor, a.arc, a.inner_radius)


def sheafhom_constant(a: IrregularConstant, b: IrregularConstant) -> IrregularConstant:
    _same_sector(a, b)
    return IrregularConstant(b.factor - a.factor, a.arc, a.inner_radius)


def dual_constant(a: IrregularConstant) -> tuple[IrregularConstant, int]:
    """Verdier dual as (Lambda^-phi, shift); the shift is 2 on a surface."""
    return IrregularConstant(-a.factor, a.arc, a.inner_radius), 2


def truncation_limit(a: IrregularConstant, b: IrregularConstant, radii: Sequence[Rational]) -> list[int]:
    """hom_constant on the sectors cut off at each radius, for limits b -> 0."""
    out = []
    for r in radii:
        out.append(hom_constant(IrregularConstant(a.factor, a.arc, as_fraction(r)),
                                IrregularConstant(b.factor, b.arc, as_fraction(r))))
    return out


def _point_turn(z: FieldScalar) -> Angle:
    t = Angle.arg(z)
    return t + 1 if compare_rational(t, 0) < 0 else t


def stalk(a: IrregularConstant, z: FieldScalar) -> Barcode:
    """Stalk at a Gaussian rational point: free[-Re phi(z), oo)."""
    if z.is_zero():
        raise InvalidObject("the puncture is not in any sector")
    if a.inner_radius > 0 and z.norm() <= a.inner_radius ** 2:
        raise InvalidObject("point lies inside the truncated radius")
    t = _point_turn(z)
    arc = a.arc.normalized()
    inside = arc.end - arc.start == 1
    for shift in (-1, 0, 1):
        lo = compare_rational(t + shift, arc.start)
        hi = compare_rational(t + shift, arc.end)
        if arc.is_ray:
            inside = inside or (lo == 0)
        else:
            inside = inside or (lo > 0 and hi < 0)
    if not inside:
        raise InvalidObject(f"point {z} lies outside the sector {a.arc}")
    value = a.factor.value_at(z)
    return Barcode((free(-value.re),))


def _check_unramified(factors: Sequence[PuiseuxFactor]) -> None:
    for f in factors:
        if f.ramification != 1:
            raise InvalidObject("local systems take unramified factors; pull back ramified types first")


def _permission_mask(rows: Sequence[PuiseuxFactor], cols: Sequence[PuiseuxFactor], arc: SectorArc) -> tuple[tuple[bool, ...], ...]:
    """mask[i][j]: a map from slot j of ``cols`` to slot i of ``rows`` is allowed on arc."""
    return _mask(tuple(rows), tuple(cols), arc)


@lru_cache(maxsize=1 << 14)
def _mask(rows: tuple[PuiseuxFactor, ...], cols: tuple[PuiseuxFactor, ...], arc: SectorArc) -> tuple[tuple[bool, ...], ...]:
    return tuple(tuple(hom_permitted(cj, ri, arc) for cj in cols) for ri in rows)


def _respects(mask, m: Matrix) -> bool:
    return all(mask[i][j] or m[i][j].is_zero() for i in range(len(m)) for j in range(len(m[i])))


@dataclass(frozen=True)
class StokesLocalSystem:
    factors: tuple[PuiseuxFactor, ...]
    cover: SectorCover
    gluings: tuple[Matrix, ...]

    def __post_init__(self) -> None:
        factors = tuple(self.factors)
        _check_unramified(factors)
        n = len(factors)
        gluings = tuple(la.matrix(g) for g in self.gluings)
        if len(gluings) != len(self.cover):
            raise InvalidObject(f"expected {len(self.cover)} gluing matrices, got {len(gluings)}")
        for k, g in enumerate(gluings):
            if len(g) != n or any(len(r) != n for r in g):
                raise InvalidObject(f"gluing {k} must be {n}x{n}")
            if n and not la.is_invertible(g):
                raise InvalidObject(f"gluing {k} is not invertible")
            mask = _permission_mask(factors, factors, self.cover.overlap(k))
            if not _respects(mask, g):
                raise InvalidObject(f"gluing {k} has an entry forbidden by dominance on {self.cover.overlap(k)}")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "gluings", gluings)
        object.__setattr__(self, "_hash", hash((factors, self.cover, gluings)))

    def __hash__(self) -> int:
        return self._hash

    @property
    def rank(self) -> int:
        return len(self.factors)


def trivial_system(factors: Sequence[PuiseuxFactor], cover: SectorCover | None = None) -> StokesLocalSystem:
    """Direct sum of Lambda^phi with identity gluings."""
    factors = tuple(factors)
    cover = cover or standard_cover(list(factors) + [ZERO_FACTOR])
    g = la.identity(len(factors))
    return StokesLocalSystem(factors, cover, tuple(g for _ in range(len(cover))))


def zero_system(cover: SectorCover | None = None) -> StokesLocalSystem:
    cover = cover or standard_cover([])
    return StokesLocalSystem((), cover, tuple(() for _ in range(len(cover))))


def forget(v: StokesLocalSystem) -> tuple[int, Matrix]:
    """The underlying local system: rank and monodromy G_{n-1} ... G_0."""
    mono = la.identity(v.rank)
    for g in v.gluings:
        mono = la.matmul(g, mono) if v.rank else mono
    return v.rank, mono


def _transition(v: StokesLocalSystem, lo: int, hi: int) -> Matrix:
    """Frame change from lifted coarse arc lo to lifted arc hi."""
    n = len(v.cover)
    m = la.identity(v.rank)
    if v.rank == 0:
        return m
    if hi >= lo:
        for k in range(lo, hi):
            m = la.matmul(v.gluings[k % n], m)
    else:
        for k in range(lo - 1, hi - 1, -1):
            m = la.matmul(la.inverse(v.gluings[k % n]), m)
    return m


def _lifted_locations(coarse: SectorCover, fine: SectorCover) -> list[int]:
    return [coarse.locate(a) for a in fine.arcs]


def restrict(v: StokesLocalSystem, fine: SectorCover) -> StokesLocalSystem:
    """The same system presented on a cover refining v.cover."""
    if fine == v.cover:
        return v
    locs = _lifted_locations(v.cover, fine)
    n = len(fine)
    nc = len(v.cover)
    gluings = []
    for i in range(n):
        lo = locs[i]
        hi = locs[i + 1] if i + 1 < n else locs[0] + nc
        gluings.append(_transition(v, lo, hi))
    return StokesLocalSystem(v.factors, fine, tuple(gluings))


def refine_together(*systems: StokesLocalSystem) -> tuple[StokesLocalSystem, ...]:
    covers = [s.cover for s in systems]
    if all(c == covers[0] for c in covers) and _cover_separates(covers[0], [f for s in systems for f in s.factors]):
        return systems
    factors = [f for s in systems for f in s.factors]
    fine = common_refinement(covers, factors)
    return tuple(restrict(s, fine) for s in systems)


def _cover_separates(cover: SectorCover, factors: Sequence[PuiseuxFactor]) -> bool:
    from .sectors import cover_is_sound
    return cover_is_sound(cover, factors)


# Cech complex of the Hom sheaf


@dataclass(frozen=True)
class _CechHom:
    source: StokesLocalSystem
    target: StokesLocalSystem
    arc_slots: tuple[tuple[tuple[int, int], ...], ...]
    overlap_slots: tuple[tuple[tuple[int, int], ...], ...]
    delta: tuple[tuple[FieldScalar, ...], ...] = field(repr=False)

    @property
    def c0_dim(self) -> int:
        return sum(len(s) for s in self.arc_slots)

    @property
    def c1_dim(self) -> int:
        return sum(len(s) for s in self.overlap_slots)


def _slots(mask) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(len(mask)) for j in range(len(mask[i])) if mask[i][j])


def _all_slots(m: int, n: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(m) for j in range(n))


def _cech(src: StokesLocalSystem, tgt: StokesLocalSystem, classical: bool = False) -> _CechHom:
    cover = src.cover
    n = len(cover)
    m, s = tgt.rank, src.rank
    if classical:
        arc_slots = tuple(_all_slots(m, s) for _ in range(n))
        ov_slots = tuple(_all_slots(m, s) for _ in range(n))
    else:
        arc_slots = tuple(_slots(_permission_mask(tgt.factors, src.factors, a)) for a in cover.arcs)
        ov_slots = tuple(_slots(_permission_mask(tgt.factors, src.factors, cover.overlap(k))) for k in range(n))
    col_offset = []
    acc = 0
    for sl in arc_slots:
        col_offset.append(acc)
        acc += len(sl)
    c0 = acc
    rows: list[list[FieldScalar]] = []
    for k in range(n):
        gt = tgt.gluings[k]
        gs = src.gluings[k]
        kn = (k + 1) % n
        idx_k = {p: col_offset[k] + t for t, p in enumerate(arc_slots[k])}
        idx_n = {p: col_offset[kn] + t for t, p in enumerate(arc_slots[kn])}
        # delta(M)_k = G^T_k M_k - M_{k+1} G^S_k, read off at each overlap slot
        for (i, j) in ov_slots[k]:
            row = [ZERO] * c0
            for (a, b), col in idx_k.items():
                if b == j:
                    c = gt[i][a]
                    if c:
                        row[col] = row[col] + c
            for (a, b), col in idx_n.items():
                if a == i:
                    c = gs[b][j]
                    if c:
                        row[col] = row[col] - c
            rows.append(row)
        # slots outside the overlap permission must vanish identically
        allowed = set(ov_slots[k])
        for i in range(m):
            for j in range(s):
                if (i, j) in allowed:
                    continue
                row = [ZERO] * c0
                for (a, b), col in idx_k.items():
                    if b == j and gt[i][a]:
                        row[col] = row[col] + gt[i][a]
                for (a, b), col in idx_n.items():
                    if a == i and gs[b][j]:
                        row[col] = row[col] - gs[b][j]
                if any(x for x in row):
                    # a forbidden slot can receive a value only if permission logic is broken
                    raise InvalidObject("Cech differential leaves the permitted subspace")
    return _CechHom(src, tgt, arc_slots, ov_slots, tuple(tuple(r) for r in rows))


def _assemble(c: _CechHom, vec) -> tuple[Matrix, ...]:
    out = []
    pos = 0
    m, s = c.target.rank, c.source.rank
    for sl in c.arc_slots:
        mat = [[ZERO] * s for _ in range(m)]
        for (i, j) in sl:
            mat[i][j] = vec[pos]
            pos += 1
        out.append(tuple(tuple(r) for r in mat))
    return tuple(out)


@dataclass(frozen=True)
class HomResult:
    dimension: int
    basis: tuple[tuple[Matrix, ...], ...]
    cover: SectorCover


def hom_global(src: StokesLocalSystem, tgt: StokesLocalSystem, classical: bool = False) -> HomResult:
    """Global morphisms src -> tgt as per-arc matrices on a common refinement."""
    s, t = refine_together(src, tgt)
    c = _cech(s, t, classical)
    basis = la.nullspace(c.delta, c.c0_dim) if c.c0_dim else []
    return HomResult(len(basis), tuple(_assemble(c, v) for v in basis), s.cover)


def ext1_global(src: StokesLocalSystem, tgt: StokesLocalSystem, classical: bool = False) -> int:
    s, t = refine_together(src, tgt)
    c = _cech(s, t, classical)
    r = la.rank(c.delta, c.c0_dim) if c.delta and c.c0_dim else 0
    return c.c1_dim - r


@lru_cache(maxsize=1 << 14)
def ext_dims(src: StokesLocalSystem, tgt: StokesLocalSystem, classical: bool = False) -> tuple[int, int]:
    s, t = refine_together(src, tgt)
    c = _cech(s, t, classical)
    r = la.rank(c.delta, c.c0_dim) if c.delta and c.c0_dim else 0
    return c.c0_dim - r, c.c1_dim - r


def ext1_basis(src: StokesLocalSystem, tgt: StokesLocalSystem) -> tuple[SectorCover, list[tuple[Matrix, ...]]]:
    """Representatives of Ext^1 as per-overlap matrices (complement of the coboundaries)."""
    s, t = refine_together(src, tgt)
    c = _cech(s, t)
    image = la.column_space(c.delta, c.c1_dim) if c.delta and c.c0_dim else []
    span = list(image)
    r0 = la.rank(span, c.c1_dim) if span else 0
    reps = []
    for e in range(c.c1_dim):
        unit = tuple(ONE if x == e else ZERO for x in range(c.c1_dim))
        if la.rank(span + [unit], c.c1_dim) > r0:
            span.append(unit)
            r0 += 1
            reps.append(unit)
    m, n = t.rank, s.rank
    out = []
    for vec in reps:
        mats = []
        pos = 0
        for sl in c.overlap_slots:
            mat = [[ZERO] * n for _ in range(m)]
            for (i, j) in sl:
                mat[i][j] = vec[pos]
                pos += 1
            mats.append(tuple(tuple(r) for r in mat))
        out.append(tuple(mats))
    return s.cover, out


def unit_system(cover: SectorCover | None = None) -> StokesLocalSystem:
    return trivial_system([ZERO_FACTOR], cover)


# morphisms


@dataclass(frozen=True)
class IrregularMorphism:
    source: StokesLocalSystem
    target: StokesLocalSystem
    matrices: tuple[Matrix, ...]

    def __post_init__(self) -> None:
        if self.source.cover != self.target.cover:
            raise ArcMismatch("morphism endpoints must share a cover; refine first")
        cover = self.source.cover
        mats = tuple(la.matrix(m) if m else tuple(() for _ in range(self.target.rank)) for m in self.matrices)
        if len(mats) != len(cover):
            raise InvalidObject("one matrix per arc is required")
        m, s = self.target.rank, self.source.rank
        for k, f in enumerate(mats):
            if len(f) != m or any(len(r) != s for r in f):
                raise InvalidObject(f"arc matrix {k} must be {m}x{s}")
            if not _respects(_permission_mask(self.target.factors, self.source.factors, cover.arcs[k]), f):
                raise InvalidObject(f"arc matrix {k} has an entry forbidden by dominance")
        n = len(cover)
        for k in range(n):
            lhs = _mm(self.target.gluings[k], mats[k], m, s)
            rhs = _mm(mats[(k + 1) % n], self.source.gluings[k], m, s)
            if lhs != rhs:
                raise InvalidObject(f"morphism does not intertwine the gluings on overlap {k}")
        object.__setattr__(self, "matrices", mats)


def _mm(a: Matrix, b: Matrix, m: int, n: int) -> Matrix:
    if m == 0:
        return ()
    if n == 0:
        return tuple(() for _ in range(m))
    if not b or not a or not a[0]:
        return la.zeros(m, n)
    return la.matmul(a, b)


def restrict_morphism(f: IrregularMorphism, fine: SectorCover) -> IrregularMorphism:
    src, tgt = restrict(f.source, fine), restrict(f.target, fine)
    locs = _lifted_locations(f.source.cover, fine)
    n = len(f.source.cover)
    # the frame of a lifted arc L is the frame of arc L mod n
    mats = [f.matrices[L % n] for L in locs]
    return IrregularMorphism(src, tgt, tuple(mats))


def identity_morphism(v: StokesLocalSystem) -> IrregularMorphism:
    return IrregularMorphism(v, v, tuple(la.identity(v.rank) for _ in range(len(v.cover))))


def zero_morphism(src: StokesLocalSystem, tgt: StokesLocalSystem) -> IrregularMorphism:
    return IrregularMorphism(src, tgt, tuple(la.zeros(tgt.rank, src.rank) if tgt.rank else () for _ in range(len(src.cover))))


def constant_morphism(src: StokesLocalSystem, tgt: StokesLocalSystem, m: Matrix) -> IrregularMorphism:
    """The same matrix on every arc."""
    return IrregularMorphism(src, tgt, tuple(la.matrix(m) for _ in range(len(src.cover))))


def dual_system(v: StokesLocalSystem) -> StokesLocalSystem:
    gl = tuple(la.transpose(la.inverse(g)) if v.rank else g for g in v.gluings)
    return StokesLocalSystem(tuple(-f for f in v.factors), v.cover, gl)


def dual_morphism(f: IrregularMorphism) -> IrregularMorphism:
    s, t = f.source.rank, f.target.rank
    mats = tuple(la.transpose(m, s) if t else tuple(() for _ in range(s)) for m in f.matrices)
    return IrregularMorphism(dual_system(f.target), dual_system(f.source), mats)


def _class_order(factors: Sequence[PuiseuxFactor]) -> list[PuiseuxFactor]:
    out: list[PuiseuxFactor] = []
    for f in factors:
        if not any(same_class(f, g) for g in out):
            out.append(f)
    return out


def _arc_kernel(f: Matrix, src: Sequence[PuiseuxFactor], classes: Sequence[PuiseuxFactor], arc: SectorArc, m: int) -> tuple[list[PuiseuxFactor], list[tuple[FieldScalar, ...]]]:
    """Split kernel of f on one arc: generator columns with their classes.

    Hom(Lambda^c, S) on the arc is spanned by slots whose factor receives
    maps from c; the kernel generators of class c are the kernel vectors
    there modulo those already reached from strictly larger classes.
    """
    s = len(src)
    above: dict[int, list[int]] = {}
    for ci, c in enumerate(classes):
        above[ci] = [j for j in range(s) if hom_permitted(c, src[j], arc)]
    ker_c: dict[int, list[tuple[FieldScalar, ...]]] = {}
    for ci in range(len(classes)):
        slots = above[ci]
        sub = [[f[i][j] for j in slots] for i in range(m)]
        basis = la.nullspace(sub, len(slots)) if m else [tuple(ONE if a == b else ZERO for b in range(len(slots))) for a in range(len(slots))]
        full = []
        for v in basis:
            x = [ZERO] * s
            for t, j in enumerate(slots):
                x[j] = v[t]
            full.append(tuple(x))
        ker_c[ci] = full
    gens_f: list[PuiseuxFactor] = []
    gens_v: list[tuple[FieldScalar, ...]] = []
    for ci, c in enumerate(classes):
        higher = []
        for cj, d in enumerate(classes):
            if cj != ci and hom_permitted(c, d, arc):
                higher.extend(ker_c[cj])
        span = list(higher)
        r0 = la.rank(span, s) if span else 0
        for v in ker_c[ci]:
            trial = span + [v]
            if la.rank(trial, s) > r0:
                span = trial
                r0 += 1
                gens_f.append(c)
                gens_v.append(v)
    return gens_f, gens_v


@dataclass(frozen=True)
class KernelResult:
    system: StokesLocalSystem
    inclusion: IrregularMorphism


def kernel_morphism(f: IrregularMorphism) -> KernelResult:
    src, tgt = f.source, f.target
    if not _cover_separates(src.cover, list(src.factors) + list(tgt.factors)):
        fine = common_refinement([src.cover], list(src.factors) + list(tgt.factors))
        f = restrict_morphism(f, fine)
        src, tgt = f.source, f.target
    cover = src.cover
    n = len(cover)
    classes = _class_order(src.factors)
    per_arc = [_arc_kernel(f.matrices[k], src.factors, classes, cover.arcs[k], tgt.rank) for k in range(n)]
    # canonical slot order: by class, in order of first appearance in the source
    ref = sorted(per_arc[0][0], key=lambda c: next(i for i, d in enumerate(classes) if same_class(c, d)))
    iotas = []
    for gens_f, gens_v in per_arc:
        if sorted(gens_f, key=lambda c: next(i for i, d in enumerate(classes) if same_class(c, d))) != ref:
            raise InvalidObject("kernel formal type varies between arcs; morphism is not strict")
        order = sorted(range(len(gens_f)), key=lambda t: next(i for i, d in enumerate(classes) if same_class(gens_f[t], d)))
        cols = [gens_v[t] for t in order]
        iotas.append(la.transpose(tuple(cols), src.rank) if cols else tuple(() for _ in range(src.rank)))
    r = len(ref)
    gluings = []
    for k in range(n):
        kn = (k + 1) % n
        if r == 0:
            gluings.append(())
            continue
        rhs = la.matmul(src.gluings[k], iotas[k])
        try:
            h = la.solve(iotas[kn], rhs)
        except ValueError as exc:
            raise InvalidObject("kernel does not glue; morphism is not strict") from exc
        gluings.append(h)
    system = StokesLocalSystem(tuple(ref), cover, tuple(gluings))
    inc = IrregularMorphism(system, src, tuple(iotas))
    return KernelResult(system, inc)


def cokernel_morphism(f: IrregularMorphism) -> KernelResult:
    """Cokernel and projection, via the kernel of the dual morphism."""
    k = kernel_morphism(dual_morphism(f))
    proj = dual_morphism(k.inclusion)
    return KernelResult(proj.target, proj)


def is_zero_system(v: StokesLocalSystem) -> bool:
    return v.rank == 0


def hom_constant_via_systems(a: PuiseuxFactor, b: PuiseuxFactor) -> int:
    """hom_global between rank-one systems with identity gluings."""
    return hom_global(trivial_system([a]), trivial_system([b])).dimension


def unipotent_stokes_example() -> StokesLocalSystem:
    """Factors {1/z, 0} with one unipotent Stokes matrix on the overlap of the left half."""
    one_over_z = PuiseuxFactor(((Fraction(1), ONE),))
    factors = (ZERO_FACTOR, one_over_z)
    cover = standard_cover(factors)
    gl = []
    placed = False
    for k in range(len(cover)):
        ov = cover.overlap(k)
        g = la.identity(2)
        if not placed and hom_permitted(factors[1], factors[0], ov):
            g = la.matrix([[1, 1], [0, 1]])
            placed = True
        gl.append(g)
    return StokesLocalSystem(factors, cover, tuple(gl))


__all__ = [
    "IrregularConstant",
    "IrregularMorphism",
    "KernelResult",
    "HomResult",
    "StokesLocalSystem",
    "cokernel_morphism",
    "constant_morphism",
    "dual_constant",
    "dual_morphism",
    "dual_system",
    "ext1_basis",
    "ext1_global",
    "ext_dims",
    "forget",
    "hom_constant",
    "hom_global",
    "identity_morphism",
    "is_zero_system",
    "kernel_morphism",
    "refine_together",
    "restrict",
    "restrict_morphism",
    "sheafhom_constant",
    "stalk",
    "tensor_constant",
    "trivial_system",
    "truncation_limit",
    "unit_system",
    "zero_morphism",
    "zero_system",
]
