"""Dense exact linear algebra over Q(i).

Matrices are tuples of row tuples of FieldScalar. Vectors are tuples.
"""

from __future__ import annotations

import random
from typing import Iterable, Sequence

from .novikov import ONE, ZERO, FieldScalar

Matrix = tuple[tuple[FieldScalar, ...], ...]
Vector = tuple[FieldScalar, ...]


def matrix(rows: Iterable[Iterable[FieldScalar | int]]) -> Matrix:
    return tuple(tuple(FieldScalar.coerce(x) for x in row) for row in rows)


def zeros(m: int, n: int) -> Matrix:
    return tuple(tuple(ZERO for _ in range(n)) for _ in range(m))


def identity(n: int) -> Matrix:
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def shape(a: Matrix, ncols: int | None = None) -> tuple[int, int]:
    if not a:
        return 0, (ncols or 0)
    return len(a), len(a[0])


def matmul(a: Matrix, b: Matrix, inner: int | None = None) -> Matrix:
    m = len(a)
    n = len(b[0]) if b else 0
    k = len(b)
    if a and len(a[0]) != k:
        raise ValueError("shape mismatch in matmul")
    out = []
    for i in range(m):
        row = []
        ai = a[i]
        for j in range(n):
            s = ZERO
            for t in range(k):
                x = ai[t]
                if x.re or x.im:
                    y = b[t][j]
                    if y.re or y.im:
                        s = s + x * y
            row.append(s)
        out.append(tuple(row))
    return tuple(out)


def matvec(a: Matrix, v: Sequence[FieldScalar]) -> Vector:
    return tuple(sum((a[i][t] * v[t] for t in range(len(v))), ZERO) for i in range(len(a)))


def add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def scale(c: FieldScalar, a: Matrix) -> Matrix:
    return tuple(tuple(c * x for x in row) for row in a)


def transpose(a: Matrix, nrows_if_empty: int = 0) -> Matrix:
    if not a:
        return tuple(() for _ in range(nrows_if_empty))
    return tuple(tuple(a[i][j] for i in range(len(a))) for j in range(len(a[0])))


def is_zero_matrix(a: Matrix) -> bool:
    return all(x.is_zero() for row in a for x in row)


def rref(rows: Sequence[Sequence[FieldScalar]], ncols: int) -> tuple[list[list[FieldScalar]], list[int]]:
    """Reduced row echelon form. Returns (nonzero rows, pivot columns)."""
    work = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(work)):
            if not work[i][c].is_zero():
                piv = i
                break
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = work[r][c].inverse()
        work[r] = [x if x.is_zero() else x * inv for x in work[r]]
        wr = work[r]
        # Cech differentials are very sparse; touch only the pivot row's support
        support = [j for j in range(c, len(wr)) if not wr[j].is_zero()]
        for i in range(len(work)):
            if i != r:
                f = work[i][c]
                if not f.is_zero():
                    row = work[i]
                    for j in support:
                        row[j] = row[j] - f * wr[j]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    return work[:r], pivots


def rank(rows: Sequence[Sequence[FieldScalar]], ncols: int | None = None) -> int:
    if not rows:
        return 0
    n = len(rows[0]) if ncols is None else ncols
    return len(rref(rows, n)[1])


def nullspace(a: Sequence[Sequence[FieldScalar]], ncols: int) -> list[Vector]:
    """Basis of {x : a x = 0}; deterministic (free-variable order)."""
    red, pivots = rref(a, ncols) if a else ([], [])
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        x = [ZERO] * ncols
        x[f] = ONE
        for row, p in zip(red, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def column_space(a: Matrix, nrows: int) -> list[Vector]:
    """Basis of the column space, as the pivot columns of ``a``."""
    if not a or not a[0]:
        return []
    _, pivots = rref(a, len(a[0]))
    return [tuple(a[i][p] for i in range(nrows)) for p in pivots]


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = [list(a[i]) + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    red, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return tuple(tuple(red[i][n:]) for i in range(n))


def is_invertible(a: Matrix) -> bool:
    n = len(a)
    if any(len(r) != n for r in a):
        return False
    return rank(a, n) == n


def solve_left(a: Matrix, b: Matrix) -> Matrix:
    """Solve X a = b for X (rows of b expressed in the row space of a)."""
    # X a = b  <=>  a^T X^T = b^T
    at = transpose(a)
    bt = transpose(b)
    xt = solve(at, bt)
    return transpose(xt, len(b))


def solve(a: Matrix, b: Matrix) -> Matrix:
    """Solve a x = b exactly; raises ValueError if inconsistent."""
    m = len(a)
    n = len(a[0]) if a else 0
    k = len(b[0]) if b else 0
    aug = [list(a[i]) + list(b[i]) for i in range(m)]
    red, pivots = rref(aug, n + k)
    if any(p >= n for p in pivots):
        raise ValueError("inconsistent linear system")
    x = [[ZERO] * k for _ in range(n)]
    for row, p in zip(red, pivots):
        x[p] = row[n:]
    return tuple(tuple(r) for r in x)


def similar(a: Matrix, b: Matrix, seed: int = 0, attempts: int = 8) -> bool:
    """Decide whether P a P^-1 = b for some invertible P.

    The intertwiner space {P : P a = b P} is computed exactly; a seeded
    random element of it is tested for invertibility.
    """
    n = len(a)
    if len(b) != n:
        return False
    if n == 0:
        return True
    rows = []
    for i in range(n):
        for j in range(n):
            row = [ZERO] * (n * n)
            # (P a)_{ij} = sum_t P_{it} a_{tj};  (b P)_{ij} = sum_t b_{it} P_{tj}
            for t in range(n):
                row[i * n + t] = row[i * n + t] + a[t][j]
                row[t * n + j] = row[t * n + j] - b[i][t]
            rows.append(row)
    basis = nullspace(rows, n * n)
    if not basis:
        return False
    rng = random.Random(seed)
    for _ in range(attempts):
        coeffs = [rng.randint(-50, 50) for _ in basis]
        v = [ZERO] * (n * n)
        for c, vec in zip(coeffs, basis):
            if c:
                v = [x + c * y for x, y in zip(v, vec)]
        p = tuple(tuple(v[i * n:(i + 1) * n]) for i in range(n))
        if is_invertible(p):
            return True
    return False


def direct_sum(a: Matrix, b: Matrix) -> Matrix:
    m1, n1 = shape(a)
    m2, n2 = shape(b)
    top = tuple(tuple(a[i]) + tuple(ZERO for _ in range(n2)) for i in range(m1))
    bottom = tuple(tuple(ZERO for _ in range(n1)) + tuple(b[i]) for i in range(m2))
    return top + bottom
