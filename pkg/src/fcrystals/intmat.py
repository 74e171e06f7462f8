"""Exact integer matrix algebra: Smith normal form, kernels, unimodular inverses.

Matrices are plain lists of lists of Python ints (row-major).  All routines
are deterministic; the Smith pivot rule is fixed (smallest absolute nonzero
value, ties broken row-major) so outputs are reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import InvalidActionError, ShapeError

IntMat = list[list[int]]


def shape(a: Sequence[Sequence[int]]) -> tuple[int, int]:
    r = len(a)
    c = len(a[0]) if r else 0
    if any(len(row) != c for row in a):
        raise ShapeError("ragged integer matrix")
    return r, c


def identity(r: int) -> IntMat:
    return [[1 if i == j else 0 for j in range(r)] for i in range(r)]


def zeros(r: int, c: int) -> IntMat:
    return [[0] * c for _ in range(r)]


def copy(a) -> IntMat:
    return [list(row) for row in a]


def transpose(a) -> IntMat:
    r, c = shape(a)
    return [[a[i][j] for i in range(r)] for j in range(c)]


def mul(a, b) -> IntMat:
    ra, ca = shape(a)
    rb, cb = shape(b)
    if ca != rb:
        raise ShapeError(f"cannot multiply {ra}x{ca} by {rb}x{cb}")
    out = zeros(ra, cb)
    for i in range(ra):
        row = a[i]
        for k in range(ca):
            v = row[k]
            if v:
                brow = b[k]
                orow = out[i]
                for j in range(cb):
                    orow[j] += v * brow[j]
    return out


def matvec(a, v) -> list[int]:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def eq(a, b) -> bool:
    return shape(a) == shape(b) and all(
        a[i][j] == b[i][j] for i in range(len(a)) for j in range(len(a[0]) if a else 0)
    )


def stack_rows(a, b) -> IntMat:
    if a and b and len(a[0]) != len(b[0]):
        raise ShapeError("row stacks need equal widths")
    return copy(a) + copy(b)


def bareiss_det(a) -> int:
    """Fraction-free determinant."""
    r, c = shape(a)
    if r != c:
        raise ShapeError("determinant of a non-square matrix")
    if r == 0:
        return 1
    m = copy(a)
    sign = 1
    prev = 1
    for k in range(r - 1):
        if m[k][k] == 0:
            pivot_row = next((i for i in range(k + 1, r) if m[i][k]), None)
            if pivot_row is None:
                return 0
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        for i in range(k + 1, r):
            for j in range(k + 1, r):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[-1][-1]


def is_unimodular(a) -> bool:
    r, c = shape(a)
    return r == c and abs(bareiss_det(a)) == 1


def inverse_unimodular(a) -> IntMat:
    """Integer inverse of a unimodular matrix (exact Gaussian elimination)."""
    r, c = shape(a)
    if r != c:
        raise ShapeError("inverse of a non-square matrix")
    m = [[Fraction(x) for x in row] for row in a]
    inv = [[Fraction(int(i == j)) for j in range(r)] for i in range(r)]
    for col in range(r):
        piv = next((i for i in range(col, r) if m[i][col]), None)
        if piv is None:
            raise InvalidActionError("matrix is singular")
        m[col], m[piv] = m[piv], m[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        d = m[col][col]
        m[col] = [x / d for x in m[col]]
        inv[col] = [x / d for x in inv[col]]
        for i in range(r):
            if i != col and m[i][col]:
                f = m[i][col]
                m[i] = [x - f * y for x, y in zip(m[i], m[col])]
                inv[i] = [x - f * y for x, y in zip(inv[i], inv[col])]
    out = []
    for row in inv:
        irow = []
        for x in row:
            if x.denominator != 1:
                raise InvalidActionError("matrix is not unimodular")
            irow.append(int(x))
        out.append(irow)
    return out


def matrix_order(a, limit: int = 64) -> int:
    """Multiplicative order of a, searched up to ``limit``."""
    r, c = shape(a)
    if r != c:
        raise ShapeError("order of a non-square matrix")
    ident = identity(r)
    power = copy(a)
    for k in range(1, limit + 1):
        if eq(power, ident):
            return k
        power = mul(power, a)
    raise InvalidActionError(f"matrix has no finite order up to {limit}")


# ---------------------------------------------------------------------------
# Smith normal form


def _pivot(m: IntMat, t: int, rows: int, cols: int):
    best = None
    for i in range(t, rows):
        for j in range(t, cols):
            v = m[i][j]
            if v and (best is None or abs(v) < abs(m[best[0]][best[1]])):
                best = (i, j)
    return best


def smith_normal_form(a) -> tuple[IntMat, IntMat, IntMat]:
    """Return (U, D, V) with U a V = D, U and V unimodular, D diagonal with
    each diagonal entry dividing the next.

    Pivot selection is the smallest nonzero absolute value, ties broken
    row-major, so the decomposition is reproducible.

    >>> u, d, v = smith_normal_form([[2, 4], [6, 8]])
    >>> [d[0][0], d[1][1]]
    [2, 4]
    """
    rows, cols = shape(a)
    m = copy(a)
    u = identity(rows)
    v = identity(cols)
    t = 0
    while t < min(rows, cols):
        piv = _pivot(m, t, rows, cols)
        if piv is None:
            break
        while True:
            pi, pj = piv
            if pi != t:
                m[t], m[pi] = m[pi], m[t]
                u[t], u[pi] = u[pi], u[t]
            if pj != t:
                for row in m:
                    row[t], row[pj] = row[pj], row[t]
                for row in v:
                    row[t], row[pj] = row[pj], row[t]
            if m[t][t] < 0:
                m[t] = [-x for x in m[t]]
                u[t] = [-x for x in u[t]]
            # reduce column t
            dirty = False
            for i in range(t + 1, rows):
                if m[i][t]:
                    q = m[i][t] // m[t][t]
                    if q:
                        m[i] = [x - q * y for x, y in zip(m[i], m[t])]
                        u[i] = [x - q * y for x, y in zip(u[i], u[t])]
                    if m[i][t]:
                        dirty = True
            if dirty:
                piv = _pivot(m, t, rows, cols)
                continue
            # reduce row t
            dirty = False
            for j in range(t + 1, cols):
                if m[t][j]:
                    q = m[t][j] // m[t][t]
                    if q:
                        for row in m:
                            row[j] -= q * row[t]
                        for row in v:
                            row[j] -= q * row[t]
                    if m[t][j]:
                        dirty = True
            if dirty:
                piv = _pivot(m, t, rows, cols)
                continue
            # pivot must divide the remaining submatrix for the divisor chain
            bad = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if m[i][j] % m[t][t]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            m[t] = [x + y for x, y in zip(m[t], m[bad])]
            u[t] = [x + y for x, y in zip(u[t], u[bad])]
            piv = _pivot(m, t, rows, cols)
        t += 1
    return u, m, v


def elementary_divisors(a) -> list[int]:
    _, d, _ = smith_normal_form(a)
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0)) if d[i][i]]


def rank(a) -> int:
    return len(elementary_divisors(a))


def kernel_basis(a) -> list[list[int]]:
    """Basis (as columns) of the integer kernel; the basis spans a saturated
    sublattice since V is unimodular."""
    rows, cols = shape(a)
    if cols == 0:
        return []
    _, d, v = smith_normal_form(a)
    nonzero = sum(1 for i in range(min(rows, cols)) if d[i][i])
    return [[v[i][j] for i in range(cols)] for j in range(nonzero, cols)]


def solve_exact(a, b) -> IntMat | None:
    """An integer solution X of a X = b (columns of b solved jointly), or None."""
    rows, cols = shape(a)
    rb, cb = shape(b)
    if rb != rows:
        raise ShapeError("right-hand side has the wrong height")
    u, d, v = smith_normal_form(a)
    c = mul(u, b)
    y = zeros(cols, cb)
    for i in range(max(rows, cols)):
        di = d[i][i] if i < min(rows, cols) else 0
        for j in range(cb):
            rhs = c[i][j] if i < rows else 0
            if di:
                q, r = divmod(rhs, di)
                if r:
                    return None
                if i < cols:
                    y[i][j] = q
            elif i < rows and rhs:
                return None
    return mul(v, y)
