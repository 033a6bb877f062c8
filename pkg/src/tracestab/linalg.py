"""Exact linear algebra over the integers and rationals.

Everything here works on tuples of ints or Fractions; no floats ever enter.
Matrices are tuples of row tuples, vectors are flat tuples, and matrices act
on column vectors (``mat_vec(M, v) == M @ v``).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

IntVec = tuple[int, ...]
IntMat = tuple[IntVec, ...]
QVec = tuple[Fraction, ...]


def dot(x: Sequence, y: Sequence):
    """Exact pairing of a character vector with a cocharacter vector."""
    if len(x) != len(y):
        raise ValueError("dimension mismatch")
    return sum(a * b for a, b in zip(x, y))


def vec_sub(x: Sequence, y: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(x, y))


def identity_matrix(n: int) -> IntMat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(m: Sequence[Sequence]) -> tuple:
    if not m:
        return ()
    return tuple(zip(*[tuple(row) for row in m]))


def mat_vec(m: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(dot(row, v) for row in m)


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def det(m: Sequence[Sequence]) -> Fraction:
    """Determinant over Q; the empty 0x0 matrix has determinant 1."""
    n = len(m)
    if n == 0:
        return Fraction(1)
    rows = [[Fraction(x) for x in row] for row in m]
    sign = 1
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            sign = -sign
        for r in range(col + 1, n):
            factor = rows[r][col] / rows[col][col]
            if factor:
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    result = Fraction(sign)
    for i in range(n):
        result *= rows[i][i]
    return result


def matrix_rank(m: Sequence[Sequence]) -> int:
    rows = [[Fraction(x) for x in row] for row in m]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                factor = rows[r][col] / rows[rank][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def invert(m: Sequence[Sequence]) -> tuple[QVec, ...]:
    """Inverse over Q; raises ValueError on a singular matrix."""
    n = len(m)
    aug = [[Fraction(x) for x in row] + [Fraction(1 if i == j else 0) for j in range(n)]
           for i, row in enumerate(m)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv_p = 1 / aug[col][col]
        aug[col] = [a * inv_p for a in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def solve(m: Sequence[Sequence], b: Sequence) -> QVec:
    """Solve the square system m @ x == b over Q."""
    inv = invert(m)
    return mat_vec(inv, tuple(Fraction(x) for x in b))


def is_integral(v: Iterable) -> bool:
    return all(Fraction(x).denominator == 1 for x in v)


def coords_in_rows(rows: Sequence[Sequence], v: Sequence) -> QVec | None:
    """Coefficients expressing v in the Q-row-span of rows, or None."""
    if not rows:
        return () if all(x == 0 for x in v) else None
    aug = [[Fraction(x) for x in row] for row in rows]
    target = [Fraction(x) for x in v]
    ncols = len(aug[0])
    coeffs = [[Fraction(1 if i == j else 0) for j in range(len(rows))] for i in range(len(rows))]
    pivots: list[tuple[int, int]] = []
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(aug)) if aug[r][col] != 0), None)
        if pivot is None:
            continue
        aug[rank], aug[pivot] = aug[pivot], aug[rank]
        coeffs[rank], coeffs[pivot] = coeffs[pivot], coeffs[rank]
        for r in range(len(aug)):
            if r != rank and aug[r][col]:
                factor = aug[r][col] / aug[rank][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[rank])]
                coeffs[r] = [a - factor * b for a, b in zip(coeffs[r], coeffs[rank])]
        pivots.append((rank, col))
        rank += 1
    sol = [Fraction(0)] * len(rows)
    for r, col in pivots:
        factor = target[col] / aug[r][col]
        if factor:
            target = [a - factor * b for a, b in zip(target, aug[r])]
            sol = [a + factor * b for a, b in zip(sol, coeffs[r])]
    if any(x != 0 for x in target):
        return None
    return tuple(sol)


def hnf_rows(rows: Sequence[Sequence[int]]) -> list[IntVec]:
    """Row-style Hermite normal form basis of the integer row span."""
    work = [list(map(int, row)) for row in rows if any(row)]
    if not work:
        return []
    ncols = len(work[0])
    basis: list[list[int]] = []
    row_idx = 0
    for col in range(ncols):
        pivot = None
        for r in range(row_idx, len(work)):
            if work[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        work[row_idx], work[pivot] = work[pivot], work[row_idx]
        # Euclidean elimination below the pivot.
        for r in range(row_idx + 1, len(work)):
            while work[r][col] != 0:
                q = work[row_idx][col] // work[r][col]
                work[row_idx] = [a - q * b for a, b in zip(work[row_idx], work[r])]
                work[row_idx], work[r] = work[r], work[row_idx]
        if work[row_idx][col] < 0:
            work[row_idx] = [-a for a in work[row_idx]]
        row_idx += 1
    work = [row for row in work[:row_idx]]
    # Reduce entries above each pivot.
    pivots = []
    for r, row in enumerate(work):
        col = next(i for i, a in enumerate(row) if a != 0)
        pivots.append(col)
        for above in range(r):
            q = work[above][col] // row[col]
            if q:
                work[above] = [a - q * b for a, b in zip(work[above], row)]
    return [tuple(row) for row in work]


def snf_with_transforms(m: Sequence[Sequence[int]]) -> tuple[IntMat, IntMat, IntMat]:
    """Smith normal form: returns (D, U, V) with U @ m @ V == D."""
    a = [list(map(int, row)) for row in m]
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    u = [list(row) for row in identity_matrix(nrows)]
    v = [list(row) for row in identity_matrix(ncols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for row in a:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    s = 0
    while s < min(nrows, ncols):
        # Move a nonzero entry of minimal magnitude to (s, s).
        best = None
        for i in range(s, nrows):
            for j in range(s, ncols):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(s, best[0])
        swap_cols(s, best[1])
        dirty = True
        while dirty:
            dirty = False
            for i in range(s + 1, nrows):
                if a[i][s] != 0:
                    q = a[i][s] // a[s][s]
                    add_row(i, s, q)
                    if a[i][s] != 0:
                        swap_rows(s, i)
                        dirty = True
            for j in range(s + 1, ncols):
                if a[s][j] != 0:
                    q = a[s][j] // a[s][s]
                    add_col(j, s, q)
                    if a[s][j] != 0:
                        swap_cols(s, j)
                        dirty = True
        if a[s][s] < 0:
            negate_row(s)
        # Enforce divisibility of the trailing block by the pivot.
        offender = None
        for i in range(s + 1, nrows):
            for j in range(s + 1, ncols):
                if a[i][j] % a[s][s] != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(s, offender, -1)
            continue
        s += 1
    return (tuple(tuple(row) for row in a),
            tuple(tuple(row) for row in u),
            tuple(tuple(row) for row in v))


def invariant_factors(m: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Nontrivial invariant factors (>1) of an integer matrix."""
    d, _, _ = snf_with_transforms(m)
    out = []
    for i in range(min(len(d), len(d[0]) if d else 0)):
        if d[i][i] not in (0, 1):
            out.append(abs(d[i][i]))
    return tuple(out)


def dual_lattice_quotient(a: Sequence[Sequence[int]]) -> list[QVec]:
    """Coset representatives of {v : a @ v integral} modulo Z^n.

    ``a`` must be square and nonsingular; the quotient has |det a| elements.
    """
    n = len(a)
    if n == 0:
        return [()]
    d, _, v = snf_with_transforms(a)
    reps: list[QVec] = []

    def rec(i: int, ks: list[int]):
        if i == n:
            frac = [Fraction(k, d[j][j]) for j, k in enumerate(ks)]
            vec = tuple(sum(Fraction(v[r][j]) * frac[j] for j in range(n)) % 1
                        for r in range(n))
            reps.append(vec)
            return
        for k in range(abs(d[i][i])):
            rec(i + 1, ks + [k])

    rec(0, [])
    return sorted(set(reps))


def int_kernel(m: Sequence[Sequence[int]]) -> list[IntVec]:
    """Saturated integer basis of {v : m @ v == 0}."""
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    if ncols == 0:
        return []
    if nrows == 0:
        return [tuple(row) for row in identity_matrix(ncols)]
    d, _, v = snf_with_transforms(m)
    rank = sum(1 for i in range(min(nrows, ncols)) if d[i][i] != 0)
    cols = transpose(v)
    return [tuple(int(x) for x in cols[j]) for j in range(rank, ncols)]


def left_int_kernel(m: Sequence[Sequence[int]]) -> list[IntVec]:
    """Saturated integer basis of {u : u @ m == 0}."""
    return int_kernel(transpose(m))


def in_integer_row_span(rows: Sequence[Sequence[int]], target: Sequence) -> bool:
    """Whether a rational vector lies in the Z-row-span of integer rows."""
    basis = hnf_rows(rows)
    vec = [Fraction(x) for x in target]
    for row in basis:
        col = next(i for i, x in enumerate(row) if x != 0)
        if vec[col] != 0:
            q = vec[col] / row[col]
            vec = [a - q * b for a, b in zip(vec, row)]
            if q.denominator != 1:
                return False
    return all(x == 0 for x in vec)


def clear_denominators(v: Sequence[Fraction]) -> tuple[IntVec, int]:
    """Return (integer vector, d) with v == vector / d."""
    d = 1
    for x in v:
        f = Fraction(x)
        d = d * f.denominator // gcd(d, f.denominator)
    return tuple(int(Fraction(x) * d) for x in v), d


def normalize_mod1(v: Sequence) -> QVec:
    """Reduce a rational vector into [0, 1)^n coordinatewise."""
    return tuple(Fraction(x) % 1 for x in v)
