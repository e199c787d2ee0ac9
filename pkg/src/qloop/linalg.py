"""Small dense exact linear algebra over QQ (Fraction) or F_p (int mod p).

Matrices are lists of rows.  ``p=None`` selects QQ.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Scalar = Fraction | int
Matrix = list[list[Scalar]]


def _norm(x: Scalar, p: int | None) -> Scalar:
    if p is None:
        return Fraction(x)
    if isinstance(x, Fraction):
        if x.denominator % p == 0:
            raise ZeroDivisionError(f"denominator {x.denominator} vanishes mod {p}")
        return x.numerator * pow(x.denominator, -1, p) % p
    return x % p


def _inv(x: Scalar, p: int | None) -> Scalar:
    return 1 / Fraction(x) if p is None else pow(int(x), -1, p)


def reduce_matrix(m: Sequence[Sequence[Scalar]], p: int | None) -> Matrix:
    return [[_norm(x, p) for x in row] for row in m]


def zeros(r: int, c: int) -> Matrix:
    return [[0] * c for _ in range(r)]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def transpose(m: Sequence[Sequence[Scalar]], ncols: int | None = None) -> Matrix:
    if not m:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*m)]


def matmul(a: Sequence[Sequence[Scalar]], b: Sequence[Sequence[Scalar]], p: int | None = None,
           inner: int | None = None, cols: int | None = None) -> Matrix:
    rows = len(a)
    inner = len(b) if inner is None else inner
    cols = (len(b[0]) if b else 0) if cols is None else cols
    out = zeros(rows, cols)
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for k in range(inner):
            x = ai[k]
            if x:
                bk = b[k]
                for j in range(cols):
                    if bk[j]:
                        oi[j] += x * bk[j]
        if p is not None:
            out[i] = [x % p for x in oi]
    return out


def matvec(a: Sequence[Sequence[Scalar]], x: Sequence[Scalar], p: int | None = None) -> list[Scalar]:
    out = [sum((r * y for r, y in zip(row, x)), Fraction(0) if p is None else 0) for row in a]
    return out if p is None else [y % p for y in out]


def is_zero(m: Sequence[Sequence[Scalar]]) -> bool:
    return all(not x for row in m for x in row)


def rref(rows: Sequence[Sequence[Scalar]], ncols: int, p: int | None = None) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [[_norm(x, p) for x in r] for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = _inv(m[r][c], p)
        m[r] = [_norm(x * inv, p) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [_norm(x - f * y, p) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence[Scalar]], ncols: int, p: int | None = None) -> int:
    return len(rref(rows, ncols, p)[1])


def nullspace(m: Sequence[Sequence[Scalar]], ncols: int, p: int | None = None) -> Matrix:
    """Basis (as rows) of {x : m x = 0}."""
    red, pivots = rref(m, ncols, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x: list[Scalar] = [0] * ncols
        x[f] = 1
        for row, pc in zip(red, pivots):
            x[pc] = _norm(-row[f], p)
        basis.append(x)
    return basis


def row_space(rows: Sequence[Sequence[Scalar]], ncols: int, p: int | None = None) -> Matrix:
    return rref(rows, ncols, p)[0]


def contains(span_rref: Sequence[Sequence[Scalar]], vec: Sequence[Scalar], ncols: int, p: int | None = None) -> bool:
    return rank(list(span_rref) + [list(vec)], ncols, p) == len(span_rref)
