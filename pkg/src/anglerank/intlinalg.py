"""Exact integer lattice routines: LLL, Hermite normal form, kernels, saturation.

Lattices are given by generating rows (lists of Python ints).  All arithmetic
is exact; dimensions in this package never exceed a dozen or so, so the
straightforward rational Gram-Schmidt LLL is fast enough.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[int]]


def _dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def lll(rows: Sequence[Sequence[int]], delta: Fraction = Fraction(99, 100)) -> Matrix:
    """LLL-reduce linearly independent integer rows.

    Textbook algorithm (Cohen 2.6.3 with rational Gram-Schmidt), recomputing the
    orthogonalisation incrementally on swaps.
    """
    b = [list(map(int, r)) for r in rows]
    n = len(b)
    if n <= 1:
        return b
    bstar: list[list[Fraction]] = []
    bnorm: list[Fraction] = []
    mu = [[Fraction(0)] * n for _ in range(n)]

    def gso(k: int) -> None:
        v = [Fraction(x) for x in b[k]]
        for j in range(k):
            mu[k][j] = _dot(b[k], bstar[j]) / bnorm[j] if bnorm[j] else Fraction(0)
            if mu[k][j]:
                v = [x - mu[k][j] * y for x, y in zip(v, bstar[j])]
        if k < len(bstar):
            bstar[k] = v
            bnorm[k] = _dot(v, v)
        else:
            bstar.append(v)
            bnorm.append(_dot(v, v))

    for i in range(n):
        gso(i)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            m = mu[k][j]
            if abs(m) > Fraction(1, 2):
                r = round(m)
                b[k] = [x - r * y for x, y in zip(b[k], b[j])]
                for i in range(j):
                    mu[k][i] -= r * mu[j][i]
                mu[k][j] -= r
        if bnorm[k] >= (delta - mu[k][k - 1] ** 2) * bnorm[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            for i in range(k - 1, n):
                gso(i)
            k = max(k - 1, 1)
    return b


def _echelon(rows: Sequence[Sequence[int]], ncols: int | None = None) -> Matrix:
    """Row echelon form over ZZ by unimodular row operations (no reduction above pivots)."""
    a = [list(map(int, r)) for r in rows]
    if not a:
        return []
    width = len(a[0]) if ncols is None else ncols
    r = 0
    for c in range(width):
        piv = [i for i in range(r, len(a)) if a[i][c] != 0]
        if not piv:
            continue
        while True:
            piv = [i for i in range(r, len(a)) if a[i][c] != 0]
            i_min = min(piv, key=lambda i: abs(a[i][c]))
            a[r], a[i_min] = a[i_min], a[r]
            done = True
            for i in range(r + 1, len(a)):
                if a[i][c]:
                    f = a[i][c] // a[r][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[r])]
                    if a[i][c]:
                        done = False
            if done:
                break
        r += 1
        if r == len(a):
            break
    return a


def hnf(rows: Sequence[Sequence[int]]) -> Matrix:
    """Row-style Hermite normal form of the lattice spanned by ``rows`` (zero rows dropped).

    Canonical: two generating sets span the same lattice iff their HNFs agree.
    """
    a = [r for r in _echelon(rows) if any(r)]
    for i, row in enumerate(a):
        c = next(j for j, x in enumerate(row) if x)
        if row[c] < 0:
            a[i] = row = [-x for x in row]
        for k in range(i):
            f = a[k][c] // row[c]
            if f:
                a[k] = [x - f * y for x, y in zip(a[k], row)]
    return a


def rank(rows: Sequence[Sequence[int]]) -> int:
    return len(hnf(rows)) if rows else 0


def contains(basis_hnf: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    """Membership test against a basis in Hermite normal form."""
    w = list(v)
    for row in basis_hnf:
        c = next(j for j, x in enumerate(row) if x)
        if w[c] % row[c]:
            return False
        f = w[c] // row[c]
        if f:
            w = [x - f * y for x, y in zip(w, row)]
    return not any(w)


def kernel(rows: Sequence[Sequence[int]], n: int) -> Matrix:
    """Basis of {x in ZZ^n : <row, x> = 0 for every row}."""
    if not rows:
        return [[int(i == j) for j in range(n)] for i in range(n)]
    k = len(rows)
    aug = [[rows[i][j] for i in range(k)] + [int(j == t) for t in range(n)] for j in range(n)]
    ech = _echelon(aug, ncols=k)
    return [r[k:] for r in ech if not any(r[:k])]


def saturation(rows: Sequence[Sequence[int]], n: int) -> Matrix:
    """(QQ-span of rows) intersected with ZZ^n, as an LLL-reduced basis."""
    if not rows or not any(any(r) for r in rows):
        return []
    sat = kernel(kernel(rows, n), n)
    return lll(sat) if sat else []


def solve_rational(basis: Sequence[Sequence[int]], v: Sequence[int]) -> list[Fraction] | None:
    """Coefficients c with sum c_j basis_j = v over QQ, or None if v is outside the span."""
    m = len(basis)
    if m == 0:
        return [] if not any(v) else None
    n = len(v)
    # augmented system: columns are basis vectors, rows are coordinates
    a = [[Fraction(basis[j][i]) for j in range(m)] + [Fraction(v[i])] for i in range(n)]
    piv_cols = []
    r = 0
    for c in range(m):
        p = next((i for i in range(r, n) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(n):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        piv_cols.append(c)
        r += 1
    if any(a[i][m] != 0 for i in range(r, n)):
        return None
    coeffs = [Fraction(0)] * m
    for i, c in enumerate(piv_cols):
        coeffs[c] = a[i][m]
    return coeffs
