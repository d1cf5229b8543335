"""Dense univariate polynomial helpers over ZZ, QQ and F_l.

Polynomials are lists of coefficients in ascending degree order.  The zero
polynomial is the empty list.  Nothing here knows about Weil polynomials.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Poly = list


def trim(f: Sequence) -> list:
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def degree(f: Sequence) -> int:
    return len(trim(f)) - 1


def add(f: Sequence, g: Sequence) -> list:
    n = max(len(f), len(g))
    return trim([(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)])


def sub(f: Sequence, g: Sequence) -> list:
    return add(f, [-c for c in g])


def mul(f: Sequence, g: Sequence) -> list:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            out[i + j] += a * b
    return trim(out)


def product(polys: Sequence[Sequence]) -> list:
    out: list = [1]
    for f in polys:
        out = mul(out, f)
    return out


def power(f: Sequence, k: int) -> list:
    out: list = [1]
    for _ in range(k):
        out = mul(out, f)
    return out


def derivative(f: Sequence) -> list:
    return trim([i * f[i] for i in range(1, len(f))])


def divmod_poly(f: Sequence, g: Sequence) -> tuple[list, list]:
    """Division with remainder over QQ (exact, via Fraction)."""
    g = trim(g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(c) for c in trim(f)]
    lead = Fraction(g[-1])
    dg = len(g) - 1
    if len(r) - 1 < dg:
        return [], trim(r)
    quot = [Fraction(0)] * (len(r) - dg)
    for k in range(len(r) - 1 - dg, -1, -1):
        c = r[k + dg] / lead
        quot[k] = c
        if c:
            for j, b in enumerate(g):
                r[k + j] -= c * b
    return trim(quot), trim(r[:dg])


def exact_div(f: Sequence, g: Sequence) -> list | None:
    """Return f/g with integer coefficients, or None if g does not divide f in ZZ[x]."""
    q, r = divmod_poly(f, g)
    if r:
        return None
    if any(c.denominator != 1 for c in q):
        return None
    return [int(c) for c in q]


def monic(f: Sequence) -> list:
    f = trim(f)
    lead = Fraction(f[-1])
    return [Fraction(c) / lead for c in f]


def gcd_poly(f: Sequence, g: Sequence) -> list:
    """Monic gcd over QQ."""
    a, b = trim(f), trim(g)
    while b:
        _, r = divmod_poly(a, b)
        a, b = b, r
    if not a:
        return []
    return monic(a)


def as_int_poly(f: Sequence) -> list[int]:
    out = []
    for c in f:
        c = Fraction(c)
        if c.denominator != 1:
            raise ValueError(f"non-integral coefficient {c}")
        out.append(int(c))
    return out


def squarefree_decomposition(f: Sequence[int]) -> list[tuple[list[int], int]]:
    """Yun's algorithm for a monic integer polynomial.

    Returns [(h_k, k), ...] with f = prod h_k^k, each h_k monic squarefree of
    positive degree and the h_k pairwise coprime.
    """
    f = trim(f)
    if len(f) <= 1:
        return []
    df = derivative(f)
    a = gcd_poly(f, df)
    b = divmod_poly(f, a)[0]
    c = divmod_poly(df, a)[0]
    d = sub(c, derivative(b))
    out = []
    k = 1
    while len(b) > 1:
        a = gcd_poly(b, d) if d else monic(b)
        if len(a) > 1:
            out.append((as_int_poly(a), k))
        b = divmod_poly(b, a)[0]
        c = divmod_poly(d, a)[0] if d else []
        d = sub(c, derivative(b))
        k += 1
    return out


def evaluate(f: Sequence, x):
    acc = 0
    for c in reversed(f):
        acc = acc * x + c
    return acc


def height(f: Sequence[int]) -> int:
    return sum(abs(c) for c in f)


# --- F_l arithmetic -------------------------------------------------------


def reduce_mod(f: Sequence[int], ell: int) -> list[int]:
    return trim([c % ell for c in f])


def _mod_trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def mulmod_p(f: Sequence[int], g: Sequence[int], ell: int) -> list[int]:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return _mod_trim([c % ell for c in out])


def rem_p(f: Sequence[int], g: Sequence[int], ell: int) -> list[int]:
    r = [c % ell for c in f]
    _mod_trim(r)
    dg = len(g) - 1
    inv = pow(g[-1], -1, ell)
    while len(r) - 1 >= dg and r:
        c = (r[-1] * inv) % ell
        shift = len(r) - 1 - dg
        for j, b in enumerate(g):
            r[shift + j] = (r[shift + j] - c * b) % ell
        _mod_trim(r)
    return r


def divmod_p(f: Sequence[int], g: Sequence[int], ell: int) -> tuple[list[int], list[int]]:
    r = [c % ell for c in f]
    _mod_trim(r)
    dg = len(g) - 1
    inv = pow(g[-1], -1, ell)
    q = [0] * max(len(r) - dg, 0)
    while r and len(r) - 1 >= dg:
        c = (r[-1] * inv) % ell
        shift = len(r) - 1 - dg
        q[shift] = c
        for j, b in enumerate(g):
            r[shift + j] = (r[shift + j] - c * b) % ell
        _mod_trim(r)
    return _mod_trim(q), r


def gcd_p(f: Sequence[int], g: Sequence[int], ell: int) -> list[int]:
    a, b = reduce_mod(f, ell), reduce_mod(g, ell)
    while b:
        a, b = b, rem_p(a, b, ell)
    if not a:
        return []
    inv = pow(a[-1], -1, ell)
    return [(c * inv) % ell for c in a]


def powmod_p(base: Sequence[int], e: int, modulus: Sequence[int], ell: int) -> list[int]:
    result = [1]
    b = rem_p(base, modulus, ell)
    while e:
        if e & 1:
            result = rem_p(mulmod_p(result, b, ell), modulus, ell)
        e >>= 1
        if e:
            b = rem_p(mulmod_p(b, b, ell), modulus, ell)
    return result


def distinct_degree_pattern(f: Sequence[int], ell: int) -> list[int] | None:
    """Degrees of the irreducible factors of f mod ell (with repetition).

    Returns None when f mod ell is not squarefree or drops degree, i.e. when
    ell divides the leading coefficient or the discriminant.
    """
    f = reduce_mod(f, ell)
    if len(f) != len(trim(f)) or degree(f) < 1:
        return None
    if len(gcd_p(f, derivative(f), ell)) > 1:
        return None
    degrees: list[int] = []
    rest = f
    h = [0, 1]
    k = 0
    while degree(rest) >= 2 * (k + 1):
        k += 1
        h = powmod_p(h, ell, rest, ell)
        diff = _mod_trim([((h[i] if i < len(h) else 0) - (1 if i == 1 else 0)) % ell
                          for i in range(max(len(h), 2))])
        d = gcd_p(rest, diff, ell)
        if len(d) > 1:
            degrees.extend([k] * ((len(d) - 1) // k))
            rest, _ = divmod_p(rest, d, ell)
            h = rem_p(h, rest, ell)
    if degree(rest) >= 1:
        degrees.append(degree(rest))
    return sorted(degrees)
