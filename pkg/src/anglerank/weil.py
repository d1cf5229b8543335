"""Weil q-polynomials: validation, Newton polygons, base extension, simplicity."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, isqrt
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence

import mpmath
import numpy as np

from . import polyarith as P
from .errors import (
    FunctionalEquationViolation,
    NotMonic,
    NotPrimePower,
    OddDegree,
    PrecisionExhausted,
    RootModulusViolation,
    WeilPolynomialError,
)

if TYPE_CHECKING:
    from .spectrum import FrobeniusSpectrum

DEFAULT_M_MAX = 12
_SIEVE_PRIMES = 40


# --- prime powers -----------------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for b in _MR_BASES:
        x = pow(b, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _iroot(n: int, k: int) -> int:
    x = int(round(n ** (1.0 / k)))
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, r) with q = p**r, p prime; raise NotPrimePower otherwise."""
    if q < 2:
        raise NotPrimePower(f"q={q} is not a prime power")
    for r in range(q.bit_length(), 0, -1):
        p = _iroot(q, r)
        if p >= 2 and p ** r == q and is_prime(p):
            return p, r
    raise NotPrimePower(f"q={q} is not a prime power")


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# --- the polynomial ---------------------------------------------------------


@dataclass(frozen=True)
class WeilPolynomial:
    coeffs: tuple[int, ...]
    q: int
    p: int
    r: int
    g: int

    @property
    def degree(self) -> int:
        return 2 * self.g

    def serialize(self) -> dict:
        return {"q": self.q, "coeffs": list(self.coeffs)}

    def __str__(self) -> str:
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and abs(c) == 1:
                s = mono
            else:
                s = f"{abs(c)}{mono}"
            terms.append(("-" if c < 0 else "+") + s)
        out = "".join(terms).lstrip("+")
        return out.replace("+", " + ").replace("-", " - ").strip()


def parse_weil(coeffs: Sequence[int], q: int) -> WeilPolynomial:
    """Validate ascending integer coefficients as a Weil q-polynomial.

    The root-modulus condition is not checked here; ``compute_spectrum``
    certifies it.
    """
    if not coeffs:
        raise WeilPolynomialError("empty coefficient list")
    try:
        cs = tuple(int(c) for c in coeffs)
    except (TypeError, ValueError) as exc:
        raise WeilPolynomialError(f"non-integer coefficient: {exc}") from None
    if any(int(c) != c for c in coeffs):
        raise WeilPolynomialError("non-integer coefficient")
    if cs[-1] != 1:
        raise NotMonic(f"leading coefficient is {cs[-1]}, expected 1")
    if len(cs) % 2 == 0:
        raise OddDegree(f"degree {len(cs) - 1} is odd")
    if len(cs) == 1:
        raise OddDegree("degree 0: no abelian variety")
    q = int(q)
    p, r = prime_power(q)
    g = (len(cs) - 1) // 2
    for i in range(g):
        if cs[i] != q ** (g - i) * cs[2 * g - i]:
            raise FunctionalEquationViolation(
                i, f"a_{i} = {cs[i]} but q^{g - i} * a_{2 * g - i} = {q ** (g - i) * cs[2 * g - i]}"
            )
    return WeilPolynomial(cs, q, p, r, g)


def from_real_polynomial(h: Sequence[int], q: int) -> list[int]:
    """Coefficients of x^g h(x + q/x) for monic integer h of degree g (ascending)."""
    g = len(h) - 1
    out: list[int] = [0] * (2 * g + 1)
    for j, hj in enumerate(h):
        if hj == 0:
            continue
        # x^(g-j) (x^2 + q)^j
        for k in range(j + 1):
            out[g - j + 2 * k] += hj * comb(j, k) * q ** (j - k)
    return out


# --- Newton polygons ---------------------------------------------------------


class NewtonClass(str, enum.Enum):
    ORDINARY = "Ordinary"
    ALMOST_ORDINARY = "AlmostOrdinary"
    SUPERSINGULAR = "Supersingular"
    OTHER = "Other"


@dataclass(frozen=True)
class NewtonPolygon:
    """Root valuations (normalised so that val(q) = 1) with multiplicities, slope ascending."""

    slopes: tuple[tuple[Fraction, int], ...]

    def as_dict(self) -> dict[Fraction, int]:
        return dict(self.slopes)

    @property
    def total(self) -> int:
        return sum(m for _, m in self.slopes)

    def union(self, other: "NewtonPolygon") -> "NewtonPolygon":
        merged: dict[Fraction, int] = dict(self.slopes)
        for s, m in other.slopes:
            merged[s] = merged.get(s, 0) + m
        return NewtonPolygon(tuple(sorted(merged.items())))

    def to_json(self) -> list:
        return [[str(s), m] for s, m in self.slopes]


def newton_polygon(f: WeilPolynomial) -> NewtonPolygon:
    pts = [(i, Fraction(valuation(a, f.p), f.r)) for i, a in enumerate(f.coeffs) if a != 0]
    hull: list[tuple[int, Fraction]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly below the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    slopes: dict[Fraction, int] = {}
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        lam = -(y2 - y1) / (x2 - x1)
        slopes[lam] = slopes.get(lam, 0) + (x2 - x1)
    return NewtonPolygon(tuple(sorted(slopes.items())))


def classify_newton(np_: NewtonPolygon, g: int) -> NewtonClass:
    d = np_.as_dict()
    zero, half, one = Fraction(0), Fraction(1, 2), Fraction(1)
    if d == {zero: g, one: g}:
        return NewtonClass.ORDINARY
    if d == {half: 2 * g}:
        return NewtonClass.SUPERSINGULAR
    if g >= 2 and d == {zero: g - 1, half: 2, one: g - 1}:
        return NewtonClass.ALMOST_ORDINARY
    return NewtonClass.OTHER


# --- base extension ------------------------------------------------------------


def power_sums(coeffs: Sequence[int], count: int) -> list[int]:
    """Power sums p_1..p_count of the roots of a monic integer polynomial (Newton's identities)."""
    n = len(coeffs) - 1
    c = [coeffs[n - k] for k in range(n + 1)]
    ps = [n] + [0] * count
    for k in range(1, count + 1):
        acc = 0
        for j in range(1, min(k - 1, n) + 1):
            acc += c[j] * ps[k - j]
        if k <= n:
            acc += k * c[k]
        ps[k] = -acc
    return ps[1:]


def _from_power_sums(ps: Sequence[int], n: int) -> list[int]:
    c = [1] + [0] * n
    for k in range(1, n + 1):
        acc = ps[k - 1]
        for j in range(1, k):
            acc += c[j] * ps[k - j - 1]
        if acc % k:
            raise ArithmeticError("non-integral coefficient from power sums")
        c[k] = -acc // k
    return [c[n - i] for i in range(n + 1)]


def base_extend(f: WeilPolynomial, m: int) -> WeilPolynomial:
    """Weil polynomial over F_{q^m}: roots alpha_i^m."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if m == 1:
        return f
    n = f.degree
    ps = power_sums(f.coeffs, n * m)
    coeffs = _from_power_sums([ps[m * k - 1] for k in range(1, n + 1)], n)
    return parse_weil(coeffs, f.q ** m)


# --- irreducibility and simplicity ------------------------------------------------


class AbsSimple(str, enum.Enum):
    YES = "Yes"  # reserved: no finite certificate is implemented
    HEURISTIC_YES = "HeuristicYes"
    NO = "No"


@dataclass(frozen=True)
class Irreducibility:
    irreducible: bool
    certificate: str  # "mod-l" | "subset-factor" | "repeated-factor"
    primes: tuple[int, ...] = ()
    witness: tuple[int, ...] | None = None


@dataclass(frozen=True)
class SimplicityVerdict:
    irreducible: bool
    certificate: str
    witness_factor: tuple[int, ...] | None
    absolutely_simple: AbsSimple
    m_checked: int
    witness_m: int | None = None
    primes: tuple[int, ...] = field(default=(), compare=False)

    @property
    def at_least_heuristic(self) -> bool:
        return self.irreducible and self.absolutely_simple in (AbsSimple.YES, AbsSimple.HEURISTIC_YES)


def _small_primes(limit: int = 4000) -> Iterator[int]:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return (i for i in range(limit + 1) if sieve[i])


def _subset_sums(parts: Sequence[int]) -> set[int]:
    sums = {0}
    for d in parts:
        sums |= {s + d for s in sums}
    return sums


def degree_sieve(coeffs: Sequence[int], avoid: int = 0, good_primes: int = _SIEVE_PRIMES):
    """Intersect possible factor degrees over the factorisation patterns mod small primes.

    Returns (surviving proper degrees, primes used).  An empty set certifies
    irreducibility of a squarefree monic polynomial.
    """
    n = len(coeffs) - 1
    possible = set(range(1, n))
    used: list[int] = []
    for ell in _small_primes():
        if avoid and avoid % ell == 0:
            continue
        pattern = P.distinct_degree_pattern(coeffs, ell)
        if pattern is None:
            continue
        used.append(ell)
        possible &= _subset_sums(pattern)
        if not possible or len(used) >= good_primes:
            break
    return possible, tuple(used)


def _subset_factor_search(f: WeilPolynomial, spectrum: "FrobeniusSpectrum | None",
                          precision_cap: int) -> tuple[int, ...] | None:
    """Exhaust real factors built from complex-conjugation orbits of certified roots.

    Returns the simplest nontrivial integer factor of least degree, or None
    when no proper subset of orbits yields an integer factor.
    """
    from .spectrum import compute_spectrum

    if spectrum is None or spectrum.weil.coeffs != f.coeffs:
        spectrum = compute_spectrum(f, precision_cap=precision_cap)
    orbits = spectrum.conjugation_orbits()
    n_orb = len(orbits)
    while True:
        prec = spectrum.precision_bits
        found: list[tuple[int, ...]] = []
        undecided = False
        for size in range(1, n_orb):
            for subset in itertools.combinations(range(n_orb), size):
                roots = [z for k in subset for z in orbits[k]]
                cand, err = spectrum.factor_candidate(roots)
                if err >= Fraction(1, 2):
                    undecided = True
                    continue
                ints = [int(mpmath.nint(c)) for c in cand]
                if abs(ints[-1] - 1) != 0:
                    continue
                if P.exact_div(f.coeffs, ints) is not None:
                    found.append(tuple(ints))
            if found:
                return min(found, key=lambda h: (len(h), P.height(h), h))
        if not undecided:
            return None
        if prec * 2 > precision_cap:
            raise PrecisionExhausted(
                "subset-factor search cannot separate candidate factors", bits=prec
            )
        spectrum = spectrum.refine(prec * 2, precision_cap=precision_cap)


def irreducibility(f: WeilPolynomial, spectrum: "FrobeniusSpectrum | None" = None,
                   precision_cap: int = 16384) -> Irreducibility:
    coeffs = list(f.coeffs)
    g = P.gcd_poly(coeffs, P.derivative(coeffs))
    if len(g) > 1:
        return Irreducibility(False, "repeated-factor", witness=tuple(P.as_int_poly(g)))
    possible, primes = degree_sieve(coeffs, avoid=f.p)
    if not possible:
        return Irreducibility(True, "mod-l", primes=primes)
    witness = _subset_factor_search(f, spectrum, precision_cap)
    if witness is None:
        return Irreducibility(True, "subset-factor", primes=primes)
    return Irreducibility(False, "subset-factor", witness=witness)


def simplicity(f: WeilPolynomial, spectrum: "FrobeniusSpectrum | None" = None,
               m_max: int = DEFAULT_M_MAX, precision_cap: int = 16384) -> SimplicityVerdict:
    """Exact irreducibility of f plus the heuristic base-extension test up to m_max."""
    irr = irreducibility(f, spectrum, precision_cap)
    if not irr.irreducible:
        return SimplicityVerdict(False, irr.certificate, irr.witness, AbsSimple.NO, 1,
                                 witness_m=1, primes=irr.primes)
    for m in range(2, m_max + 1):
        fm = base_extend(f, m)
        if not irreducibility(fm, None, precision_cap).irreducible:
            return SimplicityVerdict(True, irr.certificate, None, AbsSimple.NO, m,
                                     witness_m=m, primes=irr.primes)
    return SimplicityVerdict(True, irr.certificate, None, AbsSimple.HEURISTIC_YES,
                             max(m_max, 1), primes=irr.primes)


# --- enumeration -------------------------------------------------------------


def _real_rooted_candidates(g: int, q: int) -> Iterator[tuple[int, ...]]:
    """Monic integer h of degree g whose roots look real and inside [-2 sqrt q, 2 sqrt q].

    Builds h = x^g + b_1 x^(g-1) + ... + b_g one coefficient at a time.  The
    (g-k)-th derivative of h depends only on b_1..b_k and, by Rolle, inherits
    real roots in the interval, so every prefix is filtered before extension.
    Floating-point prefilter only; callers certify survivors.
    """
    bound = 2 * np.sqrt(q)
    tol = 1e-3 * (1 + bound)
    prefixes = np.zeros((1, 0), dtype=np.int64)
    for k in range(1, g + 1):
        r = int(comb(g, k) * bound ** k) + 1
        col = np.arange(-r, r + 1, dtype=np.int64)
        grown = np.hstack([np.repeat(prefixes, len(col), axis=0), np.tile(col, len(prefixes))[:, None]])
        # monic (g-k)-th derivative: coefficient of x^(k-j) is b_j (g-j)! k! / ((k-j)! g!)
        scale = np.array([factorial(g - j) * factorial(k) / (factorial(k - j) * factorial(g))
                          for j in range(1, k + 1)])
        coeffs = grown * scale
        comp = np.zeros((len(grown), k, k))
        comp[:, 0, :] = -coeffs
        for i in range(1, k):
            comp[:, i, i - 1] = 1.0
        roots = np.linalg.eigvals(comp)
        ok = (np.abs(roots.imag) <= tol).all(axis=1) & (np.abs(roots.real) <= bound + tol).all(axis=1)
        prefixes = grown[ok]
    for row in prefixes:
        yield tuple(int(x) for x in reversed(row)) + (1,)


def enumerate_weil_polynomials(g: int, q: int, precision_cap: int = 4096) -> list[WeilPolynomial]:
    """All Weil q-polynomials of degree 2g, certified by the root-enclosure check.

    Ordered by the real polynomial's coefficients, so the output is deterministic.
    """
    from .spectrum import compute_spectrum

    out = []
    for h in sorted(_real_rooted_candidates(g, q)):
        try:
            f = parse_weil(from_real_polynomial(h, q), q)
            compute_spectrum(f, precision_cap=precision_cap)
        except (RootModulusViolation, PrecisionExhausted, WeilPolynomialError):
            continue
        out.append(f)
    return out


def weil_product(factors: Iterable[WeilPolynomial]) -> WeilPolynomial:
    """Product of Weil polynomials over the same q."""
    fs = list(factors)
    q = fs[0].q
    if any(f.q != q for f in fs):
        raise ValueError("factors over different fields")
    return parse_weil(P.product([list(f.coeffs) for f in fs]), q)
