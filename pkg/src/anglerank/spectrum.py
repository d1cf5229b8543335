"""Certified enclosures of Frobenius eigenvalues and their normalised angles.

Roots are approximated by Aberth-Ehrlich iteration in mpmath and then
certified with the Weierstrass inclusion theorem: for a monic squarefree
polynomial h of degree n and distinct approximations z_1..z_n, the discs
D(z_i, n |W_i|) with W_i = h(z_i) / prod_{j != i} (z_i - z_j) cover all roots,
and every disc disjoint from the others contains exactly one root.  The
residuals W_i are evaluated exactly in dyadic integer arithmetic, so the radii
are rigorous upper bounds.

Real roots of a Weil polynomial can only be +-sqrt(q); they are divided out
exactly before any numerics and carry exact angles 0 and 1.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, isqrt
from typing import Sequence

import mpmath
import numpy as np
from mpmath import iv

from . import polyarith as P
from .errors import PrecisionExhausted, RootModulusViolation
from .weil import WeilPolynomial

DEFAULT_PRECISION = 128
DEFAULT_CAP = 16384
_GUARD = 32


@contextmanager
def ivprec(bits: int):
    """Temporarily set the working precision of mpmath's interval context."""
    old = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = old


def mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = x._mpf_
    if not man:
        return Fraction(0)
    v = Fraction(int(man) * 2 ** exp) if exp >= 0 else Fraction(int(man), 2 ** (-exp))
    return -v if sign else v


def _sqrt_up(x: Fraction, extra_bits: int = 64) -> Fraction:
    """A dyadic upper bound for sqrt(x), relative accuracy about 2^-extra_bits."""
    if x <= 0:
        return Fraction(0)
    mag = (x.numerator.bit_length() - x.denominator.bit_length()) // 2
    s = max(0, extra_bits - mag)
    scaled = x * 4 ** s
    return Fraction(isqrt(-(-scaled.numerator // scaled.denominator)) + 1, 2 ** s)


def _modulus_contains_sqrtq(abs2: Fraction, r: Fraction, q: int) -> bool:
    """Does [|c| - r, |c| + r] contain sqrt(q), given |c|^2 = abs2?  Exact."""
    # sqrt(q) <= |c| + r
    lhs = q + r * r - abs2
    upper_ok = lhs <= 0 or lhs * lhs <= 4 * r * r * q
    # |c| - r <= sqrt(q)
    lhs = abs2 - q - r * r
    lower_ok = lhs <= 0 or lhs * lhs <= 4 * r * r * q
    return upper_ok and lower_ok


@dataclass(frozen=True)
class RootBall:
    """Closed disc centre +- radius containing exactly one distinct root."""

    center: mpmath.mpc
    radius: Fraction
    multiplicity: int
    real_sign: int = 0  # +1 / -1 for the exact roots +-sqrt(q)

    @property
    def re(self) -> Fraction:
        return mpf_to_fraction(self.center.real)

    @property
    def im(self) -> Fraction:
        return mpf_to_fraction(self.center.imag)

    def conjugate(self) -> "RootBall":
        if self.real_sign:
            return self
        re, im = self.center.real, self.center.imag
        bits = max(re.man.bit_length(), im.man.bit_length(), 53)
        with mpmath.workprec(bits):  # exact: mpc() rounds to the ambient precision
            c = mpmath.mpc(re, -im)
        return RootBall(c, self.radius, self.multiplicity, 0, self._q)

    def box(self, prec: int):
        """Real and imaginary interval enclosures (mpmath iv) at ``prec`` bits."""
        with ivprec(prec):
            if self.real_sign:
                s = iv.sqrt(iv.mpf(self._q))
                return (s if self.real_sign > 0 else -s), iv.mpf(0)
            r = iv.mpf(self.radius.numerator) / self.radius.denominator
            re = iv.mpf(self.center.real)
            im = iv.mpf(self.center.imag)
            return re + iv.mpf([-1, 1]) * r, im + iv.mpf([-1, 1]) * r

    def angle(self, prec: int):
        """Certified interval for arg(z)/pi."""
        with ivprec(prec):
            if self.real_sign > 0:
                return iv.mpf(0)
            if self.real_sign < 0:
                return iv.mpf(1)
            re, im = self.box(prec)
            return iv.atan2(im, re) / iv.pi

    _q: int = field(default=0, repr=False, compare=False)


@dataclass(frozen=True)
class _Factor:
    coeffs: tuple[int, ...]
    multiplicity: int
    approx: tuple  # mpc approximations of all roots


@dataclass(frozen=True)
class FrobeniusSpectrum:
    """Certified eigenvalues alpha_1..alpha_2g with alpha_{i+g} = conj(alpha_i).

    ``upper`` lists alpha_1..alpha_g (angles in [0, 1], ascending).  Repeated
    roots appear once per copy; all copies are the same RootBall object.
    """

    weil: WeilPolynomial
    upper: tuple[RootBall, ...]
    precision_bits: int
    distinct: tuple[RootBall, ...] = field(repr=False)
    factors: tuple[_Factor, ...] = field(repr=False, compare=False)
    real_roots: tuple[tuple[int, int], ...] = field(repr=False, default=())

    @property
    def g(self) -> int:
        return self.weil.g

    @property
    def enclosures(self) -> tuple[RootBall, ...]:
        return self.upper + tuple(b.conjugate() for b in self.upper)

    def pairing(self, i: int) -> int:
        return (i + self.g) % (2 * self.g)

    def box(self, i: int, prec: int | None = None):
        return self.enclosures[i].box(prec or self.precision_bits + _GUARD)

    def max_radius(self) -> Fraction:
        return max((b.radius for b in self.distinct), default=Fraction(0))

    def field_degree_bound(self) -> int:
        """Upper bound for [Q(all roots) : Q].

        The Galois group commutes with alpha -> q/alpha, so it embeds in the
        centraliser of that involution on the distinct roots.
        """
        pairs = sum(1 for b in self.distinct if not b.real_sign and b.im > 0)
        reals = sum(1 for b in self.distinct if b.real_sign)
        return 2 ** pairs * factorial(pairs) * factorial(reals)

    def conjugation_orbits(self) -> list[list[RootBall]]:
        orbits = []
        for b in self.distinct:
            if b.real_sign:
                orbits.append([b] * b.multiplicity)
            elif b.im > 0:
                orbits.append([b] * b.multiplicity + [b.conjugate()] * b.multiplicity)
        return orbits

    def factor_candidate(self, roots: Sequence[RootBall]) -> tuple[list, Fraction]:
        """Real coefficients of prod (x - z) over ``roots`` and a rigorous error bound."""
        n = len(roots)
        prec = self.precision_bits + 2 * n + _GUARD
        with mpmath.workprec(prec):
            coeffs = [mpmath.mpc(1)]
            for b in roots:
                z = b.center if not b.real_sign else mpmath.mpc(b.real_sign * mpmath.sqrt(self.weil.q))
                nxt = [mpmath.mpc(0)] * (len(coeffs) + 1)
                for i, c in enumerate(coeffs):
                    nxt[i + 1] += c
                    nxt[i] -= z * c
                coeffs = nxt
            big_r = max(abs(b.center) for b in roots) if roots else mpmath.mpf(0)
            rho = mpmath.mpf(self.max_radius().numerator) / self.max_radius().denominator
            rho += mpmath.ldexp(big_r + 1, -self.precision_bits)  # rounding of sqrt(q) centres
            err = mpmath.mpf(0)
            for k in range(n + 1):
                err = max(err, comb(n, k) * ((big_r + rho) ** k - big_r ** k))
            err += mpmath.ldexp((big_r + 2) ** n * 2 ** n * n, -(prec - 4))
            err += max(abs(c.imag) for c in coeffs)
            out = [c.real for c in coeffs]  # ascending
            return out, mpf_to_fraction(err * 2)

    def refine(self, target_bits: int, precision_cap: int = DEFAULT_CAP) -> "FrobeniusSpectrum":
        """Same roots and indexing at higher precision; identity if target <= current."""
        if target_bits <= self.precision_bits:
            return self
        if target_bits > precision_cap:
            raise PrecisionExhausted(f"refinement to {target_bits} bits exceeds cap {precision_cap}",
                                     bits=target_bits)
        out = _certify(self.weil, self.real_roots, list(self.factors), target_bits, precision_cap)
        for a, b in zip(self.upper, out.upper):
            if abs(a.center - b.center) > 2 * (a.radius + b.radius) + mpmath.ldexp(1, -self.precision_bits // 2):
                raise AssertionError("refinement changed the root indexing")
        return out


def _to_gauss(z) -> tuple[int, int, int]:
    """z = (X + iY) / 2^k exactly."""
    re, im = mpf_to_fraction(z.real), mpf_to_fraction(z.imag)
    k = max(re.denominator.bit_length() - 1, im.denominator.bit_length() - 1, 0)
    return int(re * 2 ** k), int(im * 2 ** k), k


def _inclusion_radii(h: Sequence[int], zs: Sequence) -> list[Fraction | None]:
    n = len(h) - 1
    gs = [_to_gauss(z) for z in zs]
    k = max(t[2] for t in gs)
    pts = [(x << (k - kk), y << (k - kk)) for x, y, kk in gs]
    radii: list[Fraction | None] = []
    for i, (x, y) in enumerate(pts):
        hr, hi = _eval_scaled(h, x, y, k)
        pr, pi = 1, 0
        for j, (u, v) in enumerate(pts):
            if j == i:
                continue
            du, dv = x - u, y - v
            pr, pi = pr * du - pi * dv, pr * dv + pi * du
        den = pr * pr + pi * pi
        if den == 0:
            radii.append(None)
            continue
        num = (hr * hr + hi * hi) * n * n
        radii.append(_sqrt_up(Fraction(num, den * 4 ** k)))
    return radii


def _eval_scaled(h: Sequence[int], x: int, y: int, k: int) -> tuple[int, int]:
    """2^{kn} h((x + iy)/2^k) as a Gaussian integer, n = deg h."""
    n = len(h) - 1
    hr, hi = 0, 0
    for j in range(n, -1, -1):
        hr, hi = hr * x - hi * y, hr * y + hi * x
        hr += h[j] << (k * (n - j))
    return hr, hi


def _aberth(h: Sequence[int], zs: list, prec: int, maxiter: int = 400) -> list:
    n = len(h) - 1
    dh = P.derivative(h)
    with mpmath.workprec(prec + _GUARD):
        zs = [mpmath.mpc(z) for z in zs]
        tol = mpmath.ldexp(1, -prec - 4)
        for _ in range(maxiter):
            worst = mpmath.mpf(0)
            for i in range(n):
                z = zs[i]
                pv = mpmath.polyval(list(reversed(h)), z)
                dv = mpmath.polyval(list(reversed(dh)), z)
                if pv == 0:
                    continue
                if dv == 0:
                    zs[i] = z * (1 + tol * 1024)
                    worst = mpmath.inf
                    continue
                ratio = pv / dv
                s = mpmath.fsum(1 / (z - w) for j, w in enumerate(zs) if j != i and z != w)
                denom = 1 - ratio * s
                step = ratio / denom if denom != 0 else ratio
                zs[i] = z - step
                worst = max(worst, abs(step) / max(1, abs(z)))
            if worst < tol:
                break
    return zs


def _initial_roots(h: Sequence[int]) -> list:
    roots = np.roots([float(c) for c in reversed(h)])
    return [mpmath.mpc(complex(r)) for r in roots]


def _symmetrize(zs: list, n: int, prec: int) -> list:
    upper = [z for z in zs if z.imag > 0]
    if 2 * len(upper) != n:
        return zs
    upper.sort(key=lambda z: (float(mpmath.arg(z)), float(abs(z))))
    with mpmath.workprec(prec + _GUARD):  # conj rounds to the ambient precision
        return upper + [mpmath.conj(z) for z in upper]


def _split_real_roots(coeffs: list[int], q: int) -> tuple[list[int], list[tuple[int, int]]]:
    """Divide out +-sqrt(q) exactly.  Returns the cofactor and [(sign, multiplicity)]."""
    rest = coeffs
    found: list[tuple[int, int]] = []
    s = isqrt(q)
    if s * s == q:
        for sign in (1, -1):
            m = 0
            while True:
                quo = P.exact_div(rest, [-sign * s, 1])
                if quo is None:
                    break
                rest, m = quo, m + 1
            if m:
                found.append((sign, m))
    else:
        m = 0
        while True:
            quo = P.exact_div(rest, [-q, 0, 1])
            if quo is None:
                break
            rest, m = quo, m + 1
        if m:
            found.extend([(1, m), (-1, m)])
    return rest, found


def _certify(f: WeilPolynomial, real_roots, factors: list[_Factor], prec: int,
             cap: int) -> FrobeniusSpectrum:
    q = f.q
    while True:
        balls: list[RootBall] = []
        groups: list[list[int]] = []  # ball indices per factor (for isolation)
        new_factors = []
        ok = True
        for fac in factors:
            h = list(fac.coeffs)
            n = len(h) - 1
            zs = _symmetrize(_aberth(h, list(fac.approx), prec), n, prec)
            new_factors.append(_Factor(fac.coeffs, fac.multiplicity, tuple(zs)))
            radii = _inclusion_radii(h, zs)
            idx = []
            for z, r in zip(zs, radii):
                if r is None:
                    ok = False
                    r = Fraction(10 ** 9)
                idx.append(len(balls))
                balls.append(RootBall(z, r, fac.multiplicity, 0, q))
            groups.append(idx)
        factors = new_factors

        cents = [(b.re, b.im) for b in balls]
        isolated = [True] * len(balls)
        for i in range(len(balls)):
            for j in range(i + 1, len(balls)):
                dx = cents[i][0] - cents[j][0]
                dy = cents[i][1] - cents[j][1]
                rr = balls[i].radius + balls[j].radius
                if dx * dx + dy * dy <= rr * rr:
                    isolated[i] = isolated[j] = False
        for i, b in enumerate(balls):
            abs2 = cents[i][0] ** 2 + cents[i][1] ** 2
            if isolated[i] and not _modulus_contains_sqrtq(abs2, b.radius, q):
                raise RootModulusViolation(
                    f"root near {mpmath.nstr(b.center, 12)} has modulus "
                    f"{mpmath.nstr(abs(b.center), 12)} != sqrt({q})"
                )
        if ok and all(isolated) and all(abs(c[1]) > b.radius for c, b in zip(cents, balls)):
            upper_balls = [b for b, c in zip(balls, cents) if c[1] > 0]
            angles = [b.angle(prec + _GUARD) for b in upper_balls]
            order = sorted(range(len(upper_balls)), key=lambda i: angles[i].mid)
            disjoint = all(angles[order[i]].b < angles[order[i + 1]].a for i in range(len(order) - 1))
            if disjoint:
                break
        if prec * 2 > cap:
            raise PrecisionExhausted(
                f"could not certify root enclosures within {cap} bits", bits=prec
            )
        prec *= 2

    exact = []
    for sign, m in real_roots:
        with mpmath.workprec(prec + _GUARD):
            c = mpmath.mpc(sign * mpmath.sqrt(q))
        rad = Fraction(isqrt(q) + 2, 2 ** (prec + _GUARD - 2))
        exact.append(RootBall(c, rad, m, sign, q))
    upper_nonreal = sorted((b for b in balls if b.im > 0), key=lambda b: b.angle(prec + _GUARD).mid)
    upper: list[RootBall] = []
    for b in (x for x in exact if x.real_sign > 0):
        upper.extend([b] * (b.multiplicity // 2))
    for b in upper_nonreal:
        upper.extend([b] * b.multiplicity)
    for b in (x for x in exact if x.real_sign < 0):
        upper.extend([b] * (b.multiplicity // 2))
    distinct = tuple(exact + [b for b in balls])
    return FrobeniusSpectrum(f, tuple(upper), prec, distinct, tuple(factors), tuple(real_roots))


def compute_spectrum(f: WeilPolynomial, precision_bits: int = DEFAULT_PRECISION,
                     precision_cap: int = DEFAULT_CAP) -> FrobeniusSpectrum:
    """Certified enclosures of all Frobenius eigenvalues of ``f``.

    Raises RootModulusViolation when some root is provably off |z| = sqrt(q)
    and PrecisionExhausted when the cap is reached first.
    """
    if precision_bits > precision_cap:
        raise PrecisionExhausted(
            f"starting precision {precision_bits} exceeds cap {precision_cap}", bits=precision_bits
        )
    rest, real_roots = _split_real_roots(list(f.coeffs), f.q)
    for sign, m in real_roots:
        if m % 2:
            raise RootModulusViolation(f"real root {'+' if sign > 0 else '-'}sqrt(q) has odd multiplicity")
    factors = [
        _Factor(tuple(h), k, tuple(_initial_roots(h)))
        for h, k in P.squarefree_decomposition(rest)
    ]
    return _certify(f, real_roots, factors, precision_bits, precision_cap)


# --- angles ----------------------------------------------------------------------


@dataclass(frozen=True)
class AngleVector:
    """Certified intervals t_i = arg(alpha_i)/pi for the upper eigenvalues.

    A joined vector (angles of A followed by those of E) keeps every source
    spectrum so it can be refined and so certification knows the field.
    """

    t: tuple
    precision_bits: int
    spectra: tuple[FrobeniusSpectrum, ...] = field(repr=False)
    _refined: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def g(self) -> int:
        return len(self.t)

    @property
    def q(self) -> int:
        return self.spectra[0].weil.q

    def field_degree_bound(self) -> int:
        out = 1
        for s in self.spectra:
            out *= s.field_degree_bound()
        return out

    def max_width(self):
        return max((x.delta for x in self.t), default=iv.mpf(0))

    def refined(self, bits: int, precision_cap: int = DEFAULT_CAP) -> "AngleVector":
        if bits <= self.precision_bits:
            return self
        if bits not in self._refined:
            spectra = tuple(s.refine(bits, precision_cap) for s in self.spectra)
            self._refined[bits] = _angles_of(spectra)
        return self._refined[bits]

    def join(self, other: "AngleVector") -> "AngleVector":
        if other.q != self.q:
            raise ValueError("angle vectors over different fields")
        return _angles_of(self.spectra + other.spectra)


def _angles_of(spectra: Sequence[FrobeniusSpectrum]) -> AngleVector:
    prec = min(s.precision_bits for s in spectra)
    t = []
    for s in spectra:
        t.extend(b.angle(s.precision_bits + _GUARD) for b in s.upper)
    return AngleVector(tuple(t), prec, tuple(spectra))


def angles(s: FrobeniusSpectrum) -> AngleVector:
    return _angles_of((s,))
