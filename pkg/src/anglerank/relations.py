"""Multiplicative relations among beta_i = q / alpha_i^2 and the angle rank.

With alpha_i = sqrt(q) exp(i pi t_i) we have beta_i = exp(-2 pi i t_i), so

* ``exact`` relations  prod beta_i^{e_i} = 1       <=>  sum e_i t_i in Z,
* ``saturated`` ones    prod beta_i^{e_i} = root of 1 <=> sum e_i t_i in Q.

Both lattices have the same rank; the angle rank is g minus that rank.
Detection is LLL on (t_1, ..., t_g, 1); every detected vector is then
certified with a Liouville-type separation bound or labelled heuristic.
"""

from __future__ import annotations

import enum
import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
from mpmath import iv

from . import intlinalg as L
from .errors import PrecisionExhausted, UnstableDetection
from .spectrum import DEFAULT_CAP, AngleVector, FrobeniusSpectrum, angles, ivprec
from .weil import SimplicityVerdict

log = logging.getLogger(__name__)

DEFAULT_HEIGHT_BOUND = 2 ** 20


def default_denominator_bound(g: int) -> int:
    return max(60, 4 * g * g)


class Status(str, enum.Enum):
    CERTIFIED = "Certified"
    HEURISTIC = "Heuristic"
    REFUTED = "Refuted"


@dataclass(frozen=True)
class RelationCertificate:
    vector: tuple[int, ...]
    claimed: Fraction
    status: Status
    precision_bits: int
    separation_margin: float  # log2(upper bound on |gamma|) - log2(separation bound)
    required_bits: int


@dataclass(frozen=True)
class AngleLattice:
    g: int
    exact: tuple[tuple[int, ...], ...]  # e-parts of a basis of the exact relation lattice
    exact_offsets: tuple[int, ...]  # e_0 with sum e_i t_i + e_0 = 0
    saturated: tuple[tuple[int, ...], ...]
    saturated_values: tuple[Fraction, ...]  # sum e_i t_i, reduced to [0, 1)
    certificates: tuple[RelationCertificate, ...]
    stable: bool
    height_bound: int
    denominator_bound: int
    precision_bits: int
    _sat_hnf: tuple = field(default=(), repr=False, compare=False)

    @property
    def rank(self) -> int:
        return len(self.exact)

    @property
    def angle_rank(self) -> int:
        return self.g - self.rank

    @property
    def certified(self) -> bool:
        return self.stable and all(c.status is Status.CERTIFIED for c in self.certificates)

    @property
    def status(self) -> Status:
        return Status.CERTIFIED if self.certified else Status.HEURISTIC

    def contains(self, v: Sequence[int]) -> bool:
        """Is prod beta_i^{v_i} a root of unity, i.e. v in the saturated lattice?"""
        hnf = self._sat_hnf or tuple(tuple(r) for r in L.hnf(self.saturated))
        return L.contains(hnf, list(v))

    def contains_exact(self, v: Sequence[int]) -> bool:
        return L.contains(L.hnf(self.exact), list(v)) if self.exact else not any(v)


def _interval_sum(av: AngleVector, e: Sequence[int], offset: Fraction = Fraction(0)):
    with ivprec(av.precision_bits + 64):
        acc = iv.mpf(0)
        for ei, ti in zip(e, av.t):
            if ei:
                acc += ei * ti
        if offset:
            acc -= iv.mpf(offset.numerator) / offset.denominator
        return acc


def endpoints(x) -> tuple:
    """Exact mpf endpoints of an mpmath interval."""
    lo, hi = x._mpi_
    return mpmath.mp.make_mpf(lo), mpmath.mp.make_mpf(hi)


def _totient(n: int) -> int:
    out, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            out -= out // p
        p += 1
    if m > 1:
        out -= out // m
    return out


def separation_bits(av: AngleVector, e: Sequence[int], claimed: Fraction) -> float:
    """-log2 of a lower bound for |prod beta^e * exp(2 pi i claimed) - 1| when nonzero.

    prod beta^e = X / q^h with h = sum |e_i| and X an algebraic integer all of
    whose conjugates have modulus q^h; so q^h gamma is an algebraic integer with
    conjugates at most 2 q^h in a field of degree at most d = deg * phi(b).  A
    nonzero algebraic integer has |norm| >= 1, giving
    |gamma| >= q^-h (2 q^h)^-(d - 1).
    """
    h = sum(abs(x) for x in e)
    d = av.field_degree_bound() * _totient(claimed.denominator)
    lq = math.log2(av.q)
    return h * lq + (d - 1) * (1 + h * lq)


def _judge(av: AngleVector, e: tuple[int, ...], claimed: Fraction, need: float) -> tuple[Status, float]:
    s = _interval_sum(av, e, claimed)
    with mpmath.workprec(av.precision_bits + 64):
        lo, hi = endpoints(s)
        k = int(mpmath.nint((lo + hi) / 2))
        lo, hi = lo - k, hi - k
        if lo > 0 or hi < 0:
            return Status.REFUTED, math.inf
        delta = max(abs(lo), abs(hi))
        if delta == 0:
            return Status.CERTIFIED, -math.inf
        margin = float(mpmath.log(2 * mpmath.pi * delta, 2)) + need
        return (Status.CERTIFIED if margin < 0 else Status.HEURISTIC), margin


def certify_relation(source: FrobeniusSpectrum | AngleVector, e: Sequence[int], claimed,
                     denominator_bound: int | None = None,
                     precision_cap: int = DEFAULT_CAP) -> RelationCertificate:
    """Tri-state check of sum e_i t_i == claimed (mod 1), i.e. prod beta_i^{e_i} exp(2 pi i claimed) = 1."""
    av = angles(source) if isinstance(source, FrobeniusSpectrum) else source
    claimed = Fraction(claimed)
    e = tuple(int(x) for x in e)
    need = separation_bits(av, e, claimed)
    required = int(math.ceil(need)) + 16
    status, margin = _judge(av, e, claimed, need)
    if status is Status.HEURISTIC and av.precision_bits < required <= precision_cap:
        # refutation never needs the separation bound; refine only when it might hold
        try:
            av = av.refined(1 << (required - 1).bit_length(), precision_cap)
            status, margin = _judge(av, e, claimed, need)
        except PrecisionExhausted:
            pass
    if status is Status.CERTIFIED and denominator_bound is not None and claimed.denominator > denominator_bound:
        status = Status.HEURISTIC
    return RelationCertificate(e, claimed, status, av.precision_bits, margin, required)


def _detect(av: AngleVector, height_bound: int) -> list[tuple[int, ...]]:
    """Relations (e_1..e_g, e_0) with sum e_i t_i + e_0 = 0, as a canonical HNF basis."""
    g = av.g
    scale = 2 ** (av.precision_bits // 2)
    with mpmath.workprec(av.precision_bits + 64):
        # exact endpoints: iv.mid would round to the interval context's precision
        xs = [int(mpmath.nint(sum(endpoints(t)) / 2 * scale)) for t in av.t] + [scale]
    rows = [[int(i == j) for j in range(g + 1)] + [xs[i]] for i in range(g + 1)]
    reduced = L.lll(rows)
    found = []
    for row in reduced:
        e, e0 = row[:g], row[g]
        if not any(e) or max(abs(x) for x in e) > height_bound:
            continue
        lo, hi = endpoints(_interval_sum(av, e, Fraction(-e0)))
        if lo <= 0 <= hi:
            found.append(row[: g + 1])
    if not found:
        return []
    sat = L.saturation(found, g + 1)
    return [tuple(r) for r in L.hnf(sat)]


def find_relation_lattice(av: AngleVector, height_bound: int = DEFAULT_HEIGHT_BOUND,
                          denominator_bound: int | None = None,
                          precision_cap: int = DEFAULT_CAP, strict: bool = False) -> AngleLattice:
    """Detect the relation lattice, confirm it at doubled precision, saturate and certify.

    Absence of further relations beyond the detected ones is supported
    numerically (stability under precision doubling) but not proven.
    """
    g = av.g
    if denominator_bound is None:
        denominator_bound = default_denominator_bound(g)
    prev = _detect(av, height_bound)
    stable = False
    while True:
        nxt_bits = av.precision_bits * 2
        if nxt_bits > precision_cap:
            break
        av2 = av.refined(nxt_bits, precision_cap)
        cur = _detect(av2, height_bound)
        av = av2
        if cur == prev:
            stable = True
            break
        prev = cur
    if not stable:
        msg = f"relation lattice unstable up to {av.precision_bits} bits"
        if strict:
            raise UnstableDetection(msg)
        log.warning(msg)

    exact_full = [list(r) for r in L.lll(prev)] if prev else []
    exact = tuple(tuple(r[:g]) for r in exact_full)
    offsets = tuple(r[g] for r in exact_full)
    saturated = L.saturation([list(r) for r in exact], g) if exact else []
    values = []
    for lam in saturated:
        coeffs = L.solve_rational([list(r) for r in exact], lam)
        assert coeffs is not None
        val = -sum(c * o for c, o in zip(coeffs, offsets))
        values.append(val - math.floor(val))
    certs = [certify_relation(av, e, Fraction(0), denominator_bound, precision_cap) for e in exact]
    certs += [certify_relation(av, lam, val, denominator_bound, precision_cap)
              for lam, val in zip(saturated, values)]
    return AngleLattice(
        g=g,
        exact=exact,
        exact_offsets=offsets,
        saturated=tuple(tuple(r) for r in saturated),
        saturated_values=tuple(values),
        certificates=tuple(certs),
        stable=stable,
        height_bound=height_bound,
        denominator_bound=denominator_bound,
        precision_bits=av.precision_bits,
        _sat_hnf=tuple(tuple(r) for r in L.hnf(saturated)) if saturated else (),
    )


def angle_rank(lat: AngleLattice) -> int:
    return lat.g - L.rank([list(r) for r in lat.exact]) if lat.exact else lat.g


def lattice_from_basis(g: int, exact: Sequence[Sequence[int]]) -> AngleLattice:
    """A lattice built directly from exact-relation generators (no numerics, values unknown)."""
    exact = [list(r) for r in exact if any(r)]
    basis = L.lll(L.hnf(exact)) if exact else []
    sat = L.saturation(basis, g) if basis else []
    return AngleLattice(g, tuple(map(tuple, basis)), tuple(0 for _ in basis), tuple(map(tuple, sat)),
                        tuple(Fraction(0) for _ in sat), (), True, DEFAULT_HEIGHT_BOUND,
                        default_denominator_bound(g), 0,
                        _sat_hnf=tuple(tuple(r) for r in L.hnf(sat)) if sat else ())


# --- the structural lemma ----------------------------------------------------------


class LemmaVerdict(str, enum.Enum):
    PASS = "Pass"
    FAIL = "Fail"
    NOT_APPLICABLE = "NotApplicable"


@dataclass(frozen=True)
class LemmaCheck:
    applicable: bool
    verdict: LemmaVerdict
    N: int | None = None
    signs: tuple[int, ...] | None = None
    witness: tuple[int, ...] | None = None
    certified: bool = False
    critical: bool = False


def check_lemma_form(lat: AngleLattice, simple: SimplicityVerdict | None = None) -> LemmaCheck:
    """At angle rank g-1 the exact relations must be generated by N*(+-1, ..., +-1).

    Flipping beta_i to beta_i^-1 (alpha_i to its conjugate) makes the
    generator nonnegative; the sign pattern records those flips.
    """
    if lat.angle_rank != lat.g - 1:
        return LemmaCheck(False, LemmaVerdict.NOT_APPLICABLE, certified=lat.certified)
    gen = lat.exact[0]
    signs = tuple(-1 if x < 0 else 1 for x in gen)
    normalized = [abs(x) for x in gen]
    if normalized[0] > 0 and all(x == normalized[0] for x in normalized):
        return LemmaCheck(True, LemmaVerdict.PASS, N=normalized[0], signs=signs, certified=lat.certified)
    critical = bool(simple is not None and simple.at_least_heuristic and lat.certified)
    if critical:
        log.error("lemma form violated on a certified simple input: generator %s", gen)
    return LemmaCheck(True, LemmaVerdict.FAIL, witness=tuple(gen), certified=lat.certified,
                      critical=critical)


def galois_stability_probe(lat: AngleLattice) -> bool:
    """Necessary symmetric consequence of Galois stability of the saturated lattice.

    Checks stability under e -> -e and whether, after some coordinate sign
    flip, the lattice is invariant under every permutation of coordinates.
    """
    basis = [list(r) for r in lat.saturated]
    if not basis:
        return True
    g = lat.g
    hnf = L.hnf(basis)
    if not all(L.contains(hnf, [-x for x in r]) for r in basis):
        return False
    gens = [(1, 0) + tuple(range(2, g)), tuple(range(1, g)) + (0,)] if g > 1 else []
    for signs in itertools.product((1, -1), repeat=g - 1):
        s = (1,) + signs
        flipped = [[x * si for x, si in zip(r, s)] for r in basis]
        fh = L.hnf(flipped)
        if all(L.contains(fh, [r[perm[i]] for i in range(g)]) for perm in gens for r in flipped):
            return True
    return False
