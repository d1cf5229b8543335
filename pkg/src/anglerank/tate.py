"""Tate, Lefschetz and exotic class dimensions for A, A x A and A x E.

H^{2n}(X) = Lambda^{2n} H^1(X) has a basis of wedge monomials in Frobenius
eigenvectors.  A monomial is recorded by its *profile*: how many copies of
each eigenvalue slot it uses.  Every eigenvalue has modulus sqrt(q), so the
monomial is a (geometric) Tate class iff its folded exponent
v_i = #alpha_i - #conj(alpha_i) lies in the saturated relation lattice.  It is
Lefschetz iff its slots can be matched into degree-2 Tate pairs.

Counting is organised by folded exponent: per lattice coordinate the pair
(alpha_i, conj alpha_i) contributes a small generating polynomial in the
degree, so the full table costs one lattice-membership test per v in a box
rather than one per profile.
"""

from __future__ import annotations

import enum
import math
import itertools
from fractions import Fraction
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Sequence

from .relations import (
    AngleLattice,
    Status,
    certify_relation,
    default_denominator_bound,
    endpoints,
    find_relation_lattice,
)
from .spectrum import AngleVector, FrobeniusSpectrum, mpf_to_fraction
from .weil import NewtonClass


class VarietyKind(str, enum.Enum):
    SINGLE = "A"
    SELF_PRODUCT = "AxA"
    PRODUCT_WITH_E = "AxE"


@dataclass(frozen=True)
class Slot:
    coord: int  # lattice coordinate (first copy of the eigenvalue)
    sign: int  # +1 for alpha, -1 for its conjugate
    multiplicity: int

    @property
    def vector_entry(self) -> tuple[int, int]:
        return self.coord, self.sign


@dataclass(frozen=True)
class VarietySpec:
    kind: VarietyKind
    g: int
    slots: tuple[Slot, ...]
    lattice_dim: int
    e_class: NewtonClass | None = None
    e_trace: int | None = None

    @property
    def dim(self) -> int:
        return {VarietyKind.SINGLE: self.g, VarietyKind.SELF_PRODUCT: 2 * self.g,
                VarietyKind.PRODUCT_WITH_E: self.g + 1}[self.kind]

    @property
    def h1_dim(self) -> int:
        return sum(s.multiplicity for s in self.slots)

    def pairs(self) -> list[tuple[int, int, int]]:
        """(coord, index of + slot, index of - slot) per lattice coordinate in use."""
        out = []
        for i, s in enumerate(self.slots):
            if s.sign > 0:
                j = next(k for k, t in enumerate(self.slots) if t.coord == s.coord and t.sign < 0)
                out.append((s.coord, i, j))
        return out


def variety(spectrum: FrobeniusSpectrum, kind: VarietyKind | str,
            e_spectrum: FrobeniusSpectrum | None = None,
            e_class: NewtonClass | None = None) -> VarietySpec:
    """Eigenvalue slots of H^1(X); repeated eigenvalues merged with summed multiplicity."""
    kind = VarietyKind(kind)
    g = spectrum.g
    k = 2 if kind is VarietyKind.SELF_PRODUCT else 1
    slots: list[Slot] = []
    seen: dict[int, int] = {}
    for i, b in enumerate(spectrum.upper):
        if id(b) in seen:
            continue
        seen[id(b)] = i
        m = sum(1 for c in spectrum.upper if c is b)
        slots += [Slot(i, 1, k * m), Slot(i, -1, k * m)]
    lattice_dim = g
    e_trace = None
    if kind is VarietyKind.PRODUCT_WITH_E:
        if e_spectrum is None or e_spectrum.g != 1:
            raise ValueError("A x E needs the spectrum of an elliptic curve")
        slots += [Slot(g, 1, 1), Slot(g, -1, 1)]
        lattice_dim = g + 1
        e_trace = -e_spectrum.weil.coeffs[1]
    return VarietySpec(kind, g, tuple(slots), lattice_dim, e_class, e_trace)


@dataclass(frozen=True)
class Profile:
    counts: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.counts)

    def folded(self, X: VarietySpec) -> tuple[int, ...]:
        v = [0] * X.lattice_dim
        for c, s in zip(self.counts, X.slots):
            v[s.coord] += s.sign * c
        return tuple(v)

    def weight(self, X: VarietySpec) -> int:
        w = 1
        for c, s in zip(self.counts, X.slots):
            w *= comb(s.multiplicity, c)
        return w


def is_tate(profile: Profile, lat: AngleLattice, X: VarietySpec) -> bool:
    return lat.contains(profile.folded(X))


def profiles(X: VarietySpec, degree: int | None = None):
    """All profiles (optionally of one degree), in lexicographic order."""
    for counts in itertools.product(*(range(s.multiplicity + 1) for s in X.slots)):
        if degree is None or sum(counts) == degree:
            yield Profile(counts)


# --- Lefschetz decomposability -------------------------------------------------


def degree2_partners(X: VarietySpec, lat: AngleLattice) -> tuple[tuple[int, ...], ...]:
    """For each slot, the slots it may pair with in a degree-2 Tate class."""
    n = len(X.slots)
    out = []
    for i, s in enumerate(X.slots):
        partners = []
        for j, t in enumerate(X.slots):
            if j == i and s.multiplicity < 2:
                continue
            v = [0] * X.lattice_dim
            v[s.coord] += s.sign
            v[t.coord] += t.sign
            if lat.contains(v):
                partners.append(j)
        out.append(tuple(partners))
    assert len(out) == n
    return tuple(out)


def _has_nontrivial_pairs(X: VarietySpec, partners) -> bool:
    for i, ps in enumerate(partners):
        for j in ps:
            a, b = X.slots[i], X.slots[j]
            if not (a.coord == b.coord and a.sign == -b.sign):
                return True
    return False


def _decomposer(partners):
    @lru_cache(maxsize=None)
    def decomposable(counts: tuple[int, ...]) -> bool:
        i = next((k for k, c in enumerate(counts) if c), None)
        if i is None:
            return True
        for j in partners[i]:
            need = 2 if j == i else 1
            if counts[j] < need or (j != i and counts[i] < 1):
                continue
            nxt = list(counts)
            nxt[i] -= 1
            nxt[j] -= 1
            if decomposable(tuple(nxt)):
                return True
        return False

    return decomposable


def is_lefschetz(profile: Profile, X: VarietySpec, lat: AngleLattice) -> bool:
    if profile.degree % 2:
        return False
    return _decomposer(degree2_partners(X, lat))(profile.counts)


# --- folded counting ----------------------------------------------------------------


def _pair_table(m_plus: int, m_minus: int) -> dict[int, list[tuple[int, int, int, int]]]:
    table: dict[int, list] = {}
    for a in range(m_plus + 1):
        for b in range(m_minus + 1):
            table.setdefault(a - b, []).append((a, b, a + b, comb(m_plus, a) * comb(m_minus, b)))
    return table


def _poly_mul(f: list[int], g: list[int]) -> list[int]:
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return out


@dataclass(frozen=True)
class _Job:
    X: VarietySpec
    lat: AngleLattice
    first_values: tuple[int, ...]


def _count_chunk(job: _Job) -> tuple[list[int], list[int]]:
    X, lat = job.X, job.lat
    pairs = X.pairs()
    tables = [_pair_table(X.slots[ip].multiplicity, X.slots[im].multiplicity) for _, ip, im in pairs]
    polys = [{v: _degree_poly(rows) for v, rows in t.items()} for t in tables]
    top = X.h1_dim
    tate = [0] * (top + 1)
    lef = [0] * (top + 1)
    partners = degree2_partners(X, lat)
    general = _has_nontrivial_pairs(X, partners)
    decomposable = _decomposer(partners) if general else None
    ranges = [sorted(t) for t in tables]
    ranges[0] = [v for v in ranges[0] if v in job.first_values]
    for vs in itertools.product(*ranges):
        v = [0] * X.lattice_dim
        for (coord, _, _), x in zip(pairs, vs):
            v[coord] = x
        if not lat.contains(v):
            continue
        poly = [1]
        for p, x in zip(polys, vs):
            poly = _poly_mul(poly, p[x])
        for d, w in enumerate(poly):
            tate[d] += w
        if not general:
            if not any(vs):
                for d, w in enumerate(poly):
                    lef[d] += w
            continue
        for choice in itertools.product(*(t[x] for t, x in zip(tables, vs))):
            counts = [0] * len(X.slots)
            weight = 1
            deg = 0
            for (_, ip, im), (a, b, d, w) in zip(pairs, choice):
                counts[ip], counts[im] = a, b
                weight *= w
                deg += d
            if deg % 2 == 0 and decomposable(tuple(counts)):
                lef[deg] += weight
    return tate, lef


def _degree_poly(rows) -> list[int]:
    top = max(d for _, _, d, _ in rows)
    out = [0] * (top + 1)
    for _, _, d, w in rows:
        out[d] += w
    return out


def dimension_tables(X: VarietySpec, lat: AngleLattice, workers: int = 1) -> tuple[list[int], list[int]]:
    """Tate and Lefschetz dimensions in every cohomological degree 0..2 dim X.

    With workers > 1 the folded-exponent box is split by its first coordinate
    across processes; totals are plain integer sums, so they do not depend on
    scheduling.
    """
    if lat.g != X.lattice_dim:
        raise ValueError(f"lattice of rank {lat.g} does not match variety with {X.lattice_dim} angles")
    first = sorted(_pair_table(X.slots[X.pairs()[0][1]].multiplicity,
                               X.slots[X.pairs()[0][2]].multiplicity))
    if workers <= 1:
        return _count_chunk(_Job(X, lat, tuple(first)))
    chunks = [_Job(X, lat, (v,)) for v in first]
    tate = [0] * (X.h1_dim + 1)
    lef = [0] * (X.h1_dim + 1)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for t, l in pool.map(_count_chunk, chunks):
            tate = [a + b for a, b in zip(tate, t)]
            lef = [a + b for a, b in zip(lef, l)]
    return tate, lef


def tate_dimension(X: VarietySpec, degree: int, lat: AngleLattice) -> int:
    if degree % 2 or not 0 <= degree <= 2 * X.dim:
        raise ValueError(f"degree must be even in [0, {2 * X.dim}]")
    return dimension_tables(X, lat)[0][degree]


def lefschetz_dimension(X: VarietySpec, degree: int, lat: AngleLattice) -> int:
    if degree % 2 or not 0 <= degree <= 2 * X.dim:
        raise ValueError(f"degree must be even in [0, {2 * X.dim}]")
    return dimension_tables(X, lat)[1][degree]


# --- reports ------------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeRow:
    degree: int
    tate: int
    lefschetz: int
    exotic: int


@dataclass(frozen=True)
class CorollaryCheck:
    id: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ExoticReport:
    kind: VarietyKind
    rows: tuple[DegreeRow, ...]
    middle_degree: int
    corollary_checks: tuple[CorollaryCheck, ...] = ()
    certified: bool = False
    e_class: NewtonClass | None = None
    e_trace: int | None = None

    def row(self, degree: int) -> DegreeRow:
        return next(r for r in self.rows if r.degree == degree)

    def exotic(self, degree: int) -> int:
        return self.row(degree).exotic

    @property
    def failures(self) -> list[CorollaryCheck]:
        return [c for c in self.corollary_checks if not c.passed]


def _outside_middle_zero(rows, middle) -> tuple[bool, str]:
    bad = [r.degree for r in rows if r.degree != middle and r.exotic]
    return not bad, "exotic classes only in middle degree" if not bad else f"exotic classes in degrees {bad}"


def corollary_checks(X: VarietySpec, rows: Sequence[DegreeRow], angle_rank: int,
                     simple: bool) -> list[CorollaryCheck]:
    """Executable versions of the structural corollaries, for inputs that qualify."""
    g = X.g
    middle = X.dim
    mid = next((r.exotic for r in rows if r.degree == middle), 0)
    total = sum(r.exotic for r in rows)
    checks: list[CorollaryCheck] = []
    odd_regime = simple and g > 1 and g % 2 == 1 and angle_rank in (g - 1, g)
    if X.kind is VarietyKind.SELF_PRODUCT and odd_regime:
        ok, why = _outside_middle_zero(rows, middle)
        checks.append(CorollaryCheck("C1", ok, why))
        checks.append(CorollaryCheck("C2", mid in (0, 2), f"middle exotic dimension {mid}"))
    elif X.kind is VarietyKind.PRODUCT_WITH_E and odd_regime:
        ok, why = _outside_middle_zero(rows, middle)
        checks.append(CorollaryCheck("C1", ok, why))
        ss = X.e_class is NewtonClass.SUPERSINGULAR
        if angle_rank == g - 1:
            if ss:
                checks.append(CorollaryCheck("C3", mid in (0, 4), f"middle exotic dimension {mid}"))
            else:
                checks.append(CorollaryCheck("C4", total == 0, f"total exotic dimension {total}"))
        else:
            if ss:
                ok5 = total == 0
            else:
                ok5 = ok and mid in (0, 2)
            checks.append(CorollaryCheck(
                "C5", ok5, f"E {'supersingular' if ss else 'ordinary'}: total {total}, middle {mid}"))
    elif X.kind is VarietyKind.SINGLE and simple and g >= 2 and g % 2 == 0 and angle_rank == g - 1:
        ok, why = _outside_middle_zero(rows, middle)
        checks.append(CorollaryCheck("C6", ok and mid in (0, 2), f"{why}; middle exotic dimension {mid}"))
    return checks


def exotic_report(X: VarietySpec, lat: AngleLattice, angle_rank: int | None = None,
                  simple: bool = False, workers: int = 1) -> ExoticReport:
    """Per-degree table plus the corollary checks that apply.

    ``angle_rank`` is that of A alone (the joint lattice of A x E has one more
    coordinate); when omitted it is read off ``lat`` for A and A x A.
    """
    tate, lef = dimension_tables(X, lat, workers)
    rows = tuple(DegreeRow(d, tate[d], lef[d], tate[d] - lef[d]) for d in range(0, 2 * X.dim + 1, 2))
    if angle_rank is None:
        if X.kind is VarietyKind.PRODUCT_WITH_E:
            raise ValueError("pass the angle rank of A for A x E")
        angle_rank = lat.angle_rank
    checks = corollary_checks(X, rows, angle_rank, simple)
    return ExoticReport(X.kind, rows, X.dim, tuple(checks), lat.certified, X.e_class, X.e_trace)


def joint_lattice(a: AngleVector, e_angle: AngleVector, **kwargs) -> AngleLattice:
    """Relation lattice of the g + 1 angles of A x E."""
    return find_relation_lattice(a.join(e_angle), **kwargs)


def is_tate_direct(v: Sequence[int], av: AngleVector, denominator_bound: int | None = None,
                   precision_cap: int | None = None) -> bool | None:
    """Lattice-free Tate test for a folded exponent v.

    Guesses sum v_i t_i mod 1 by the best rational approximation with
    denominator at most D, then certifies or refutes that guess.  Returns None
    when neither is possible at the available precision.
    """
    if not any(v):
        return True
    D = denominator_bound or default_denominator_bound(av.g)
    x = sum(vi * mpf_to_fraction(endpoints(t)[0]) for vi, t in zip(v, av.t) if vi)
    guess = Fraction(x).limit_denominator(D)
    guess -= math.floor(guess)
    kwargs = {} if precision_cap is None else {"precision_cap": precision_cap}
    cert = certify_relation(av, v, guess, D, **kwargs)
    if cert.status is Status.CERTIFIED:
        return True
    if cert.status is Status.REFUTED:
        return False
    return None
