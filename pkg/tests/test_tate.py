import itertools
from functools import lru_cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anglerank.relations import lattice_from_basis
from anglerank.spectrum import angles, compute_spectrum
from anglerank.tate import (
    Profile,
    VarietyKind,
    dimension_tables,
    exotic_report,
    is_tate,
    is_tate_direct,
    joint_lattice,
    lefschetz_dimension,
    profiles,
    tate_dimension,
    variety,
)
from anglerank.weil import NewtonClass, parse_weil

from conftest import pipeline

SS = ((2, 0, 1), 2)
ORD = ((2, -1, 1), 2)
LEMMA = ((27, 9, -6, -3, -2, 1, 1), 3)


def setup(poly, kind="AxA"):
    p = pipeline(*poly)
    return variety(p.spectrum, kind), p.lattice


def brute_force_tables(X, lat):
    """Tate and Lefschetz counts by listing every basis monomial of H^*(X).

    A monomial is Lefschetz when its factors can be paired off into Tate
    pairs; this is tried over all pairings, independently of the folded
    per-slot enumeration used by the package.
    """
    vecs = []
    for s in X.slots:
        for _ in range(s.multiplicity):
            v = [0] * X.lattice_dim
            v[s.coord] += s.sign
            vecs.append(tuple(v))
    n = len(vecs)

    def fold(idx):
        return tuple(sum(vecs[i][k] for i in idx) for k in range(X.lattice_dim))

    @lru_cache(maxsize=None)
    def pairs_off(idx):
        if not idx:
            return True
        i = idx[0]
        for j in idx[1:]:
            if lat.contains(fold((i, j))) and pairs_off(tuple(k for k in idx if k not in (i, j))):
                return True
        return False

    tate, lef = [0] * (n + 1), [0] * (n + 1)
    for r in range(n + 1):
        for idx in itertools.combinations(range(n), r):
            if lat.contains(fold(idx)):
                tate[r] += 1
                if r % 2 == 0 and pairs_off(idx):
                    lef[r] += 1
    return tate, lef


# --- is_tate ------------------------------------------------------------------------


def test_balanced_profile_is_tate():
    X, lat = setup(ORD)
    assert is_tate(Profile((1, 1)), lat, X)
    X, lat = setup(LEMMA)
    assert all(is_tate(p, lat, X) for p in profiles(X) if not any(p.folded(X)))


def test_supersingular_square_is_tate():
    X, lat = setup(SS)
    assert is_tate(Profile((2, 0)), lat, X)


def test_ordinary_square_is_not_tate():
    X, lat = setup(ORD)
    assert not is_tate(Profile((2, 0)), lat, X)


# --- dimensions ---------------------------------------------------------------------


def test_elliptic_square_degree_two():
    X, lat = setup(SS)
    assert tate_dimension(X, 2, lat) == 6 and lefschetz_dimension(X, 2, lat) == 6
    X, lat = setup(ORD)
    assert tate_dimension(X, 2, lat) == 4 and lefschetz_dimension(X, 2, lat) == 4


def test_degree_zero_is_one(generated_corpus):
    for rec in generated_corpus[::7]:
        p = pipeline(tuple(rec["coeffs"]), rec["q"])
        for kind in ("A", "AxA"):
            X = variety(p.spectrum, kind)
            assert tate_dimension(X, 0, p.lattice) == lefschetz_dimension(X, 0, p.lattice) == 1


def test_odd_degree_rejected():
    X, lat = setup(SS)
    with pytest.raises(ValueError):
        tate_dimension(X, 3, lat)


def test_degree_two_is_all_lefschetz(generated_corpus):
    for rec in generated_corpus[::4]:
        p = pipeline(tuple(rec["coeffs"]), rec["q"])
        X = variety(p.spectrum, "AxA")
        tate, lef = dimension_tables(X, p.lattice)
        assert tate[2] == lef[2]


@pytest.mark.parametrize("poly,kind", [
    (SS, "AxA"), (ORD, "AxA"), (((4, 2, 3, 1, 1), 2), "A"), (((4, 2, 3, 1, 1), 2), "AxA"),
    (((4, 0, 3, 0, 1), 2), "AxA"), (((8, 0, 10, 0, 5, 0, 1), 2), "A"), (LEMMA, "A"),
])
def test_matches_brute_force(poly, kind):
    X, lat = setup(poly, kind)
    assert dimension_tables(X, lat) == brute_force_tables(X, lat)


def test_matches_brute_force_with_elliptic_factor():
    p = pipeline(*LEMMA)
    e = pipeline((3, 0, 1), 3)
    X = variety(p.spectrum, "AxE", e.spectrum, NewtonClass.SUPERSINGULAR)
    lat = joint_lattice(p.angles, e.angles)
    assert dimension_tables(X, lat) == brute_force_tables(X, lat)


def test_synthetic_lattice_matches_brute_force():
    p = pipeline(*LEMMA)
    X = variety(p.spectrum, "AxA")
    for basis in ([[1, 1, 1]], [[1, -1, 0]], [[2, 0, 0], [0, 1, 1]]):
        lat = lattice_from_basis(3, basis)
        assert dimension_tables(X, lat) == brute_force_tables(X, lat)


# --- reports ------------------------------------------------------------------------


def test_supersingular_square_has_no_exotic_classes():
    X, lat = setup(SS)
    rep = exotic_report(X, lat)
    assert [r.degree for r in rep.rows] == [0, 2, 4]
    assert all(r.exotic == 0 for r in rep.rows)


def test_full_angle_rank_has_no_exotic_classes(generated_corpus):
    seen = 0
    for rec in generated_corpus:
        p = pipeline(tuple(rec["coeffs"]), rec["q"])
        if p.lattice.angle_rank != p.weil.g:
            continue
        seen += 1
        rep = exotic_report(variety(p.spectrum, "AxA"), p.lattice)
        assert all(r.exotic == 0 for r in rep.rows), rec["label"]
    assert seen > 10


def test_lemma_polynomial_with_supersingular_curve():
    p = pipeline(*LEMMA)
    e = pipeline((3, 0, 1), 3)
    X = variety(p.spectrum, "AxE", e.spectrum, NewtonClass.SUPERSINGULAR)
    rep = exotic_report(X, joint_lattice(p.angles, e.angles), angle_rank=2, simple=True)
    ids = {c.id: c.passed for c in rep.corollary_checks}
    assert ids == {"C1": True, "C3": True}
    assert rep.exotic(rep.middle_degree) == 4


def test_lemma_polynomial_self_product():
    X, lat = setup(LEMMA)
    rep = exotic_report(X, lat, simple=True)
    assert {c.id: c.passed for c in rep.corollary_checks} == {"C1": True, "C2": True}
    assert rep.exotic(rep.middle_degree) == 2


def test_corollary_checks_only_for_qualifying_inputs():
    X, lat = setup(SS)
    assert exotic_report(X, lat, simple=True).corollary_checks == ()
    X, lat = setup(LEMMA)
    assert exotic_report(X, lat, simple=False).corollary_checks == ()


def test_product_with_e_needs_angle_rank():
    p = pipeline(*LEMMA)
    e = pipeline((3, 0, 1), 3)
    X = variety(p.spectrum, "AxE", e.spectrum, NewtonClass.SUPERSINGULAR)
    with pytest.raises(ValueError):
        exotic_report(X, joint_lattice(p.angles, e.angles))


def test_duality_and_monotonicity_on_corpus(generated_corpus):
    for rec in generated_corpus:
        p = pipeline(tuple(rec["coeffs"]), rec["q"])
        for kind in ("A", "AxA"):
            X = variety(p.spectrum, kind)
            rep = exotic_report(X, p.lattice)
            top = 2 * X.dim
            by = {r.degree: r for r in rep.rows}
            for d, r in by.items():
                assert r.tate == by[top - d].tate and r.lefschetz == by[top - d].lefschetz
                assert 0 <= r.lefschetz <= r.tate and r.exotic >= 0


def test_parallel_totals_are_deterministic():
    p = pipeline(*LEMMA)
    X = variety(p.spectrum, "AxA")
    serial = dimension_tables(X, p.lattice)
    assert dimension_tables(X, p.lattice, workers=3) == serial


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_complement_profile_is_tate_iff_original(data):
    X, lat = setup(LEMMA)
    counts = tuple(data.draw(st.integers(0, s.multiplicity)) for s in X.slots)
    comp = tuple(s.multiplicity - c for c, s in zip(counts, X.slots))
    assert is_tate(Profile(counts), lat, X) == is_tate(Profile(comp), lat, X)


# --- joint lattice and direct oracle ------------------------------------------------------


def test_joint_lattice_with_supersingular_curve():
    a = pipeline(*LEMMA).angles
    e = pipeline((3, 0, 1), 3).angles
    lat = joint_lattice(a, e)
    assert lat.contains((0, 0, 0, 2)) and lat.contains((0, 0, 0, 1))


def test_joint_lattice_same_curve():
    a = pipeline(*ORD).angles
    lat = joint_lattice(a, a)
    assert lat.contains((1, -1)) and lat.angle_rank == 1


def test_joint_lattice_unrelated_curves():
    # traces 1 and 2 over F_3: neither angle is rational and they are not twists
    a = angles(compute_spectrum(parse_weil([3, -1, 1], 3)))
    b = angles(compute_spectrum(parse_weil([3, -2, 1], 3)))
    assert joint_lattice(a, b).angle_rank == 2


def test_direct_oracle_agrees_with_lattice():
    for poly in (SS, ORD, ((4, 2, 3, 1, 1), 2), ((8, 0, 10, 0, 5, 0, 1), 2), LEMMA):
        p = pipeline(*poly)
        X = variety(p.spectrum, "AxA")
        seen = {}
        for prof in profiles(X):
            v = prof.folded(X)
            if v not in seen:
                seen[v] = is_tate_direct(v, p.angles, p.lattice.denominator_bound)
            assert seen[v] == p.lattice.contains(v), (poly, v)


def test_variety_shapes():
    p = pipeline(*LEMMA)
    e = pipeline((3, 0, 1), 3)
    assert variety(p.spectrum, "AxA").h1_dim == 12
    X = variety(p.spectrum, "AxE", e.spectrum, NewtonClass.SUPERSINGULAR)
    assert X.h1_dim == 8 and X.kind is VarietyKind.PRODUCT_WITH_E and X.e_trace == 0
    with pytest.raises(ValueError):
        variety(p.spectrum, "AxE")
