from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anglerank import intlinalg as L
from anglerank.relations import (
    LemmaVerdict,
    Status,
    angle_rank,
    certify_relation,
    check_lemma_form,
    endpoints,
    find_relation_lattice,
    galois_stability_probe,
    lattice_from_basis,
)
from anglerank.spectrum import angles, compute_spectrum
from anglerank.weil import base_extend, enumerate_weil_polynomials, parse_weil, simplicity, weil_product

from conftest import pipeline


def lattice(coeffs, q, **kw):
    av = angles(compute_spectrum(parse_weil(coeffs, q)))
    return av, find_relation_lattice(av, **kw)


# --- detection ----------------------------------------------------------------------


def test_supersingular_relation():
    _, lat = lattice([2, 0, 1], 2)
    assert lat.exact == ((2,),)
    assert lat.saturated == ((1,),) and lat.saturated_values == (Fraction(1, 2),)
    assert lat.angle_rank == angle_rank(lat) == 0
    assert lat.status is Status.CERTIFIED and lat.stable


def test_ordinary_no_relation_matches_denominator_scan():
    av, lat = lattice([2, -1, 1], 2, height_bound=10**6, denominator_bound=10**4)
    assert lat.exact == () and lat.angle_rank == 1
    # oracle: no fraction a/b with b <= 10^4 lies in the certified interval for t_1
    lo, hi = endpoints(av.t[0])
    with mpmath.workprec(av.precision_bits + 64):
        for b in range(1, 10**4 + 1):
            a = int(mpmath.nint(lo * b))
            assert not any(lo <= mpmath.mpf(k) / b <= hi for k in (a - 1, a, a + 1))


def test_product_relations():
    # roots of x^2 + x + 2 are negatives of those of x^2 - x + 2, and x^2 + 2 gives beta = -1
    _, lat = lattice([8, 0, 10, 0, 5, 0, 1], 2)
    assert lat.angle_rank == 1
    # with angles sorted ascending: beta_1 beta_3 = 1 and beta_2^2 = 1
    assert lat.contains((1, 0, 1)) and lat.contains((0, 2, 0)) and lat.contains((0, 1, 0))
    assert not lat.contains((1, 0, 0))


def test_lemma_polynomial_has_angle_rank_two():
    _, lat = lattice([27, 9, -6, -3, -2, 1, 1], 3)
    assert lat.angle_rank == 2 and lat.certified
    assert L.rank([list(r) for r in lat.saturated]) == L.rank([list(r) for r in lat.exact])


# --- certificates -------------------------------------------------------------------


def test_certify_examples():
    ss = compute_spectrum(parse_weil([2, 0, 1], 2))
    ordinary = compute_spectrum(parse_weil([2, -1, 1], 2))
    assert certify_relation(ss, (2,), 1).status is Status.CERTIFIED
    assert certify_relation(ordinary, (1,), Fraction(1, 2)).status is Status.REFUTED
    assert certify_relation(ordinary, (0,), 0).status is Status.CERTIFIED


def test_large_denominator_is_only_heuristic():
    ss = compute_spectrum(parse_weil([2, 0, 1], 2))
    assert certify_relation(ss, (2,), 1, denominator_bound=1).status is Status.CERTIFIED
    assert certify_relation(ss, (1,), Fraction(1, 2), denominator_bound=1).status is Status.HEURISTIC


def test_certified_relations_reverify_at_double_precision(generated_corpus):
    for rec in generated_corpus[::3]:
        p = pipeline(tuple(rec["coeffs"]), rec["q"])
        lat = p.lattice
        av2 = p.angles.refined(2 * lat.precision_bits)
        for c in lat.certificates:
            if c.status is Status.CERTIFIED:
                again = certify_relation(av2, c.vector, c.claimed, lat.denominator_bound)
                assert again.status is Status.CERTIFIED, rec["label"]


# --- lemma form and symmetry probe --------------------------------------------------


def test_lemma_form_examples():
    ok = check_lemma_form(lattice_from_basis(3, [[3, 3, 3]]))
    assert ok.verdict is LemmaVerdict.PASS and ok.N == 3 and ok.signs == (1, 1, 1)
    bad = check_lemma_form(lattice_from_basis(3, [[1, -1, 0]]))
    assert bad.verdict is LemmaVerdict.FAIL and bad.witness == (1, -1, 0)
    assert check_lemma_form(lattice_from_basis(3, [])).verdict is LemmaVerdict.NOT_APPLICABLE


def test_lemma_form_records_sign_flips():
    lc = check_lemma_form(lattice_from_basis(3, [[2, -2, 2]]))
    assert lc.verdict is LemmaVerdict.PASS and lc.N == 2 and lc.signs == (1, -1, 1)


def test_galois_probe_examples():
    assert galois_stability_probe(lattice_from_basis(3, [[3, 3, 3]]))
    assert not galois_stability_probe(lattice_from_basis(3, [[1, -1, 0]]))
    assert galois_stability_probe(lattice_from_basis(3, []))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.lists(st.sampled_from([1, -1]), min_size=3, max_size=3))
def test_lemma_form_accepts_every_signed_multiple(n, signs):
    lc = check_lemma_form(lattice_from_basis(3, [[n * s for s in signs]]))
    assert lc.verdict is LemmaVerdict.PASS
    assert [lc.N * s for s in lc.signs] in ([n * s for s in signs], [-n * s for s in signs])


# --- invariants ---------------------------------------------------------------------


def test_rank_identity_on_corpus(generated_corpus):
    for rec in generated_corpus:
        lat = pipeline(tuple(rec["coeffs"]), rec["q"]).lattice
        assert 0 <= lat.angle_rank <= lat.g
        exact_rank = L.rank([list(r) for r in lat.exact]) if lat.exact else 0
        assert exact_rank + lat.angle_rank == lat.g


def test_saturated_values_reverify(generated_corpus):
    for rec in generated_corpus:
        p = pipeline(tuple(rec["coeffs"]), rec["q"])
        for lam, val in zip(p.lattice.saturated, p.lattice.saturated_values):
            assert certify_relation(p.angles, lam, val).status is not Status.REFUTED


def test_base_extension_invariance_on_corpus(generated_corpus):
    for rec in generated_corpus:
        f = parse_weil(rec["coeffs"], rec["q"])
        base = pipeline(tuple(rec["coeffs"]), rec["q"]).lattice.angle_rank
        for m in (2, 3):
            fm = base_extend(f, m)
            assert pipeline(fm.coeffs, fm.q).lattice.angle_rank == base, (rec["label"], m)


def test_angle_rank_subadditive_on_products():
    polys = enumerate_weil_polynomials(1, 2) + enumerate_weil_polynomials(2, 2)[::5]
    for i, a in enumerate(polys):
        for b in polys[i:]:
            prod = weil_product([a, b])
            ra = pipeline(a.coeffs, a.q).lattice.angle_rank
            rb = pipeline(b.coeffs, b.q).lattice.angle_rank
            assert pipeline(prod.coeffs, prod.q).lattice.angle_rank <= ra + rb


def test_lemma_holds_on_simple_corpus_entries(generated_corpus):
    seen = 0
    for rec in generated_corpus:
        p = pipeline(tuple(rec["coeffs"]), rec["q"])
        if p.lattice.angle_rank != p.weil.g - 1 or not p.lattice.certified or p.weil.g < 2:
            continue
        sv = simplicity(p.weil, p.spectrum)
        if not sv.at_least_heuristic:
            continue
        seen += 1
        assert check_lemma_form(p.lattice, sv).verdict is LemmaVerdict.PASS, rec["label"]
    assert seen >= 1


def test_strict_detection_raises_when_cap_blocks_confirmation():
    from anglerank.errors import UnstableDetection

    av = angles(compute_spectrum(parse_weil([2, -1, 1], 2), 64, 64))
    with pytest.raises(UnstableDetection):
        find_relation_lattice(av, precision_cap=64, strict=True)
