"""End-to-end analysis of Weil polynomials, corpus runs, self-test and import.

A report is assembled stage by stage.  A stage that fails records a tagged
error and the stages depending on it are skipped, so every record yields a
(possibly partial) report.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import re
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

import jsonschema

from . import tate as T
from .errors import AngleRankError, MalformedRow, PrecisionExhausted
from .relations import (
    DEFAULT_HEIGHT_BOUND,
    AngleLattice,
    Status,
    check_lemma_form,
    default_denominator_bound,
    find_relation_lattice,
)
from .spectrum import DEFAULT_CAP, DEFAULT_PRECISION, angles, compute_spectrum
from .weil import (
    DEFAULT_M_MAX,
    AbsSimple,
    NewtonClass,
    WeilPolynomial,
    base_extend,
    classify_newton,
    is_prime,
    newton_polygon,
    parse_weil,
    prime_power,
    simplicity,
)

log = logging.getLogger(__name__)

EXIT_OK, EXIT_INPUT, EXIT_RECORD, EXIT_SELFTEST = 0, 1, 2, 3


@dataclass(frozen=True)
class Config:
    precision_bits: int = DEFAULT_PRECISION
    precision_cap: int = DEFAULT_CAP
    denom_bound: int | None = None
    height_bound: int = DEFAULT_HEIGHT_BOUND
    m_max: int = DEFAULT_M_MAX
    degree: int | None = None
    threads: int = 1

    def lattice_kwargs(self, g: int) -> dict:
        return dict(height_bound=self.height_bound,
                    denominator_bound=self.denom_bound or default_denominator_bound(g),
                    precision_cap=self.precision_cap)


# --- elliptic curves ------------------------------------------------------------------


def is_elliptic_trace(a: int, q: int) -> bool:
    """Whether x^2 - a x + q is the Frobenius polynomial of an elliptic curve over F_q."""
    p, r = prime_power(q)
    if a * a > 4 * q:
        return False
    if a % p:
        return True
    if r % 2:
        return a == 0 or (p in (2, 3) and a * a == p * q)
    return (a * a == 4 * q or (a * a == q and p % 3 != 1) or (a == 0 and p % 4 != 1))


def supersingular_trace(q: int) -> int:
    """Smallest admissible supersingular trace (nonnegative sign)."""
    s = math.isqrt(q)
    p, _ = prime_power(q)
    for a in (0, s, 2 * s, *range(1, 2 * s + 1)):
        if a % p == 0 and is_elliptic_trace(a, q):
            return a
    raise AssertionError(f"no supersingular curve over F_{q}")


def ordinary_trace(q: int) -> int:
    p, _ = prime_power(q)
    return next(a for a in range(1, 2 * math.isqrt(q) + 1) if a % p)


def elliptic(a: int, q: int) -> WeilPolynomial:
    return parse_weil([q, -a, 1], q)


# --- applicability ---------------------------------------------------------------------


@dataclass(frozen=True)
class Applicability:
    theorem: str
    applies: bool
    reason: str
    conditional: bool = False


def applicability(g: int, angle_rank: int | None, absolutely_simple: str | None,
                  certified: bool, newton_class: str | None) -> list[Applicability]:
    """Which results apply, as a pure function of the computed invariants."""
    out: list[Applicability] = []
    simple_ok = absolutely_simple in (AbsSimple.YES.value, AbsSimple.HEURISTIC_YES.value)
    known = angle_rank is not None
    ar_ok = known and angle_rank in (g - 1, g)
    cond = not certified
    simple_txt = f"absolute simplicity {absolutely_simple or 'unknown'}"
    ar_txt = f"angle rank {angle_rank if known else 'unknown'}"

    gen = simple_ok and g > 1 and g % 2 == 1 and ar_ok
    if gen:
        why = f"{simple_txt}, g = {g} odd, {ar_txt} in {{g-1, g}}: holds for AxA and AxE"
    elif g <= 1:
        why = "g = 1: needs dim A > 1"
    elif g % 2 == 0:
        why = f"g = {g} is even"
    elif not simple_ok:
        why = f"{simple_txt}"
    else:
        why = f"{ar_txt} not in {{{g - 1}, {g}}}"
    out.append(Applicability("main:general", gen, why, gen and cond))

    prime = simple_ok and g > 2 and is_prime(g)
    if prime:
        why = f"g = {g} odd prime and {simple_txt}: angle rank must be g-1 or g"
        if not gen:
            why += f"; INCONSISTENT with computed {ar_txt}"
    else:
        why = f"g = {g} not an odd prime" if not (g > 2 and is_prime(g)) else simple_txt
    out.append(Applicability("main:example:prime", prime, why, prime and cond))

    ao = simple_ok and g > 1 and newton_class == NewtonClass.ALMOST_ORDINARY.value
    if ao:
        why = f"{simple_txt} and almost ordinary"
        if not ar_ok:
            why += f"; INCONSISTENT with computed {ar_txt}"
    else:
        why = f"Newton class {newton_class}" if newton_class != NewtonClass.ALMOST_ORDINARY.value else simple_txt
        if g <= 1:
            why = "g = 1: needs dim A > 1"
    out.append(Applicability("main:example:almost-ordinary", ao, why, ao and cond))

    even = g >= 2 and g % 2 == 0 and ar_ok
    why = (f"g = {g} even and {ar_txt}: holds for A itself" if even
           else f"g = {g} odd" if g % 2 else f"{ar_txt} not in {{{g - 1}, {g}}}")
    out.append(Applicability("remark:even", even, why, even and cond))

    ss_curve = g == 1 and newton_class == NewtonClass.SUPERSINGULAR.value
    lef = known and (angle_rank == g or ss_curve)
    why = ("every Tate class on A^n is Lefschetz" + (" (supersingular elliptic curve)" if ss_curve else f" ({ar_txt} = g)")
           if lef else f"{ar_txt} < g" if known else ar_txt)
    out.append(Applicability("lefschetz:all", lef, why, lef and cond))

    if g == 1:
        out.append(Applicability("classical:g1", True, "A is an elliptic curve; product results need g > 1"))
    return out


def inconsistencies(entries: Sequence[Applicability]) -> list[str]:
    return [e.theorem for e in entries if "INCONSISTENT" in e.reason]


# --- report -----------------------------------------------------------------------------


_ROW = {"type": "object", "required": ["degree", "tate", "lefschetz", "exotic"],
        "properties": {k: {"type": "integer", "minimum": 0} for k in ("degree", "tate", "lefschetz", "exotic")}}
_NULLABLE_INT = {"type": ["integer", "null"]}

REPORT_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["label", "input", "g", "q", "p", "newton_class", "simple", "angle_rank", "lemma",
                 "tables", "corollary_checks", "applicability", "errors"],
    "properties": {
        "label": {"type": "string"},
        "input": {"type": "object"},
        "g": _NULLABLE_INT,
        "q": _NULLABLE_INT,
        "p": _NULLABLE_INT,
        "newton_class": {"type": ["string", "null"]},
        "newton_polygon": {"type": ["array", "null"]},
        "simple": {"type": ["object", "null"],
                   "required": ["irreducible", "absolutely_simple", "m_checked"]},
        "angle_rank": {"type": ["object", "null"], "required": ["value", "certified"]},
        "lattice": {"type": ["object", "null"]},
        "lemma": {"type": ["object", "null"], "required": ["verdict", "N"]},
        "elliptic": {"type": "object"},
        "tables": {"type": "object", "additionalProperties": {"type": "array", "items": _ROW}},
        "tables_certified": {"type": "object", "additionalProperties": {"type": "boolean"}},
        "corollary_checks": {"type": "array", "items": {
            "type": "object", "required": ["id", "pass"],
            "properties": {"id": {"type": "string"}, "pass": {"type": "boolean"}}}},
        "applicability": {"type": "array", "items": {
            "type": "object", "required": ["theorem", "applies", "reason"],
            "properties": {"theorem": {"type": "string"}, "applies": {"type": "boolean"},
                           "reason": {"type": "string"}, "conditional": {"type": "boolean"}}}},
        "errors": {"type": "array", "items": {
            "type": "object", "required": ["stage", "type", "message"]}},
    },
}


@dataclass
class ConjectureReport:
    label: str
    input: dict
    g: int | None = None
    q: int | None = None
    p: int | None = None
    newton_class: str | None = None
    newton_polygon: list | None = None
    simple: dict | None = None
    angle_rank: dict | None = None
    lattice: dict | None = None
    lemma: dict | None = None
    elliptic: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    tables_certified: dict = field(default_factory=dict)
    corollary_checks: list = field(default_factory=list)
    applicability: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ConjectureReport":
        jsonschema.validate(d, REPORT_SCHEMA)
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})

    @property
    def failed(self) -> bool:
        return bool(self.errors) or any(not c["pass"] for c in self.corollary_checks)


def validate(d: dict) -> None:
    jsonschema.validate(d, REPORT_SCHEMA)


class _Stages:
    def __init__(self, report: ConjectureReport):
        self.report = report

    def run(self, stage: str, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except Exception as exc:  # a failed stage must never abort the record
            log.debug("stage %s failed", stage, exc_info=True)
            self.report.errors.append({"stage": stage, "type": type(exc).__name__, "message": str(exc)})
            return None


def _rows(rep: T.ExoticReport, degree: int | None) -> list[dict]:
    return [asdict(r) for r in rep.rows if degree is None or r.degree == degree]


def _checks(rep: T.ExoticReport, table: str) -> list[dict]:
    return [{"id": c.id, "table": table, "pass": c.passed, "detail": c.detail} for c in rep.corollary_checks]


def _frac(x: Fraction) -> str:
    return str(x)


def analyze(record: dict, config: Config = Config()) -> ConjectureReport:
    label = str(record.get("label", ""))
    echo = {k: record[k] for k in ("q", "coeffs", "e_trace") if k in record}
    rep = ConjectureReport(label=label, input=echo)
    st = _Stages(rep)

    f = st.run("parse", lambda: parse_weil(record["coeffs"], record["q"]))
    if f is None:
        return rep
    rep.g, rep.q, rep.p = f.g, f.q, f.p
    g, q = f.g, f.q
    e_trace = record.get("e_trace")
    if e_trace is not None and not st.run("parse", _check_e_trace, e_trace, q):
        e_trace = None

    npoly = st.run("newton", newton_polygon, f)
    if npoly is not None:
        rep.newton_polygon = npoly.to_json()
        rep.newton_class = classify_newton(npoly, g).value

    spec = st.run("spectrum", compute_spectrum, f, config.precision_bits, config.precision_cap)
    if spec is None:
        rep.applicability = [asdict(a) for a in applicability(g, None, None, False, rep.newton_class)]
        return rep

    sv = st.run("simplicity", simplicity, f, spec, config.m_max, config.precision_cap)
    if sv is not None:
        rep.simple = {"irreducible": sv.irreducible, "certificate": sv.certificate,
                      "absolutely_simple": sv.absolutely_simple.value, "m_checked": sv.m_checked,
                      "witness_m": sv.witness_m,
                      "witness_factor": list(sv.witness_factor) if sv.witness_factor else None}
    simple_ok = bool(sv and sv.at_least_heuristic)

    av = st.run("angles", angles, spec)
    lat = st.run("lattice", find_relation_lattice, av, **config.lattice_kwargs(g)) if av else None
    if lat is not None:
        rep.angle_rank = {"value": lat.angle_rank, "certified": lat.certified,
                          "status": lat.status.value, "stable": lat.stable}
        rep.lattice = {"exact": [list(r) for r in lat.exact],
                       "saturated": [list(r) for r in lat.saturated],
                       "values": [_frac(v) for v in lat.saturated_values],
                       "precision_bits": lat.precision_bits,
                       "denominator_bound": lat.denominator_bound}
        lc = st.run("lemma", check_lemma_form, lat, sv)
        if lc is not None:
            rep.lemma = {"verdict": lc.verdict.value, "N": lc.N,
                         "signs": list(lc.signs) if lc.signs else None,
                         "witness": list(lc.witness) if lc.witness else None,
                         "certified": lc.certified, "critical": lc.critical}
            if lc.critical:
                rep.errors.append({"stage": "lemma", "type": "LemmaViolation",
                                   "message": f"certified simple input violates lemma form: {lc.witness}"})

        ar = lat.angle_rank
        t = st.run("tables:AxA", T.exotic_report, T.variety(spec, "AxA"), lat, ar, simple_ok, config.threads)
        _store(rep, "AxA", t, config)
        if g % 2 == 0:
            t = st.run("tables:A", T.exotic_report, T.variety(spec, "A"), lat, ar, simple_ok, config.threads)
            _store(rep, "A", t, config)

        curves = _curves(q, e_trace)
        for key, a in curves.items():
            if a is None:
                continue
            rep.elliptic[key] = {"trace": a, "source": "input" if a == e_trace else "default"}
            t = st.run(f"tables:{key}", _product_with_e, spec, av, a, lat, simple_ok, config)
            _store(rep, key, t, config)

    ar_val = rep.angle_rank["value"] if rep.angle_rank else None
    certified = bool(rep.angle_rank and rep.angle_rank["certified"])
    entries = applicability(g, ar_val, sv.absolutely_simple.value if sv else None, certified, rep.newton_class)
    rep.applicability = [asdict(a) for a in entries]
    for theorem in inconsistencies(entries):
        rep.errors.append({"stage": "consistency", "type": "ApplicabilityMismatch",
                           "message": f"{theorem} applies but the computed angle rank is outside {{g-1, g}}"})
    return rep


def _check_e_trace(a: int, q: int) -> bool:
    if not isinstance(a, int) or not is_elliptic_trace(a, q):
        raise ValueError(f"e_trace {a} is not the trace of an elliptic curve over F_{q}")
    return True


def _curves(q: int, e_trace: int | None) -> dict[str, int | None]:
    if e_trace is None:
        return {"AxE_ss": supersingular_trace(q), "AxE_ord": ordinary_trace(q)}
    p, _ = prime_power(q)
    if e_trace % p == 0:
        return {"AxE_ss": e_trace, "AxE_ord": None}
    return {"AxE_ss": None, "AxE_ord": e_trace}


def _product_with_e(spec, av, a: int, lat_a: AngleLattice, simple_ok: bool, config: Config) -> T.ExoticReport:
    e = elliptic(a, spec.weil.q)
    es = compute_spectrum(e, config.precision_bits, config.precision_cap)
    e_class = classify_newton(newton_polygon(e), 1)
    joint = T.joint_lattice(av, angles(es), **config.lattice_kwargs(spec.g + 1))
    X = T.variety(spec, "AxE", es, e_class)
    return T.exotic_report(X, joint, lat_a.angle_rank, simple_ok, config.threads)


def _store(rep: ConjectureReport, key: str, t: T.ExoticReport | None, config: Config) -> None:
    if t is None:
        return
    rep.tables[key] = _rows(t, config.degree)
    rep.tables_certified[key] = t.certified
    rep.corollary_checks += _checks(t, key)


# --- corpus ---------------------------------------------------------------------------------


@dataclass
class CorpusResult:
    summary: dict
    reports: list[dict]

    @property
    def exit_code(self) -> int:
        return EXIT_RECORD if self.summary["failures"] else EXIT_OK


def read_jsonl(path: str | Path) -> list[tuple[int, dict | None, str | None]]:
    """(line number, record or None, parse error or None) for each nonblank line."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                if not isinstance(rec, dict) or "coeffs" not in rec or "q" not in rec:
                    raise ValueError("record needs 'q' and 'coeffs'")
                out.append((n, rec, None))
            except ValueError as exc:
                out.append((n, None, str(exc)))
    return out


def _analyze_job(args: tuple[dict, Config]) -> dict:
    rec, config = args
    return analyze(rec, config).to_dict()


def summarize(reports: Iterable[dict], bad_lines: Sequence[tuple[int, str]] = ()) -> dict:
    newton: Counter = Counter()
    ranks: Counter = Counter()
    applies: Counter = Counter()
    failures = [{"line": n, "label": None, "stage": "input", "message": msg} for n, msg in bad_lines]
    corollary_failures = []
    count = len(bad_lines)
    for r in reports:
        count += 1
        if r.get("newton_class"):
            newton[r["newton_class"]] += 1
        if r.get("angle_rank"):
            ranks[str(r["angle_rank"]["value"])] += 1
        for a in r.get("applicability", []):
            if a["applies"]:
                applies[a["theorem"]] += 1
        for e in r.get("errors", []):
            failures.append({"line": r.get("_line"), "label": r["label"], "stage": e["stage"], "message": e["message"]})
        for c in r.get("corollary_checks", []):
            if not c["pass"]:
                corollary_failures.append({"label": r["label"], "id": c["id"], "table": c["table"]})
    failures.sort(key=lambda x: (x["line"] or 0, x["stage"]))
    return {
        "records": count,
        "newton_class": dict(sorted(newton.items())),
        "angle_rank": dict(sorted(ranks.items(), key=lambda kv: int(kv[0]))),
        "applicability": dict(sorted(applies.items())),
        "corollary_failures": corollary_failures,
        "failures": failures + [{"line": None, "label": c["label"], "stage": "corollary", "message": c["id"]}
                                for c in corollary_failures],
    }


def run_corpus(path: str | Path, config: Config = Config()) -> CorpusResult:
    """Analyze every record; the output order and contents do not depend on scheduling."""
    entries = read_jsonl(path)
    good = [(n, rec) for n, rec, err in entries if rec is not None]
    bad = [(n, err) for n, rec, err in entries if rec is None]
    jobs = [(rec, Config(**{**asdict(config), "threads": 1})) for _, rec in good]
    if config.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            reports = list(pool.map(_analyze_job, jobs))
    else:
        reports = [_analyze_job(j) for j in jobs]
    for (n, _), r in zip(good, reports):
        r["_line"] = n
    summary = summarize(reports, bad)
    for r in reports:
        r.pop("_line")
    return CorpusResult(summary, reports)


def dump_corpus(result: CorpusResult) -> str:
    """Canonical JSON text for a corpus run."""
    return json.dumps({"summary": result.summary, "reports": result.reports}, sort_keys=True, indent=1) + "\n"


# --- self-test ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class SelftestRow:
    name: str
    passed: bool
    detail: str


_BUILTIN = {
    "ss-E/F2": ([2, 0, 1], 2),
    "ord-E/F2": ([2, 1, 1], 2),
    "E-slope/F2": ([2, -2, 1], 2),
    "g2-ordinary/F2": ([4, 2, 3, 1, 1], 2),
    "product-g3/F2": ([8, 0, 10, 0, 5, 0, 1], 2),
}
_LEMMA_BUILTIN = ([27, 9, -6, -3, -2, 1, 1], 3)


def selftest(config: Config = Config()) -> tuple[bool, list[SelftestRow]]:
    rows: list[SelftestRow] = []

    def record(name: str, fn) -> None:
        try:
            ok, detail = fn()
        except PrecisionExhausted as exc:
            ok, detail = False, f"PrecisionExhausted at {exc.bits} bits: {exc}"
        except AngleRankError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        rows.append(SelftestRow(name, ok, detail))

    cache: dict[str, Any] = {}

    def lattice_of(name: str):
        if name not in cache:
            coeffs, q = _BUILTIN.get(name, _LEMMA_BUILTIN)
            f = parse_weil(coeffs, q)
            s = compute_spectrum(f, min(config.precision_bits, config.precision_cap), config.precision_cap)
            av = angles(s)
            lat = find_relation_lattice(av, **config.lattice_kwargs(f.g))
            if not lat.stable and lat.precision_bits * 2 > config.precision_cap:
                raise PrecisionExhausted(f"{name}: relation detection could not be confirmed below the cap",
                                         bits=lat.precision_bits)
            short = [c for c in lat.certificates if c.status is Status.HEURISTIC
                     and c.required_bits > config.precision_cap]
            if short:
                raise PrecisionExhausted(f"{name}: certificate needs {max(c.required_bits for c in short)} bits",
                                         bits=config.precision_cap)
            cache[name] = (f, s, av, lat)
        return cache[name]

    def supersingular():
        f, s, av, lat = lattice_of("ss-E/F2")
        if lat.angle_rank != 0:
            return False, f"angle rank {lat.angle_rank}, expected 0"
        over = [v for v in lat.saturated_values if v.denominator > lat.denominator_bound]
        if over:
            need = max(v.denominator for v in over)
            return False, (f"relation needs denominator {need} but the denominator bound is "
                           f"{lat.denominator_bound}: detection downgraded to Heuristic")
        if not lat.certified:
            return False, f"angle rank 0 but status {lat.status.value}"
        return True, "angle rank 0, certified"

    def base_extension():
        bad = []
        for name in _BUILTIN:
            f, s, av, lat = lattice_of(name)
            for m in (2, 3):
                fm = base_extend(f, m)
                sm = compute_spectrum(fm, config.precision_bits, config.precision_cap)
                lm = find_relation_lattice(angles(sm), **config.lattice_kwargs(fm.g))
                if lm.angle_rank != lat.angle_rank:
                    bad.append(f"{name} m={m}: {lat.angle_rank} -> {lm.angle_rank}")
        return not bad, "; ".join(bad) or "angle rank stable for m = 2, 3"

    def duality():
        bad = []
        for name in _BUILTIN:
            f, s, av, lat = lattice_of(name)
            for kind in ("A", "AxA"):
                X = T.variety(s, kind)
                tate, lef = T.dimension_tables(X, lat)
                top = 2 * X.dim
                for d in range(0, top + 1, 2):
                    if tate[d] != tate[top - d] or lef[d] != lef[top - d] or lef[d] > tate[d]:
                        bad.append(f"{name} {kind} degree {d}")
        return not bad, "; ".join(bad) or "duality and lefschetz <= tate hold"

    def oracle():
        bad = checked = 0
        for name, (coeffs, q) in _BUILTIN.items():
            f, s, av, lat = lattice_of(name)
            if f.g > 2:
                continue
            X = T.variety(s, "AxA")
            seen: dict = {}
            for prof in T.profiles(X):
                v = prof.folded(X)
                if v not in seen:
                    seen[v] = T.is_tate_direct(v, av, lat.denominator_bound, config.precision_cap)
                checked += 1
                if seen[v] != lat.contains(v):
                    bad += 1
        return bad == 0, f"{checked - bad}/{checked} profiles agree"

    def lemma():
        f, s, av, lat = lattice_of("lemma")
        sv = simplicity(f, s, config.m_max, config.precision_cap)
        lc = check_lemma_form(lat, sv)
        ok = lc.verdict.value == "Pass" and lat.angle_rank == 2
        return ok, f"{lc.verdict.value}, N = {lc.N}, angle rank {lat.angle_rank}"

    record("supersingular angle rank", supersingular)
    record("base-extension invariance", base_extension)
    record("duality / monotonicity", duality)
    record("oracle equivalence (g <= 2)", oracle)
    record("lemma form (g = 3)", lemma)
    return all(r.passed for r in rows), rows


# --- import ------------------------------------------------------------------------------------


@dataclass
class ImportResult:
    records: list[dict]
    warnings: list[str]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records)


_ROW_RE = re.compile(r"^\s*\"?([^,\"]+?)\"?\s*,\s*\"?(\d+)\"?\s*,\s*\"?(\[[^\]]*\])\"?\s*(?:,.*)?$")


def _normalize(line: int, label: Any, q: Any, coeffs: Any) -> dict:
    try:
        q = int(q)
        if isinstance(coeffs, str):
            coeffs = json.loads(coeffs)
        coeffs = [int(c) for c in coeffs]
    except (TypeError, ValueError) as exc:
        raise MalformedRow(line, f"cannot read q/coeffs: {exc}") from None
    try:
        parse_weil(coeffs, q)
    except AngleRankError as exc:
        raise MalformedRow(line, str(exc)) from None
    return {"label": str(label).strip(), "q": q, "coeffs": coeffs}


def _rows_from_text(text: str) -> Iterable[tuple[int, Any, Any, Any]]:
    stripped = text.lstrip()
    if stripped.startswith("["):
        for i, obj in enumerate(json.loads(text), 1):
            yield i, obj.get("label"), obj.get("q"), obj.get("coeffs", obj.get("poly"))
        return
    if stripped.startswith("{"):
        for i, line in enumerate(text.splitlines(), 1):
            if line.strip():
                obj = json.loads(line)
                yield i, obj.get("label"), obj.get("q"), obj.get("coeffs", obj.get("poly"))
        return
    for i, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        m = _ROW_RE.match(line)
        if m:
            yield i, m.group(1), m.group(2), m.group(3)
            continue
        if i == 1 and "label" in line.lower():
            continue
        cells = next(csv.reader(io.StringIO(line)))
        if len(cells) < 3:
            raise MalformedRow(i, "expected label, q, coefficient list")
        yield i, cells[0], cells[1], cells[2]


def import_lmfdb(path: str | Path) -> ImportResult:
    """Normalize a CSV or JSON export (label, q, ascending coefficients) into corpus records."""
    text = Path(path).read_text(encoding="utf-8")
    records: list[dict] = []
    warnings: list[str] = []
    seen: dict[str, int] = {}
    try:
        rows = list(_rows_from_text(text))
    except json.JSONDecodeError as exc:
        raise MalformedRow(exc.lineno, f"invalid JSON: {exc.msg}") from None
    for line, label, q, coeffs in rows:
        rec = _normalize(line, label, q, coeffs)
        if rec["label"] in seen:
            msg = f"line {line}: duplicate label {rec['label']} (first on line {seen[rec['label']]}); keeping both"
            log.warning(msg)
            warnings.append(msg)
        else:
            seen[rec["label"]] = line
        records.append(rec)
    return ImportResult(records, warnings)


__all__ = [
    "Config", "ConjectureReport", "Applicability", "applicability", "analyze", "run_corpus",
    "summarize", "selftest", "import_lmfdb", "REPORT_SCHEMA", "validate", "is_elliptic_trace",
    "supersingular_trace", "ordinary_trace",
]
