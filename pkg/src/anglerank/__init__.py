"""Frobenius angle ranks and exotic Tate classes of abelian varieties over finite fields."""

from .errors import (
    AngleRankError,
    FunctionalEquationViolation,
    MalformedRow,
    NotMonic,
    NotPrimePower,
    OddDegree,
    PrecisionExhausted,
    RootModulusViolation,
    UnstableDetection,
    WeilPolynomialError,
)
from .relations import (
    AngleLattice,
    Status,
    angle_rank,
    certify_relation,
    check_lemma_form,
    find_relation_lattice,
    galois_stability_probe,
)
from .report import ConjectureReport, Config, analyze, import_lmfdb, run_corpus, selftest
from .spectrum import AngleVector, FrobeniusSpectrum, angles, compute_spectrum
from .tate import (
    ExoticReport,
    Profile,
    VarietySpec,
    exotic_report,
    is_tate,
    joint_lattice,
    lefschetz_dimension,
    tate_dimension,
    variety,
)
from .weil import (
    AbsSimple,
    NewtonClass,
    WeilPolynomial,
    base_extend,
    classify_newton,
    newton_polygon,
    parse_weil,
    simplicity,
)

__version__ = "0.1.0"
