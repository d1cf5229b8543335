import json
from functools import lru_cache
from pathlib import Path
from typing import Any, NamedTuple

import pytest

from anglerank.relations import find_relation_lattice
from anglerank.spectrum import angles, compute_spectrum
from anglerank.weil import parse_weil

DATA = Path(__file__).resolve().parents[1] / "src" / "anglerank" / "data"


def load_jsonl(name: str) -> list[dict]:
    with open(DATA / name, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


class Pipeline(NamedTuple):
    weil: Any
    spectrum: Any
    angles: Any
    lattice: Any


@lru_cache(maxsize=None)
def pipeline(coeffs: tuple[int, ...], q: int) -> Pipeline:
    """Parsed polynomial, spectrum, angles and lattice with default settings, cached across tests."""
    f = parse_weil(coeffs, q)
    s = compute_spectrum(f)
    av = angles(s)
    return Pipeline(f, s, av, find_relation_lattice(av))


@pytest.fixture(scope="session")
def generated_corpus() -> list[dict]:
    return load_jsonl("generated.jsonl")


@pytest.fixture(scope="session")
def starter_path() -> Path:
    return DATA / "starter.jsonl"
