"""Regenerate the bundled corpora under src/anglerank/data.

starter.jsonl    three elliptic curves over F_2
generated.jsonl  every Weil polynomial with g <= 2 over F_2, g = 1 over F_3,
                 and an evenly spaced sample of g = 3 over F_2 and F_3
lemma_g3.jsonl   irreducible g = 3 inputs with angle rank 2 (search result)
even_g4.jsonl    the first few irreducible g = 4 inputs over F_2 with angle rank 3
"""

import argparse
import json
from pathlib import Path

from anglerank.relations import find_relation_lattice
from anglerank.spectrum import angles, compute_spectrum
from anglerank.weil import enumerate_weil_polynomials, simplicity

DATA = Path(__file__).resolve().parents[1] / "src" / "anglerank" / "data"


def label(f) -> str:
    return f"{f.g}.{f.q}." + "_".join(str(c) for c in f.coeffs[:-1])


def write(path: Path, records) -> None:
    path.write_text("".join(json.dumps(r, sort_keys=True) + "\n" for r in records), encoding="utf-8")
    print(f"{path.name}: {len(records)} records")


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--g3-sample", type=int, default=30, help="g = 3 entries taken per field")
    ap.add_argument("--g4-count", type=int, default=4, help="g = 4 entries with angle rank 3 kept")
    args = ap.parse_args()

    write(DATA / "starter.jsonl", [
        {"label": "1.2.a", "q": 2, "coeffs": [2, 0, 1]},
        {"label": "1.2.ab", "q": 2, "coeffs": [2, -1, 1]},
        {"label": "1.2.b", "q": 2, "coeffs": [2, 1, 1]},
    ])

    recs = []
    for g, q in ((1, 2), (1, 3), (2, 2)):
        recs += [{"label": label(f), "q": q, "coeffs": list(f.coeffs)} for f in enumerate_weil_polynomials(g, q)]
    lemma = []
    for q in (2, 3):
        every = enumerate_weil_polynomials(3, q)
        step = max(1, len(every) // args.g3_sample)
        recs += [{"label": label(f), "q": q, "coeffs": list(f.coeffs)} for f in every[::step]]
        for f in every:
            s = compute_spectrum(f)
            sv = simplicity(f, s)
            if not sv.irreducible:
                continue
            if find_relation_lattice(angles(s)).angle_rank == 2:
                lemma.append({"label": label(f), "q": q, "coeffs": list(f.coeffs)})
    have = {tuple(r["coeffs"]) for r in recs}
    recs += [r for r in lemma if tuple(r["coeffs"]) not in have]
    write(DATA / "generated.jsonl", recs)
    write(DATA / "lemma_g3.jsonl", lemma)

    even = []
    for f in enumerate_weil_polynomials(4, 2):
        if len(even) >= args.g4_count:
            break
        s = compute_spectrum(f)
        if not simplicity(f, s).at_least_heuristic:
            continue
        if find_relation_lattice(angles(s)).angle_rank == 3:
            even.append({"label": label(f), "q": 2, "coeffs": list(f.coeffs)})
    write(DATA / "even_g4.jsonl", even)


if __name__ == "__main__":
    main()
