#!/usr/bin/env python3
"""Regenerate the bundled demo dataset (demo/demo.csv + ground truth).

The dataset is a synthetic treatment-outcome table with three family
variables (clinic, age_group, sex) and two utility variables (dose ordinal,
sessions numeric-binned), both oriented lower-is-better.  Three strong
associations are planted in three different families, so they are pairwise
incomparable and every sound procedure should recover all of them.  A fourth
"sibling" association lives in the first planted pattern's family with
strictly worse utility: single-threshold methods reject it, while the
utility-aware procedure ignores it once the better sibling is in.

Run from the repository root:  python3 scripts/make_demo_data.py
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

SEED = 20124
N_ROWS = 6000
BASELINE_RATE = 0.22
PLANT_SHARE = 0.14  # fraction of rows routed to the planted cells

CLINICS = ["north", "central", "south"]
AGE_GROUPS = ["adult", "senior"]
SEXES = ["female", "male"]
DOSES = ["low", "mid", "high"]
SESSION_BINS = [(0.0, 8.0), (8.0, 16.0), (16.0, 30.0)]  # [<8], [8-15], [>=16]
SESSION_LABELS = ["<8", "8-15", ">=16"]

# (clinic, age_group, sex, dose, session_bin) -> positive rate
PLANTED = [
    ((0, 0, 0, 0, 0), 0.85),
    ((1, 1, 1, 0, 1), 0.80),
    ((2, 0, 1, 1, 0), 0.80),
]
# same family as the first plant, strictly worse utility, weaker signal
SIBLING = ((0, 0, 0, 2, 2), 0.62)
SIBLING_SHARE = 0.025


def pattern_labels(code):
    clinic, age, sex, dose, sessions = code
    return (CLINICS[clinic], AGE_GROUPS[age], SEXES[sex], DOSES[dose], SESSION_LABELS[sessions])


def main() -> None:
    rng = np.random.default_rng(SEED)
    out_dir = Path(__file__).resolve().parent.parent / "demo"
    out_dir.mkdir(exist_ok=True)

    rate_map = {code: rate for code, rate in PLANTED}
    rate_map[SIBLING[0]] = SIBLING[1]

    rows = []
    for _ in range(N_ROWS):
        u = rng.random()
        if u < PLANT_SHARE:
            code = PLANTED[int(rng.integers(len(PLANTED)))][0]
        elif u < PLANT_SHARE + SIBLING_SHARE:
            code = SIBLING[0]
        else:
            code = (
                int(rng.integers(3)),
                int(rng.integers(2)),
                int(rng.integers(2)),
                int(rng.integers(3)),
                int(rng.integers(3)),
            )
        rate = rate_map.get(code, BASELINE_RATE)
        improved = int(rng.random() < rate)
        lo, hi = SESSION_BINS[code[4]]
        sessions = float(rng.uniform(lo, hi))
        clinic, age, sex, dose, _ = pattern_labels(code)
        rows.append((clinic, age, sex, dose, f"{sessions:.1f}", str(improved)))

    csv_path = out_dir / "demo.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["clinic", "age_group", "sex", "dose", "sessions", "improved"])
        writer.writerows(rows)

    truth = {
        "seed": SEED,
        "n_rows": N_ROWS,
        "baseline_rate": BASELINE_RATE,
        "planted": [
            {"labels": pattern_labels(code), "positive_rate": rate, "pattern": list(code)}
            for code, rate in PLANTED
        ],
        "dominated_sibling": {
            "labels": pattern_labels(SIBLING[0]),
            "positive_rate": SIBLING[1],
            "pattern": list(SIBLING[0]),
            "note": "same family as the first planted pattern, worse on both "
            "utility variables; single-threshold methods reject it, the "
            "utility-aware procedure ignores it",
        },
    }
    truth_path = out_dir / "ground_truth.json"
    truth_path.write_text(json.dumps(truth, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {csv_path} ({len(rows)} rows) and {truth_path}")


if __name__ == "__main__":
    main()
