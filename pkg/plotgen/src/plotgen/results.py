"""Reader for coea-lab results.csv files.

plotgen talks to the simulator exclusively through this file format; it
never simulates anything itself.
"""

from __future__ import annotations

import csv
from typing import List

RESULT_FIELDS = (
    "experiment", "n", "lambda", "chi", "eps", "replicate", "seed", "hit",
    "hitting_evals", "generations", "restarts", "crossings",
    "cycles_successful", "escapes", "wallclock_ms",
)


class SchemaError(ValueError):
    """The input file does not match the results.csv schema."""


def read_results(path) -> List[dict]:
    rows: List[dict] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != RESULT_FIELDS:
            raise SchemaError(f"unexpected results.csv header: {header}")
        for lineno, raw in enumerate(reader, start=2):
            if len(raw) != len(RESULT_FIELDS):
                raise SchemaError(f"line {lineno}: expected {len(RESULT_FIELDS)} fields")
            r = dict(zip(RESULT_FIELDS, raw))
            rows.append({
                "n": int(r["n"]),
                "lambda": int(r["lambda"]),
                "chi": float(r["chi"]),
                "eps": float(r["eps"]),
                "hit": bool(int(r["hit"])),
                "hitting_evals": None if r["hitting_evals"] == "" else int(r["hitting_evals"]),
            })
    return rows
