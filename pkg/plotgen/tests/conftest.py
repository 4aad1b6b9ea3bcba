import csv

import pytest

HEADER = (
    "experiment", "n", "lambda", "chi", "eps", "replicate", "seed", "hit",
    "hitting_evals", "generations", "restarts", "crossings",
    "cycles_successful", "escapes", "wallclock_ms",
)


@pytest.fixture
def write_results(tmp_path):
    """Factory writing synthetic results.csv files.

    rows: iterable of (n, lam, chi, hit, hitting_evals) tuples.
    """

    def _write(rows, name="results.csv"):
        path = tmp_path / name
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(HEADER)
            for i, (n, lam, chi, hit, evals) in enumerate(rows):
                w.writerow([
                    "synthetic", n, lam, chi, 0.01, i, 42, int(hit),
                    "" if evals is None else evals, 10, 0, 1, 1, 0, 3,
                ])
        return path

    return _write
