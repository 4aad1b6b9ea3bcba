"""Configuration-driven experiment execution.

An ExperimentSpec is a JSON-serializable description of a grid of runs.
Each (grid point, replicate) gets an RNG substream derived by hashing the
run's parameters (not its position), executes independently (optionally in
a process pool), and yields one results.csv row. Outputs: results.csv,
summary.json, and per-run telemetry CSVs when telemetry="full".
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ConfigurationError
from .games import DIAGONAL, GameSpec
from .rng import stable_stream_id
from .runner import COEA, EA, RunConfig, default_restart_period, run
from .telemetry import write_records_csv

__all__ = [
    "GridPoint",
    "ExperimentSpec",
    "run_experiment",
    "summarize",
    "read_results_csv",
    "RESULT_FIELDS",
    "DEFAULT_SEED",
    "chi_sweep_spec",
    "scaling_spec",
    "ea_failure_spec",
    "restart_spec",
    "ea_vs_coea_specs",
]

RESULT_FIELDS = (
    "experiment", "n", "lambda", "chi", "eps", "replicate", "seed", "hit",
    "hitting_evals", "generations", "restarts", "crossings",
    "cycles_successful", "escapes", "wallclock_ms",
)

DEFAULT_SEED = 20260810


@dataclass(frozen=True)
class GridPoint:
    n: int
    lam: int
    chi: float
    eps: float

    @classmethod
    def from_dict(cls, d: dict) -> "GridPoint":
        return cls(n=int(d["n"]), lam=int(d["lambda"]), chi=float(d["chi"]),
                   eps=float(d["eps"]))

    def to_dict(self) -> dict:
        return {"n": self.n, "lambda": self.lam, "chi": self.chi, "eps": self.eps}


@dataclass
class ExperimentSpec:
    name: str
    algorithm: str
    grid: List[GridPoint]
    replicates: int
    budget: int
    output_dir: str
    game: dict = field(default_factory=lambda: {"kind": DIAGONAL})
    init: Union[str, Tuple[int, int]] = "uniform"
    restart: Optional[dict] = None  # {"delta": float}
    master_seed: int = DEFAULT_SEED
    telemetry: str = "summary"

    def __post_init__(self):
        if self.algorithm not in (EA, COEA):
            raise ConfigurationError(f"algorithm must be '{EA}' or '{COEA}'")
        if self.replicates < 1:
            raise ConfigurationError("replicates must be >= 1")
        if not self.grid:
            raise ConfigurationError("grid must not be empty")
        if self.telemetry not in ("off", "summary", "full"):
            raise ConfigurationError(f"unknown telemetry mode {self.telemetry!r}")
        if self.restart is not None and not 0 < float(self.restart["delta"]) < 1:
            raise ConfigurationError("restart delta must lie in (0, 1)")
        if isinstance(self.init, list):
            self.init = tuple(self.init)
        # validate each grid point against RunConfig invariants up front
        for gp in self.grid:
            self._run_config(gp, stream_id=0)

    # -- (de)serialization ---------------------------------------------------

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        d = dict(d)
        d["grid"] = [GridPoint.from_dict(g) for g in d["grid"]]
        if isinstance(d.get("init"), list):
            d["init"] = tuple(d["init"])
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ExperimentSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["grid"] = [gp.to_dict() for gp in self.grid]
        if isinstance(self.init, tuple):
            d["init"] = list(self.init)
        return d

    # -- run derivation --------------------------------------------------------

    def game_spec(self, n: int) -> GameSpec:
        kind = self.game.get("kind", DIAGONAL)
        if kind == DIAGONAL:
            return GameSpec.diagonal(n)
        return GameSpec.generalized(self.game["constraint"])

    def _run_config(self, gp: GridPoint, stream_id: int) -> RunConfig:
        restart_period = None
        if self.restart is not None:
            restart_period = default_restart_period(gp.n, float(self.restart["delta"]))
        return RunConfig(
            n=gp.n, lam=gp.lam, chi=gp.chi, init=self.init, eps=gp.eps,
            budget=self.budget, restart_period=restart_period,
            seed=self.master_seed, stream_id=stream_id,
        )

    def stream_id_for(self, gp: GridPoint, replicate: int) -> int:
        restart_delta = None if self.restart is None else float(self.restart["delta"])
        return stable_stream_id(
            algorithm=self.algorithm,
            game=self.game,
            n=gp.n, lam=gp.lam, chi=gp.chi, eps=gp.eps,
            init=list(self.init) if isinstance(self.init, tuple) else self.init,
            restart_delta=restart_delta,
            replicate=replicate,
        )


def _execute_task(spec: ExperimentSpec, grid_index: int, replicate: int) -> dict:
    gp = spec.grid[grid_index]
    stream_id = spec.stream_id_for(gp, replicate)
    cfg = spec._run_config(gp, stream_id)
    game = spec.game_spec(gp.n)
    t0 = time.perf_counter()
    outcome, tele = run(spec.algorithm, cfg, game, telemetry=spec.telemetry)
    wallclock_ms = int(round((time.perf_counter() - t0) * 1000))
    if spec.telemetry == "full" and tele.records is not None:
        tdir = Path(spec.output_dir) / "telemetry"
        tdir.mkdir(parents=True, exist_ok=True)
        write_records_csv(tdir / f"g{grid_index:03d}_r{replicate:03d}.csv", tele.records)
    return {
        "experiment": spec.name,
        "n": gp.n,
        "lambda": gp.lam,
        "chi": gp.chi,
        "eps": gp.eps,
        "replicate": replicate,
        "seed": stream_id,
        "hit": int(outcome.hit),
        "hitting_evals": outcome.hitting_evals if outcome.hit else None,
        "generations": outcome.generations,
        "restarts": outcome.restarts,
        "crossings": tele.stats.crossings,
        "cycles_successful": tele.stats.cycles_successful,
        "escapes": tele.stats.escapes,
        "wallclock_ms": wallclock_ms,
        "_order": (grid_index, replicate),
    }


def _write_results_csv(path, rows: Sequence[dict]) -> None:
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULT_FIELDS)
        for r in rows:
            writer.writerow([
                r["experiment"], r["n"], r["lambda"], repr(r["chi"]), repr(r["eps"]),
                r["replicate"], r["seed"], r["hit"],
                "" if r["hitting_evals"] is None else r["hitting_evals"],
                r["generations"], r["restarts"], r["crossings"],
                r["cycles_successful"], r["escapes"], r["wallclock_ms"],
            ])


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> Path:
    """Execute replicates x grid runs; returns the output directory.

    Rows are gathered and sorted by (grid index, replicate) before writing,
    so the files are deterministic however the pool schedules the work.
    Partial results are flushed if interrupted.
    """
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "spec.json", "w", encoding="utf-8") as fh:
        json.dump(spec.to_dict(), fh, indent=2, sort_keys=True)

    tasks = [(gi, rep) for gi in range(len(spec.grid)) for rep in range(spec.replicates)]
    rows: List[dict] = []
    try:
        if jobs <= 1:
            for gi, rep in tasks:
                rows.append(_execute_task(spec, gi, rep))
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = [pool.submit(_execute_task, spec, gi, rep) for gi, rep in tasks]
                for fut in futures:
                    rows.append(fut.result())
    except KeyboardInterrupt:
        rows.sort(key=lambda r: r["_order"])
        _write_results_csv(out / "results.csv", rows)
        raise

    rows.sort(key=lambda r: r["_order"])
    _write_results_csv(out / "results.csv", rows)
    summary = _summarize_rows(rows)
    summary["experiment"] = spec.name
    summary["master_seed"] = spec.master_seed
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    return out


# ---------------------------------------------------------------------------
# summaries
# ---------------------------------------------------------------------------


def read_results_csv(path) -> List[dict]:
    import csv

    rows: List[dict] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != RESULT_FIELDS:
            raise ConfigurationError(
                f"results file does not match the ResultRow schema: {header}"
            )
        for raw in reader:
            r = dict(zip(RESULT_FIELDS, raw))
            rows.append({
                "experiment": r["experiment"],
                "n": int(r["n"]),
                "lambda": int(r["lambda"]),
                "chi": float(r["chi"]),
                "eps": float(r["eps"]),
                "replicate": int(r["replicate"]),
                "seed": int(r["seed"]),
                "hit": bool(int(r["hit"])),
                "hitting_evals": None if r["hitting_evals"] == "" else int(r["hitting_evals"]),
                "generations": int(r["generations"]),
                "restarts": int(r["restarts"]),
                "crossings": int(r["crossings"]),
                "cycles_successful": int(r["cycles_successful"]),
                "escapes": int(r["escapes"]),
                "wallclock_ms": int(r["wallclock_ms"]),
            })
    return rows


def _summarize_rows(rows: Sequence[dict]) -> dict:
    groups: dict = {}
    order = []
    for r in rows:
        key = (r["n"], r["lambda"], r["chi"], r["eps"])
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(r)

    configs = []
    for key in order:
        n, lam, chi, eps = key
        members = groups[key]
        hits = [r["hitting_evals"] for r in members if r["hit"]]
        entry = {
            "n": n, "lambda": lam, "chi": chi, "eps": eps,
            "replicates": len(members),
            "hits": len(hits),
            "success_rate": len(hits) / len(members),
        }
        if hits:
            arr = np.asarray(hits, dtype=np.float64)
            q1, q3 = np.percentile(arr, [25, 75])
            entry["hitting_evals"] = {
                "mean": float(arr.mean()),
                "median": float(np.median(arr)),
                "min": int(arr.min()),
                "max": int(arr.max()),
                "q1": float(q1),
                "q3": float(q3),
                "iqr": float(q3 - q1),
            }
            entry["ratio_to_6_lambda_n"] = float(arr.mean() / (6.0 * lam * n))
        configs.append(entry)
    return {"configurations": configs, "total_runs": len(rows)}


def summarize(results_csv, out_path=None) -> dict:
    """Per-configuration success rate and hits-only runtime statistics,
    plus the ratio of mean runtime to the 6*lambda*n reference."""
    rows = read_results_csv(results_csv)
    summary = _summarize_rows(rows)
    summary["source"] = str(results_csv)
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
    return summary


# ---------------------------------------------------------------------------
# canned desk-scale specs (paper-scale variants ship in configs/)
# ---------------------------------------------------------------------------


def chi_sweep_spec(output_dir, n=100, lam=100, replicates=30, budget=10_000_000,
                   master_seed=DEFAULT_SEED, telemetry="summary") -> ExperimentSpec:
    """Mutation-rate sweep, chi = 0.2 .. 2.2 in steps of 0.2, runtime to the
    exact optimum (eps = 1/n)."""
    grid = [GridPoint(n=n, lam=lam, chi=round(0.2 * k, 1), eps=1.0 / n)
            for k in range(1, 12)]
    return ExperimentSpec(
        name="chi-sweep", algorithm=COEA, grid=grid, replicates=replicates,
        budget=budget, output_dir=str(output_dir), init="uniform",
        master_seed=master_seed, telemetry=telemetry,
    )


def scaling_spec(output_dir, sizes=(100, 200), chi=0.6, replicates=50,
                 budget=10_000_000, master_seed=DEFAULT_SEED,
                 telemetry="summary") -> ExperimentSpec:
    """Runtime scaling with n = lambda, fixed chi, exact-optimum runs."""
    grid = [GridPoint(n=s, lam=s, chi=chi, eps=1.0 / s) for s in sizes]
    return ExperimentSpec(
        name="scaling", algorithm=COEA, grid=grid, replicates=replicates,
        budget=budget, output_dir=str(output_dir), init="uniform",
        master_seed=master_seed, telemetry=telemetry,
    )


def ea_failure_spec(output_dir, n=200, lam=100, chi=1.0, eps=0.2, replicates=30,
                    budget=10_000_000, master_seed=DEFAULT_SEED) -> ExperimentSpec:
    """The plain EA on the concatenated encoding; expected to time out."""
    grid = [GridPoint(n=n, lam=lam, chi=chi, eps=eps)]
    return ExperimentSpec(
        name="ea-failure", algorithm=EA, grid=grid, replicates=replicates,
        budget=budget, output_dir=str(output_dir), init="uniform",
        master_seed=master_seed, telemetry="summary",
    )


def restart_spec(output_dir, n=100, lam=100, chi=0.6, delta=0.5, replicates=30,
                 budget=10_000_000, master_seed=DEFAULT_SEED) -> ExperimentSpec:
    """All-zeros initialisation with the periodic restart schedule; the
    target is a delta-approximation."""
    grid = [GridPoint(n=n, lam=lam, chi=chi, eps=delta)]
    return ExperimentSpec(
        name="restart", algorithm=COEA, grid=grid, replicates=replicates,
        budget=budget, output_dir=str(output_dir), init="zeros",
        restart={"delta": delta}, master_seed=master_seed, telemetry="summary",
    )


def ea_vs_coea_specs(output_dir, n=100, lam=100, chi=0.6, eps=0.2, replicates=10,
                     budget=2_000_000, master_seed=DEFAULT_SEED):
    """Paired specs on the same grid; the EA writes under ea/, the CoEA under coea/."""
    base = Path(output_dir)
    grid = [GridPoint(n=n, lam=lam, chi=chi, eps=eps)]
    ea = ExperimentSpec(
        name="ea-vs-coea/ea", algorithm=EA, grid=grid, replicates=replicates,
        budget=budget, output_dir=str(base / "ea"), init="uniform",
        master_seed=master_seed, telemetry="summary",
    )
    coea = ExperimentSpec(
        name="ea-vs-coea/coea", algorithm=COEA, grid=grid, replicates=replicates,
        budget=budget, output_dir=str(base / "coea"), init="uniform",
        master_seed=master_seed, telemetry="summary",
    )
    return ea, coea
