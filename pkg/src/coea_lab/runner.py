"""Run control for the two algorithms on diagonal games.

The run loop simulates the one-count process (X_t, Y_t), which for these
games is equal in law to the bit-level process: payoffs and the mutation
jump distribution depend on one-counts only. Bit-level reference steps live
in `coea_lab.steps`.

Indexing: generations are numbered t = 1, 2, ...; generation t mutates x
when t is even and y when t is odd, so the first update is to y. The
initial state enters generation 1. Budget is counted in payoff evaluations,
lambda per generation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np

from . import _kernel
from .errors import ConfigurationError, UnsupportedGameError
from .games import DIAGONAL, GameSpec, hit_threshold
from .rng import RngHandle
from .telemetry import CrossingStats, GenerationRecord, TelemetryAccumulator, TubeSpec

__all__ = [
    "EA",
    "COEA",
    "RunConfig",
    "RunOutcome",
    "RunTelemetry",
    "default_restart_period",
    "run",
]

EA = "ea"
COEA = "coea"

InitMode = Union[str, Tuple[int, int]]  # "uniform" | "zeros" | (x_ones, y_ones)

_CHUNK = 4096


@dataclass(frozen=True)
class RunConfig:
    """Parameters of a single run.

    init is "uniform", "zeros", or a fixed (x_ones, y_ones) pair of
    one-counts. restart_period, when set, resets the state to all-zeros
    every that many generations (an even count: a restart must not flip
    which coordinate moves first). The generation counter and the
    evaluation budget keep running across restarts.
    """

    n: int
    lam: int
    chi: float
    init: InitMode = "uniform"
    eps: float = 0.1
    budget: int = 10_000_000
    restart_period: Optional[int] = None
    seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        if self.n <= 0:
            raise ConfigurationError(f"n must be positive, got {self.n}")
        if self.lam < 1:
            raise ConfigurationError(f"lambda must be >= 1, got {self.lam}")
        if not 0 < self.chi < self.n:
            raise ConfigurationError(f"chi must lie in (0, n), got {self.chi}")
        if not 0 <= self.eps <= 1:
            raise ConfigurationError(f"eps must lie in [0, 1], got {self.eps}")
        if self.budget < self.lam:
            raise ConfigurationError("budget must cover at least one generation")
        if self.restart_period is not None:
            if self.restart_period < 2 or self.restart_period % 2 != 0:
                raise ConfigurationError("restart_period must be even and >= 2")
        if isinstance(self.init, str):
            if self.init not in ("uniform", "zeros"):
                raise ConfigurationError(f"unknown init mode {self.init!r}")
        else:
            xo, yo = self.init
            if not (0 <= xo <= self.n and 0 <= yo <= self.n):
                raise ConfigurationError("fixed init one-counts must lie in [0, n]")

    @property
    def max_generations(self) -> int:
        return self.budget // self.lam


@dataclass(frozen=True)
class RunOutcome:
    hit: bool
    hitting_evals: Optional[int]  # present iff hit
    generations: int
    restarts: int


@dataclass
class RunTelemetry:
    stats: CrossingStats
    records: Optional[List[GenerationRecord]]
    tube: Optional[TubeSpec]
    initial: Tuple[int, int]
    final: Tuple[int, int]


def default_restart_period(n: int, delta: float) -> int:
    """Restart period 2*ceil(4*(2-delta)*n) generations for the all-zeros
    restart schedule targeting a delta-approximation."""
    if not 0 < delta < 1:
        raise ConfigurationError(f"delta must lie in (0, 1), got {delta}")
    if n <= 0:
        raise ConfigurationError(f"n must be positive, got {n}")
    phase = 4.0 * (2.0 - delta) * n
    # guard against 680.0000000000001-style float noise before taking the ceiling
    return 2 * math.ceil(phase - 1e-9)


def _initial_counts(cfg: RunConfig, gen: np.random.Generator) -> Tuple[int, int]:
    if cfg.init == "zeros":
        return 0, 0
    if cfg.init == "uniform":
        # uniform over {0,1}^n x {0,1}^n; only the one-counts matter
        return int(gen.binomial(cfg.n, 0.5)), int(gen.binomial(cfg.n, 0.5))
    return int(cfg.init[0]), int(cfg.init[1])


def run(
    algorithm: str,
    cfg: RunConfig,
    game: GameSpec,
    telemetry: str = "summary",
) -> Tuple[RunOutcome, RunTelemetry]:
    """Iterate generations until an eps-approximation, a budget stop, or both.

    Returns the outcome plus per-run telemetry. telemetry: "off" skips event
    accumulation, "summary" keeps CrossingStats, "full" also keeps one
    GenerationRecord per executed generation.
    """
    if algorithm not in (EA, COEA):
        raise ConfigurationError(f"algorithm must be '{EA}' or '{COEA}'")
    if telemetry not in ("off", "summary", "full"):
        raise ConfigurationError(f"unknown telemetry mode {telemetry!r}")
    if game.kind != DIAGONAL:
        raise UnsupportedGameError(
            "run() needs the unique-optimum approximation criterion, "
            "which is diagonal-only; use the bit-level steps for other games"
        )
    if game.n != cfg.n:
        raise ConfigurationError(f"game size {game.n} != config n {cfg.n}")

    bitgen = RngHandle(cfg.seed, cfg.stream_id).bit_generator()
    gen = np.random.Generator(bitgen)
    X, Y = _initial_counts(cfg, gen)
    n, lam, p = cfg.n, cfg.lam, cfg.chi / cfg.n
    hit_le = hit_threshold(cfg.eps, n)

    tube = TubeSpec.for_chi(cfg.chi, lam) if lam >= 3 else None
    acc = None
    if telemetry != "off":
        acc = TelemetryAccumulator(
            n, lam, tube, keep_records=(telemetry == "full"), coea=(algorithm == COEA)
        )
        acc.new_segment(1, X, Y)

    def _telemetry(final):
        return RunTelemetry(
            stats=acc.stats if acc else CrossingStats(),
            records=(acc.records if acc and acc.keep_records else None),
            tube=tube,
            initial=(int(X0), int(Y0)),
            final=final,
        )

    X0, Y0 = X, Y
    if 2 * n - X - Y <= hit_le:  # uniform init can already qualify for large eps
        return RunOutcome(True, 0, 0, 0), _telemetry((X, Y))

    g_max = cfg.max_generations
    c_for_counts = tube.c if tube is not None else math.inf
    buf_X = np.empty(_CHUNK, dtype=np.int64)
    buf_Y = np.empty(_CHUNK, dtype=np.int64)
    buf_mj = np.empty(_CHUNK, dtype=np.int64)
    buf_K = np.zeros(_CHUNK, dtype=np.int64)
    buf_M = np.zeros(_CHUNK, dtype=np.int64)

    done = 0
    restarts = 0
    hit = False
    while done < g_max:
        take = min(_CHUNK, g_max - done)
        if cfg.restart_period is not None:
            take = min(take, cfg.restart_period - done % cfg.restart_period)
        if algorithm == COEA:
            gens, hit, X, Y = _kernel.coea_chunk(
                bitgen, n, lam, p, X, Y, done + 1, take, hit_le, c_for_counts,
                buf_X, buf_Y, buf_mj, buf_K, buf_M,
            )
        else:
            gens, hit, X, Y = _kernel.ea_chunk(
                bitgen, n, lam, p, X, Y, take, hit_le, buf_X, buf_Y, buf_mj,
            )
        if acc is not None:
            acc.on_chunk(done + 1, gens, buf_X, buf_Y, buf_mj, buf_K, buf_M)
        done += gens
        if hit:
            break
        if (
            cfg.restart_period is not None
            and done % cfg.restart_period == 0
            and done < g_max
        ):
            X, Y = 0, 0
            restarts += 1
            if acc is not None:
                acc.new_segment(done + 1, 0, 0)

    outcome = RunOutcome(
        hit=hit,
        hitting_evals=done * lam if hit else None,
        generations=done,
        restarts=restarts,
    )
    return outcome, _telemetry((int(X), int(Y)))
