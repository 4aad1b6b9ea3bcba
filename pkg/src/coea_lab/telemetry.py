"""Proof-level instrumentation: crossings, c-tube occupancy, successful
cycles, and empirical drift, extracted from a run's generation stream.

Indexing convention (shared with the runner): (X_t, Y_t) is the state
ENTERING generation t; generation t mutates x when t is even, y when t is
odd. A GenerationRecord row holds the state AFTER its generation, so the
entering state of generation t+1 is row t. Cycle detection works on entering
states internally.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, NamedTuple, Optional, Sequence

import numpy as np

from .errors import ConfigurationError, EmptyEstimateError

__all__ = [
    "GenerationRecord",
    "TubeSpec",
    "CrossingStats",
    "DriftEstimate",
    "detect_crossing",
    "detect_successful_cycle",
    "tube_membership",
    "drift_estimate",
    "TelemetryAccumulator",
    "write_records_csv",
    "read_records_csv",
]

RECORD_FIELDS = ("t", "X", "Y", "D", "H", "crossed", "in_tube", "max_jump", "evals")


class GenerationRecord(NamedTuple):
    """One telemetry row: post-generation state plus the generation's events."""

    t: int
    X: int
    Y: int
    D: int
    H: int
    crossed: bool
    in_tube: bool
    max_jump: int
    evals: int


@dataclass(frozen=True)
class TubeSpec:
    """Width parameter of the diagonal band: c = kappa * ln(lam) / ln(ln(lam)).

    Needs lam >= 3 so ln ln lam > 0. The default kappa = (1+3*chi)/4 sits in
    the (chi, (1+chi)/2) window the escape analysis wants when chi < 1; for
    other chi it is still a usable instrumentation width.
    """

    kappa: float
    lam: int
    c: float = field(init=False)

    def __post_init__(self):
        if self.lam < 3:
            raise ConfigurationError("tube width needs lam >= 3 (ln ln lam > 0)")
        if self.kappa <= 0:
            raise ConfigurationError("kappa must be positive")
        object.__setattr__(
            self, "c", self.kappa * math.log(self.lam) / math.log(math.log(self.lam))
        )

    @classmethod
    def for_chi(cls, chi: float, lam: int) -> "TubeSpec":
        return cls(kappa=(1.0 + 3.0 * chi) / 4.0, lam=lam)


def tube_membership(D: int, spec: TubeSpec) -> bool:
    """True iff the state lies inside the band: |X - Y| < c (real-valued c,
    strict comparison, no rounding)."""
    return D < spec.c


@dataclass
class CrossingStats:
    """Aggregated per-run event counts.

    K_total / M_total accumulate, over generations where the crossing side
    condition held, the number of offspring jumping at least D+c / at least D
    (the escape-analysis ratio ingredients).
    """

    crossings: int = 0
    cycles_attempted: int = 0
    cycles_successful: int = 0
    escapes: int = 0
    K_total: int = 0
    M_total: int = 0

    def __add__(self, other: "CrossingStats") -> "CrossingStats":
        return CrossingStats(
            self.crossings + other.crossings,
            self.cycles_attempted + other.cycles_attempted,
            self.cycles_successful + other.cycles_successful,
            self.escapes + other.escapes,
            self.K_total + other.K_total,
            self.M_total + other.M_total,
        )


def detect_crossing(parent, offspring_ones: Sequence[int], parity) -> bool:
    """Did this generation's offspring cross the diagonal?

    `parent` is the state entering the generation (anything with .X and .Y).
    parity 'even' (x-offspring): requires Y > X and some offspring count >= Y.
    parity 'odd' (y-offspring): requires X >= Y and some offspring count > X,
    strictly (ties do not cross).
    """
    parity = _normalize_parity(parity)
    X, Y = parent.X, parent.Y
    if parity == 0:
        return Y > X and any(o >= Y for o in offspring_ones)
    return X >= Y and any(o > X for o in offspring_ones)


def _normalize_parity(parity) -> int:
    if parity in ("even", 0):
        return 0
    if parity in ("odd", 1):
        return 1
    raise ConfigurationError(f"parity must be 'even' or 'odd', got {parity!r}")


def _above(X: int, Y: int, c: float) -> bool:
    # strictly above the diagonal, inside the band
    return X + c > Y > X


def _below(X: int, Y: int, c: float) -> bool:
    # on or below the diagonal, inside the band
    return Y + c > X >= Y


def detect_successful_cycle(window, c: float) -> bool:
    """Two consecutive diagonal crossings without leaving the c-tube.

    `window` holds three consecutive states (attributes t, X, Y) entering
    generations a, a+1, a+2. An even anchor must run above -> below -> above
    the diagonal within the band; an odd anchor is the mirror image. The
    paper's odd-anchor chain as printed contains a typo; the symmetric dual
    of the even chain is used.
    """
    if len(window) != 3:
        raise ConfigurationError("cycle window must hold exactly 3 states")
    s0, s1, s2 = window
    if s1.t != s0.t + 1 or s2.t != s0.t + 2:
        raise ConfigurationError(
            f"cycle window must be consecutive generations, got t={s0.t},{s1.t},{s2.t}"
        )
    if s0.t % 2 == 0:
        return _above(s0.X, s0.Y, c) and _below(s1.X, s1.Y, c) and _above(s2.X, s2.Y, c)
    return _below(s0.X, s0.Y, c) and _above(s1.X, s1.Y, c) and _below(s2.X, s2.Y, c)


class DriftEstimate(NamedTuple):
    mean: float
    count: int
    se: float


def drift_estimate(
    records: Iterable[GenerationRecord],
    predicate: Callable[[GenerationRecord], bool],
) -> DriftEstimate:
    """Sample mean of the one-step potential drop H_t - H_{t+1}.

    A transition qualifies when two records are consecutive generations and
    the SOURCE record satisfies `predicate`. Streams from several runs may be
    chained: the t-continuity check drops the seams. Streams from restarted
    runs must be segmented by the caller first (a reset is not a dynamics
    transition).
    """
    deltas: List[int] = []
    prev: Optional[GenerationRecord] = None
    for rec in records:
        if prev is not None and rec.t == prev.t + 1 and predicate(prev):
            deltas.append(prev.H - rec.H)
        prev = rec
    if not deltas:
        raise EmptyEstimateError("no transitions satisfied the predicate")
    arr = np.asarray(deltas, dtype=np.float64)
    mean = float(arr.mean())
    se = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else math.nan
    return DriftEstimate(mean, int(arr.size), se)


class TelemetryAccumulator:
    """Builds CrossingStats (and optionally full records) from kernel chunks.

    One accumulator per run; merge CrossingStats across runs afterwards.
    The runner guarantees chunks never span a restart and calls
    `new_segment` after each reset so cycle windows cannot bridge it.
    """

    def __init__(self, n: int, lam: int, tube: Optional[TubeSpec],
                 keep_records: bool, coea: bool = True):
        self.n = n
        self.lam = lam
        self.tube = tube
        self.keep_records = keep_records
        self.coea = coea
        self.stats = CrossingStats()
        self.records: List[GenerationRecord] = []
        self._carry_t: List[int] = []
        self._carry_X: List[int] = []
        self._carry_Y: List[int] = []

    def new_segment(self, t_entering: int, X: int, Y: int) -> None:
        """Start (or restart) a trajectory segment at an entering state."""
        self._carry_t = [t_entering]
        self._carry_X = [X]
        self._carry_Y = [Y]

    def on_chunk(self, t_first: int, gens: int,
                 Xp: np.ndarray, Yp: np.ndarray, MJ: np.ndarray,
                 K: np.ndarray, M: np.ndarray) -> None:
        """Fold `gens` generations' worth of kernel output.

        Xp/Yp hold post-generation states for generations t_first ..
        t_first+gens-1; the entering state of t_first is the carry tail.
        """
        if gens == 0:
            return
        Xp, Yp, MJ = Xp[:gens], Yp[:gens], MJ[:gens]
        ts = t_first + np.arange(gens, dtype=np.int64)

        x_in = np.empty(gens, dtype=np.int64)
        y_in = np.empty(gens, dtype=np.int64)
        x_in[0], y_in[0] = self._carry_X[-1], self._carry_Y[-1]
        x_in[1:], y_in[1:] = Xp[:-1], Yp[:-1]

        crossed = self._crossed(ts, x_in, y_in, MJ)
        d_post = np.abs(Xp - Yp)
        if self.tube is not None:
            c = self.tube.c
            in_tube = d_post < c
            d_in = np.abs(x_in - y_in)
            self.stats.escapes += int(np.count_nonzero((d_in < c) & (d_post > c)))
        else:
            in_tube = np.zeros(gens, dtype=bool)

        if self.coea:
            self.stats.crossings += int(np.count_nonzero(crossed))
            self.stats.K_total += int(K[:gens].sum())
            self.stats.M_total += int(M[:gens].sum())
            if self.tube is not None:
                self._count_cycles(ts, Xp, Yp)

        if self.keep_records:
            h_post = 2 * self.n - Xp - Yp
            evals = ts * self.lam
            for i in range(gens):
                self.records.append(GenerationRecord(
                    int(ts[i]), int(Xp[i]), int(Yp[i]), int(d_post[i]),
                    int(h_post[i]), bool(crossed[i]), bool(in_tube[i]),
                    int(MJ[i]), int(evals[i]),
                ))

        # carry the last two entering states of the extended sequence
        ext_t = self._carry_t + list(ts + 1)
        ext_X = self._carry_X + list(Xp)
        ext_Y = self._carry_Y + list(Yp)
        self._carry_t = ext_t[-2:]
        self._carry_X = [int(v) for v in ext_X[-2:]]
        self._carry_Y = [int(v) for v in ext_Y[-2:]]

    def _crossed(self, ts, x_in, y_in, MJ) -> np.ndarray:
        if not self.coea:
            return np.zeros(ts.size, dtype=bool)
        even = (ts % 2) == 0
        return np.where(
            even,
            (y_in > x_in) & (x_in + MJ >= y_in),
            (x_in >= y_in) & (y_in + MJ > x_in),
        )

    def _count_cycles(self, ts, Xp, Yp) -> None:
        # entering-state sequence: carry tail + post states (entering t+1)
        et = np.concatenate([np.asarray(self._carry_t, dtype=np.int64), ts + 1])
        ex = np.concatenate([np.asarray(self._carry_X, dtype=np.int64), Xp])
        ey = np.concatenate([np.asarray(self._carry_Y, dtype=np.int64), Yp])
        if et.size < 3:
            return
        c = self.tube.c
        above = (ex + c > ey) & (ey > ex)
        below = (ey + c > ex) & (ex >= ey)
        even = (et % 2) == 0
        first = np.where(even, above, below)
        second = np.where(even[:-1], below[1:], above[1:])
        third = np.where(even[:-2], above[2:], below[2:])
        self.stats.cycles_attempted += int(np.count_nonzero(first[:-2]))
        self.stats.cycles_successful += int(
            np.count_nonzero(first[:-2] & second[:-1] & third)
        )


def write_records_csv(path, records: Iterable[GenerationRecord]) -> None:
    """CSV schema: t,X,Y,D,H,crossed,in_tube,max_jump,evals (booleans as 0/1)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_FIELDS)
        for r in records:
            writer.writerow([
                r.t, r.X, r.Y, r.D, r.H,
                int(r.crossed), int(r.in_tube), r.max_jump, r.evals,
            ])


def read_records_csv(path) -> List[GenerationRecord]:
    out: List[GenerationRecord] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != RECORD_FIELDS:
            raise ConfigurationError(f"unexpected telemetry header: {header}")
        for row in reader:
            t, X, Y, D, H, crossed, in_tube, mj, evals = (int(v) for v in row)
            out.append(GenerationRecord(t, X, Y, D, H, bool(crossed), bool(in_tube), mj, evals))
    return out
