"""Exact and Monte-Carlo oracles for the lemma-level quantities.

Everything here is independent of the simulation path it validates: the jump
distribution is built by exact convolution of binomial pmfs, tail and MGF
bounds are evaluated against that pmf, and the crossing probability uses the
order-statistic identity 1 - Pr(U < threshold)^lambda. Monte-Carlo escape
and crossing estimates reuse the kernel's one-step sampler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from scipy import stats
from scipy.special import logsumexp

from . import _kernel
from .errors import ConfigurationError
from .telemetry import TubeSpec, tube_membership

__all__ = [
    "prob_even",
    "JumpPmf",
    "jump_pmf",
    "MgfCheck",
    "mgf_bound_check",
    "TailCheck",
    "tail_bound_check",
    "crossing_prob_exact",
    "crossing_lower_bound",
    "escape_upper_bound",
    "EscapeEstimate",
    "escape_prob_mc",
    "CrossingEstimate",
    "crossing_prob_mc",
    "wilson_interval",
    "sample_tube_states",
    "TubeState",
    "OracleRow",
    "default_grid",
    "run_oracle_grid",
    "write_oracle_report",
    "failed_rows",
]


def prob_even(n: int, p: float) -> float:
    """Pr(Bin(n, p) is even) = 1/2 + (1/2)(1-2p)^n."""
    if n < 0:
        raise ConfigurationError(f"n must be >= 0, got {n}")
    if not 0 <= p <= 1:
        raise ConfigurationError(f"p must lie in [0, 1], got {p}")
    return 0.5 + 0.5 * (1.0 - 2.0 * p) ** n


@dataclass(frozen=True)
class JumpPmf:
    """Exact distribution of U = Bin(n-s, chi/n) - Bin(s, chi/n).

    probs[i] is Pr(U = i - s); the support is [-s, n-s]. Treat instances as
    read-only (they are cached and shared).
    """

    n: int
    s: int
    chi: float
    probs: np.ndarray

    @property
    def support(self) -> np.ndarray:
        return np.arange(-self.s, self.n - self.s + 1)

    def pmf(self, k: int) -> float:
        if k < -self.s or k > self.n - self.s:
            return 0.0
        return float(self.probs[k + self.s])

    def sf(self, k: int) -> float:
        """Pr(U >= k), summed smallest-terms-first over the tail."""
        if k <= -self.s:
            return 1.0
        if k > self.n - self.s:
            return 0.0
        return float(math.fsum(self.probs[k + self.s:][::-1]))

    def cdf(self, k: int) -> float:
        if k < -self.s:
            return 0.0
        if k >= self.n - self.s:
            return 1.0
        return float(math.fsum(self.probs[: k + self.s + 1]))

    def mean(self) -> float:
        return float(np.dot(self.support, self.probs))


def _validate_jump_args(n: int, s: int, chi: float) -> None:
    if n <= 0:
        raise ConfigurationError(f"n must be positive, got {n}")
    if not 0 <= s <= n:
        raise ConfigurationError(f"s must lie in [0, n], got {s}")
    if not 0 < chi < n:
        raise ConfigurationError(f"chi must lie in (0, n), got {chi}")


@lru_cache(maxsize=256)
def _jump_pmf_cached(n: int, s: int, chi: float) -> JumpPmf:
    p = chi / n
    gains = stats.binom.pmf(np.arange(n - s + 1), n - s, p)
    losses = stats.binom.pmf(np.arange(s + 1), s, p)
    # convolving gains with reversed losses puts Pr(U = i - s) at index i
    probs = np.convolve(gains, losses[::-1])
    return JumpPmf(n=n, s=s, chi=chi, probs=probs)


def jump_pmf(n: int, s: int, chi: float) -> JumpPmf:
    """Exact convolution pmf of the one-count jump for a parent with s ones."""
    _validate_jump_args(n, s, chi)
    return _jump_pmf_cached(n, int(s), float(chi))


@lru_cache(maxsize=256)
def _jump_logpmf_cached(n: int, s: int, chi: float) -> np.ndarray:
    """log Pr(U = k) for k in [-s, n-s], fully in log space (no underflow)."""
    p = chi / n
    lg = stats.binom.logpmf(np.arange(n - s + 1), n - s, p)
    ll = stats.binom.logpmf(np.arange(s + 1), s, p)
    out = np.empty(n + 1)
    for i in range(n + 1):  # index i holds k = i - s
        k = i - s
        j_lo = max(0, k)
        j_hi = min(n - s, s + k)
        out[i] = logsumexp(lg[j_lo:j_hi + 1] + ll[j_lo - k:j_hi - k + 1])
    return out


@dataclass(frozen=True)
class MgfCheck:
    exact: float
    bound: float
    holds: bool


def mgf_bound_check(n: int, s: int, chi: float, eta: float) -> MgfCheck:
    """Exact MGF of the jump at eta (summed from the pmf in log space)
    against the Poisson-style envelope exp(chi*(e^eta - 1))."""
    _validate_jump_args(n, s, chi)
    if eta <= 0:
        raise ConfigurationError(f"eta must be positive, got {eta}")
    if eta > 700:
        raise OverflowError(f"eta={eta} overflows the envelope exp(chi*(e^eta-1))")
    log_bound = chi * math.expm1(eta)
    if log_bound > 700:
        raise OverflowError(f"bound exp({log_bound:.3g}) exceeds float range")
    logpmf = _jump_logpmf_cached(n, int(s), float(chi))
    ks = np.arange(-s, n - s + 1)
    log_exact = float(logsumexp(logpmf + eta * ks))
    return MgfCheck(
        exact=math.exp(log_exact),
        bound=math.exp(log_bound),
        holds=log_exact <= log_bound,
    )


@dataclass(frozen=True)
class TailCheck:
    """Pr(U >= s) against the two tail envelopes.

    bound2 only applies when s >= e^2 * chi. A bound at or above 1 is marked
    vacuous: it holds trivially and carries no information.
    """

    exact: float
    bound1: float
    holds1: bool
    vacuous1: bool
    bound2: Optional[float]
    holds2: Optional[bool]
    vacuous2: Optional[bool]


def tail_bound_check(n: int, s_parent: int, chi: float, s: int, lam: int) -> TailCheck:
    _validate_jump_args(n, s_parent, chi)
    if lam < 3:
        raise ConfigurationError(f"tail envelope needs lambda >= 3, got {lam}")
    if s < 0:
        raise ConfigurationError(f"threshold s must be >= 0, got {s}")
    exact = jump_pmf(n, s_parent, chi).sf(s)
    bound1 = math.exp(-chi + chi * math.log(lam) - s * math.log(math.log(lam)))
    holds1 = exact <= bound1
    if s >= math.e**2 * chi:
        bound2 = math.exp(-chi - s)
        holds2 = exact <= bound2
        vacuous2 = bound2 >= 1.0
    else:
        bound2 = holds2 = vacuous2 = None
    return TailCheck(exact, bound1, holds1, bound1 >= 1.0, bound2, holds2, vacuous2)


def crossing_prob_exact(n: int, X: int, Y: int, chi: float, lam: int) -> float:
    """Probability that the best of lambda offspring jumps reaches the
    diagonal from (X, Y).

    The update side follows the state: X < Y means the x-side mutates and an
    offspring crosses iff its jump is >= Y - X; X >= Y means the y-side
    mutates and needs a jump strictly beyond X - Y.
    """
    if lam < 1:
        raise ConfigurationError(f"lambda must be >= 1, got {lam}")
    if X < Y:
        tail = jump_pmf(n, X, chi).sf(Y - X)
    else:
        tail = jump_pmf(n, Y, chi).sf(X - Y + 1)
    if tail >= 1.0:
        return 1.0
    return float(-np.expm1(lam * np.log1p(-tail)))


def crossing_lower_bound(chi: float, lam: int) -> float:
    """The proven lower bound 1 - 2*lambda^(-1/(2e^chi)) for in-tube states
    meeting the crossing lemma's preconditions."""
    return 1.0 - 2.0 * lam ** (-1.0 / (2.0 * math.exp(chi)))


def escape_upper_bound(chi: float, lam: int) -> float:
    """The proven escape bound 9*lambda^(-(1-chi)/4) for the default tube
    width kappa = (1+3chi)/4 (chi in (0,1))."""
    return 9.0 * lam ** (-(1.0 - chi) / 4.0)


def wilson_interval(successes: int, trials: int, z: float = 2.5758293035489004
                    ) -> Tuple[float, float]:
    """Wilson score interval; default z is the two-sided 99% quantile."""
    if trials <= 0:
        raise ConfigurationError("trials must be positive")
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z2 / (4 * trials**2)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class EscapeEstimate:
    estimate: float
    ci_low: float
    ci_high: float
    escapes: int
    trials: int
    in_scope: bool  # whether the queried state actually lay inside the tube


def escape_prob_mc(
    n: int, X: int, Y: int, chi: float, lam: int,
    spec: TubeSpec, trials: int, gen: np.random.Generator,
) -> EscapeEstimate:
    """Monte-Carlo Pr(D_{t+1} > c) over full selection steps from (X, Y)."""
    if trials < 100:
        raise ConfigurationError("escape estimation needs at least 100 trials")
    x_update = X < Y
    new_vals, _ = _step_samples(n, X, Y, chi, lam, x_update, trials, gen)
    opp = Y if x_update else X
    escapes = int(np.count_nonzero(np.abs(new_vals - opp) > spec.c))
    lo, hi = wilson_interval(escapes, trials)
    return EscapeEstimate(
        estimate=escapes / trials, ci_low=lo, ci_high=hi,
        escapes=escapes, trials=trials,
        in_scope=tube_membership(abs(X - Y), spec),
    )


@dataclass(frozen=True)
class CrossingEstimate:
    estimate: float
    crossings: int
    trials: int


def crossing_prob_mc(
    n: int, X: int, Y: int, chi: float, lam: int,
    trials: int, gen: np.random.Generator,
) -> CrossingEstimate:
    """Monte-Carlo frequency of the crossing event over full selection steps."""
    if trials < 100:
        raise ConfigurationError("crossing estimation needs at least 100 trials")
    x_update = X < Y
    _, max_jumps = _step_samples(n, X, Y, chi, lam, x_update, trials, gen)
    threshold = (Y - X) if x_update else (X - Y + 1)
    crossings = int(np.count_nonzero(max_jumps >= threshold))
    return CrossingEstimate(crossings / trials, crossings, trials)


def _step_samples(n, X, Y, chi, lam, x_update, trials, gen):
    out_new = np.empty(trials, dtype=np.int64)
    out_mj = np.empty(trials, dtype=np.int64)
    _kernel.coea_step_samples(
        gen.bit_generator, n, lam, chi / n, X, Y, bool(x_update), trials,
        out_new, out_mj,
    )
    return out_new, out_mj


@dataclass(frozen=True)
class TubeState:
    """An in-tube state meeting the crossing/escape lemma preconditions."""

    X: int
    Y: int
    x_update: bool  # which side the next generation mutates


def _max_reachable_distance(eps: float, chi: float, lam: int, strict: bool,
                            d_lo: int) -> int:
    """Largest diagonal distance the best-of-lambda jump guarantee covers.

    The crossing guarantee rests on lambda offspring each reaching the
    diagonal with probability at least (eps*chi/j)^j / (2e^chi), where j is
    the required jump (D for the x side, D+1 for the strict y side). That
    argument needs (j/(eps*chi))^j <= lambda/ln(lambda); the closed-form
    band width kappa*ln(lambda)/ln(ln(lambda)) is its large-lambda shape and
    overshoots the valid range at small lambda, so the condition itself is
    enforced here. Returns d_lo - 1 when even d_lo is out of range.
    """
    budget = lam / math.log(lam)
    d = d_lo
    while True:
        j = max(d + (1 if strict else 0), 1)
        if (j / (eps * chi)) ** j <= budget:
            d += 1
        else:
            return d - 1


def sample_tube_states(
    n: int, chi: float, lam: int, count: int, eps: float,
    gen: np.random.Generator, kappa: Optional[float] = None,
) -> List[TubeState]:
    """States meeting the crossing/escape guarantees' preconditions:
    inside the band (D < c), margins n - X >= eps*n and n - Y >= eps*n,
    alternating between the two sides of the diagonal, and with D inside
    the jump-reachability range the guarantee actually covers."""
    tube = TubeSpec(kappa, lam) if kappa is not None else TubeSpec.for_chi(chi, lam)
    in_tube_max = math.ceil(tube.c) - 1
    margin = math.ceil(eps * n)
    hi = n - margin
    states: List[TubeState] = []
    for i in range(count):
        x_update = i % 2 == 0
        d_lo = 1 if x_update else 0
        d_max = min(in_tube_max,
                    _max_reachable_distance(eps, chi, lam, not x_update, d_lo))
        if d_max < d_lo or hi - d_max < 0:
            raise ConfigurationError("no states satisfy the preconditions")
        d = int(gen.integers(d_lo, d_max + 1))
        base = int(gen.integers(0, hi - d + 1))
        if x_update:
            states.append(TubeState(X=base, Y=base + d, x_update=True))
        else:
            states.append(TubeState(X=base + d, Y=base, x_update=False))
    return states


# ---------------------------------------------------------------------------
# grid runner / report
# ---------------------------------------------------------------------------

REPORT_FIELDS = (
    "check", "n", "s_parent", "chi", "lambda", "threshold", "eta",
    "exact", "bound1", "holds1", "vacuous1", "bound2", "holds2", "vacuous2",
    "note",
)


@dataclass(frozen=True)
class OracleRow:
    check: str
    n: int
    s_parent: Optional[int]
    chi: float
    lam: Optional[int]
    threshold: Optional[int]
    eta: Optional[float]
    exact: float
    bound1: float
    holds1: bool
    vacuous1: bool
    bound2: Optional[float] = None
    holds2: Optional[bool] = None
    vacuous2: Optional[bool] = None
    note: str = ""


def default_grid() -> dict:
    """The shipped verification grid (kept small enough for CI)."""
    import json
    from importlib import resources

    ref = resources.files("coea_lab").joinpath("data/oracle_grid_default.json")
    return json.loads(ref.read_text(encoding="utf-8"))


def run_oracle_grid(grid: dict) -> List[OracleRow]:
    rows: List[OracleRow] = []
    tm = grid.get("tail_mgf")
    if tm:
        for lam in tm.get("lambda", []):
            if lam < 3:
                raise ConfigurationError(
                    f"grid lambda={lam} rejected: tail envelope needs ln ln lambda > 0"
                )
        for n in tm["n"]:
            for frac in tm["s_parent_fractions"]:
                s_parent = round(frac * n)
                for chi in tm["chi"]:
                    for eta in tm.get("etas", []):
                        chk = mgf_bound_check(n, s_parent, chi, eta)
                        rows.append(OracleRow(
                            "mgf", n, s_parent, chi, None, None, eta,
                            chk.exact, chk.bound, chk.holds, False,
                        ))
                    for lam in tm["lambda"]:
                        for thr in tm["thresholds"]:
                            tc = tail_bound_check(n, s_parent, chi, thr, lam)
                            rows.append(OracleRow(
                                "tail", n, s_parent, chi, lam, thr, None,
                                tc.exact, tc.bound1, tc.holds1, tc.vacuous1,
                                tc.bound2, tc.holds2, tc.vacuous2,
                            ))
    ce = grid.get("crossing_escape")
    if ce:
        gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(ce["seed"])))
        n, chi, eps = ce["n"], ce["chi"], ce["eps"]
        for lam in ce["lambda"]:
            tube = TubeSpec.for_chi(chi, lam)
            states = sample_tube_states(n, chi, lam, ce["states"], eps, gen)
            lb = crossing_lower_bound(chi, lam)
            ub = escape_upper_bound(chi, lam)
            for st in states:
                exact = crossing_prob_exact(n, st.X, st.Y, chi, lam)
                rows.append(OracleRow(
                    "crossing", n, st.X, chi, lam, abs(st.X - st.Y), None,
                    exact, lb, exact >= lb, lb <= 0.0,
                    note=f"Y={st.Y}",
                ))
                est = escape_prob_mc(n, st.X, st.Y, chi, lam, tube, ce["trials"], gen)
                rows.append(OracleRow(
                    "escape", n, st.X, chi, lam, abs(st.X - st.Y), None,
                    est.estimate, ub, est.ci_high <= ub, ub >= 1.0,
                    note=f"Y={st.Y} upper_ci={est.ci_high:.6g}",
                ))
    return rows


def failed_rows(rows: List[OracleRow]) -> List[OracleRow]:
    """Rows where a non-vacuous bound fails."""
    bad = []
    for r in rows:
        if not r.holds1 and not r.vacuous1:
            bad.append(r)
        elif r.holds2 is not None and not r.holds2 and not r.vacuous2:
            bad.append(r)
    return bad


def write_oracle_report(rows: List[OracleRow], path) -> None:
    import csv

    def fmt(v):
        if v is None:
            return ""
        if isinstance(v, bool):
            return int(v)
        if isinstance(v, float):
            return repr(v)
        return v

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_FIELDS)
        for r in rows:
            writer.writerow([fmt(v) for v in (
                r.check, r.n, r.s_parent, r.chi, r.lam, r.threshold, r.eta,
                r.exact, r.bound1, r.holds1, r.vacuous1,
                r.bound2, r.holds2, r.vacuous2, r.note,
            )])
