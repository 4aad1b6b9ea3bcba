"""Binary test-based payoff functions on the one-count plane.

The diagonal game awards the design x a payoff of 1 exactly when it passes
the test y, i.e. |y|_1 <= |x|_1. The generalized family replaces the diagonal
boundary with an arbitrary integer constraint table c: payoff 1 iff
|y|_1 <= c(|x|_1). Payoffs depend on the pair of one-counts only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from .bitstrings import Bitstring
from .errors import ConfigurationError, UnsupportedGameError

__all__ = [
    "DIAGONAL",
    "GENERALIZED_BOUNDARY",
    "GameSpec",
    "Optimum",
    "payoff",
    "payoff_counts",
    "is_eps_approx",
    "is_eps_approx_counts",
    "optimum",
]

DIAGONAL = "diagonal"
GENERALIZED_BOUNDARY = "generalized_boundary"


@dataclass(frozen=True)
class GameSpec:
    """A payoff definition: the diagonal game or a boundary game with an
    explicit constraint table (one integer per design one-count, so configs
    can serialize it)."""

    kind: str
    n: int
    constraint: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.n <= 0:
            raise ConfigurationError(f"problem size must be positive, got {self.n}")
        if self.kind == DIAGONAL:
            if self.constraint is not None:
                raise ConfigurationError("diagonal games take no constraint table")
        elif self.kind == GENERALIZED_BOUNDARY:
            if self.constraint is None or len(self.constraint) != self.n + 1:
                raise ConfigurationError(
                    "generalized boundary games need a constraint value for "
                    f"every one-count in [0, n]: expected {self.n + 1} entries"
                )
        else:
            raise ConfigurationError(f"unknown game kind {self.kind!r}")

    @classmethod
    def diagonal(cls, n: int) -> "GameSpec":
        return cls(kind=DIAGONAL, n=n)

    @classmethod
    def generalized(cls, constraint) -> "GameSpec":
        table = tuple(int(v) for v in constraint)
        return cls(kind=GENERALIZED_BOUNDARY, n=len(table) - 1, constraint=table)

    def constraint_at(self, s: int) -> int:
        """Boundary value for a design with s one-bits (s itself on the diagonal)."""
        if self.kind == DIAGONAL:
            return s
        return self.constraint[s]


@dataclass(frozen=True)
class Optimum:
    """One-counts of the unique maximin optimum."""

    x_star_ones: int
    y_star_ones: int


def payoff_counts(g: GameSpec, x_ones: int, y_ones: int) -> int:
    """Payoff evaluated directly on one-counts."""
    return 1 if y_ones <= g.constraint_at(x_ones) else 0


def payoff(g: GameSpec, x: Bitstring, y: Bitstring) -> int:
    """1 iff design x passes test y; for the diagonal game, iff |y|_1 <= |x|_1."""
    if len(x) != g.n or len(y) != g.n:
        raise ConfigurationError(
            f"payoff needs length-{g.n} strings, got {len(x)} and {len(y)}"
        )
    return payoff_counts(g, x.ones, y.ones)


def optimum(g: GameSpec) -> Optimum:
    """The unique maximin optimum; defined for the diagonal game, where it
    is (1^n, 1^n): the hardest test and the only design passing it."""
    if g.kind != DIAGONAL:
        raise UnsupportedGameError(
            "no optimum formula for arbitrary constraint tables; "
            "approximation queries are diagonal-only"
        )
    return Optimum(g.n, g.n)


def is_eps_approx_counts(g: GameSpec, x_ones: int, y_ones: int, eps: float) -> bool:
    """True iff the coordinate-wise one-count distance to the optimum is
    strictly below eps*n. For the diagonal game this is 2n - X - Y < eps*n."""
    if not 0 <= eps <= 1:
        raise ConfigurationError(f"eps must lie in [0, 1], got {eps}")
    opt = optimum(g)
    gap = abs(opt.x_star_ones - x_ones) + abs(opt.y_star_ones - y_ones)
    return gap < eps * g.n


def is_eps_approx(g: GameSpec, x: Bitstring, y: Bitstring, eps: float) -> bool:
    if len(x) != g.n or len(y) != g.n:
        raise ConfigurationError(
            f"approximation check needs length-{g.n} strings, got {len(x)} and {len(y)}"
        )
    return is_eps_approx_counts(g, x.ones, y.ones, eps)


def hit_threshold(eps: float, n: int) -> int:
    """Largest integer H with H < eps*n (so: hit iff H <= this; -1 means never).

    Used by the run kernels so the strict-inequality criterion is applied to
    integer potentials exactly once, in one place.
    """
    v = eps * n
    if float(v).is_integer():
        return int(v) - 1
    return int(v // 1)
