"""Bit-level reference steps for both algorithms.

These materialize offspring bitstrings and evaluate payoffs directly, which
is what the definitions say; the count-level kernels behind `runner.run` are
the fast path and must agree with these in law. Selection here follows the
same contract as the kernels: exactly one uniform draw per generation,
uniform over the offspring of maximal fitness, parent never retained.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List, Sequence

import numpy as np

from .bitstrings import Bitstring
from .errors import ConfigurationError
from .games import GameSpec, payoff_counts
from .mutation import MutationParams, mutate
from .runner import RunConfig

__all__ = ["PairState", "argmax_uniform", "coea_step", "ea_step", "ea_fitness"]


@dataclass(frozen=True)
class PairState:
    """Current (x, y) pair; t is the generation the state is entering
    (starts at 1, so the first update is to y)."""

    x: Bitstring
    y: Bitstring
    t: int = 1
    evals: int = 0

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise ConfigurationError("x and y must have equal length")

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def X(self) -> int:
        return self.x.ones

    @property
    def Y(self) -> int:
        return self.y.ones

    @property
    def D(self) -> int:
        return abs(self.X - self.Y)

    @property
    def H(self) -> int:
        return 2 * self.n - self.X - self.Y


def argmax_uniform(values: Sequence, gen: np.random.Generator) -> int:
    """Index of a maximal entry, uniform among ties, one uniform consumed."""
    best = max(values)
    pool = [i for i, v in enumerate(values) if v == best]
    idx = int(gen.random() * len(pool))
    if idx >= len(pool):
        idx = len(pool) - 1
    return pool[idx]


def coea_step(
    state: PairState, cfg: RunConfig, game: GameSpec, gen: np.random.Generator
) -> PairState:
    """One alternating-update generation (generation index state.t).

    Even t: mutate x lambda times, keep an offspring maximizing
    payoff(x_i, y). Odd t: mutate y lambda times, keep an offspring
    maximizing -payoff(x, y_i). Ties uniform; the parent is never a
    candidate (comma selection).
    """
    if state.n != cfg.n or game.n != cfg.n:
        raise ConfigurationError("state/game/config sizes disagree")
    params = MutationParams(chi=cfg.chi, n=cfg.n)
    if state.t % 2 == 0:
        offspring = [mutate(state.x, params, gen) for _ in range(cfg.lam)]
        fitness = [payoff_counts(game, o.ones, state.Y) for o in offspring]
        sel = argmax_uniform(fitness, gen)
        assert fitness[sel] == max(fitness)
        return replace(state, x=offspring[sel], t=state.t + 1, evals=state.evals + cfg.lam)
    offspring = [mutate(state.y, params, gen) for _ in range(cfg.lam)]
    fitness = [-payoff_counts(game, state.X, o.ones) for o in offspring]
    sel = argmax_uniform(fitness, gen)
    assert fitness[sel] == max(fitness)
    return replace(state, y=offspring[sel], t=state.t + 1, evals=state.evals + cfg.lam)


def ea_fitness(game: GameSpec, z: Bitstring) -> int:
    """Payoff of a concatenated individual z = (x, y), each half length n."""
    if len(z) != 2 * game.n:
        raise ConfigurationError(f"expected a {2 * game.n}-bit concatenated string")
    left = z.count_prefix(game.n)
    return payoff_counts(game, left, z.ones - left)


def ea_step(
    state: Bitstring, cfg: RunConfig, game: GameSpec, gen: np.random.Generator
) -> Bitstring:
    """One comma-selection generation on the concatenated 2n-bit string.

    Every bit of the 2n-bit string flips with probability chi/n, hence the
    doubled MutationParams below (2*chi over 2n bits).
    """
    if len(state) != 2 * cfg.n or game.n != cfg.n:
        raise ConfigurationError("state must be the 2n-bit concatenation")
    params = MutationParams(chi=2.0 * cfg.chi, n=2 * cfg.n)
    offspring: List[Bitstring] = [mutate(state, params, gen) for _ in range(cfg.lam)]
    fitness = [ea_fitness(game, o) for o in offspring]
    sel = argmax_uniform(fitness, gen)
    assert fitness[sel] == max(fitness)
    return offspring[sel]
