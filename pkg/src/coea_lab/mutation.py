"""Bitwise mutation and its one-count shortcut.

`mutate` flips each bit independently with probability chi/n, implemented as
flip-count-then-positions (identical in law, O(K) expected work). `jump`
samples only the resulting change in one-count of a parent with `s` set bits:
U = Bin(n-s, chi/n) - Bin(s, chi/n), which is exactly the distribution of
onecount(mutate(parent)) - onecount(parent).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitstrings import Bitstring
from .errors import ConfigurationError

__all__ = ["MutationParams", "mutate", "jump"]


@dataclass(frozen=True)
class MutationParams:
    """Mutation strength chi and problem size n; per-bit rate is chi/n.

    The library accepts any chi in (0, n). Individual results assume narrower
    ranges (chi in (0,1] for the plain EA analysis, chi in (0,1) for the
    restart schedule); those are documented where used, not enforced here.
    """

    chi: float
    n: int

    def __post_init__(self):
        if self.n <= 0:
            raise ConfigurationError(f"problem size must be positive, got {self.n}")
        if not 0 < self.chi < self.n:
            raise ConfigurationError(
                f"chi must lie in (0, n)=(0, {self.n}), got {self.chi}"
            )

    @property
    def flip_prob(self) -> float:
        return self.chi / self.n


def _distinct_positions(gen: np.random.Generator, n: int, k: int) -> np.ndarray:
    """k distinct uniform positions in [0, n); expected O(k) for k << n."""
    if k >= n:
        return np.arange(n, dtype=np.int64)
    chosen: set[int] = set()
    need = k
    while need > 0:
        draw = gen.integers(0, n, size=need)
        chosen.update(int(v) for v in draw)
        need = k - len(chosen)
    return np.fromiter(chosen, dtype=np.int64, count=k)


def mutate(parent: Bitstring, p: MutationParams, gen: np.random.Generator) -> Bitstring:
    """Offspring with each bit flipped independently with probability chi/n.

    The parent is untouched; the offspring is always a distinct object (even
    when zero bits flip) so selection pools can be identity-tagged.
    """
    if len(parent) != p.n:
        raise ConfigurationError(
            f"parent length {len(parent)} does not match params n={p.n}"
        )
    k = int(gen.binomial(p.n, p.flip_prob))
    if k == 0:
        return parent.flip_positions(np.empty(0, dtype=np.int64))
    return parent.flip_positions(_distinct_positions(gen, p.n, k))


def jump(parent_ones: int, p: MutationParams, gen: np.random.Generator, size=None):
    """Sample the one-count change of one mutation without materializing bits.

    Returns V1 - V2 with V1 ~ Bin(n-s, chi/n), V2 ~ Bin(s, chi/n) independent;
    scalar by default, an int64 array when `size` is given.
    """
    if not 0 <= parent_ones <= p.n:
        raise ConfigurationError(
            f"parent_ones must lie in [0, {p.n}], got {parent_ones}"
        )
    gains = gen.binomial(p.n - parent_ones, p.flip_prob, size=size)
    losses = gen.binomial(parent_ones, p.flip_prob, size=size)
    if size is None:
        return int(gains) - int(losses)
    return gains.astype(np.int64) - losses.astype(np.int64)
