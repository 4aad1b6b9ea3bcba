"""Fixed-length bit vectors with a maintained one-count.

Bitstrings are immutable values packed into 64-bit words, sized for problem
lengths up to ~10^4 with millions of offspring. All mutation goes through
`coea_lab.mutation`; this module only knows how to store, count and flip.
"""

from __future__ import annotations

import numpy as np

__all__ = ["Bitstring", "onecount"]

_WORD_BITS = 64


def _n_words(n: int) -> int:
    return (n + _WORD_BITS - 1) // _WORD_BITS


class Bitstring:
    """Immutable binary vector of fixed length `n` with cached one-count."""

    __slots__ = ("_words", "_n", "_ones")

    def __init__(self, words: np.ndarray, n: int, ones: int):
        # Internal constructor: callers guarantee words/ones consistency.
        self._words = words
        self._n = n
        self._ones = ones

    # -- constructors ------------------------------------------------------

    @classmethod
    def zeros(cls, n: int) -> "Bitstring":
        if n <= 0:
            raise ValueError("length must be positive")
        return cls(np.zeros(_n_words(n), dtype=np.uint64), n, 0)

    @classmethod
    def filled(cls, n: int) -> "Bitstring":
        """All-ones string of length n."""
        if n <= 0:
            raise ValueError("length must be positive")
        words = np.full(_n_words(n), np.uint64(0xFFFFFFFFFFFFFFFF), dtype=np.uint64)
        _mask_tail(words, n)
        return cls(words, n, n)

    @classmethod
    def from_bits(cls, bits) -> "Bitstring":
        arr = np.asarray(list(bits) if not hasattr(bits, "__len__") else bits)
        arr = arr.astype(np.uint8)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("bits must be a non-empty 1-d sequence")
        if np.any(arr > 1):
            raise ValueError("bits must be 0/1")
        n = int(arr.size)
        padded = np.zeros(_n_words(n) * _WORD_BITS, dtype=np.uint8)
        padded[:n] = arr
        words = np.packbits(padded.reshape(-1, 8)[:, ::-1]).view(np.uint64)
        return cls(words, n, int(arr.sum()))

    @classmethod
    def random(cls, n: int, gen: np.random.Generator) -> "Bitstring":
        """Uniform over {0,1}^n."""
        if n <= 0:
            raise ValueError("length must be positive")
        words = gen.integers(0, 2**64, size=_n_words(n), dtype=np.uint64)
        _mask_tail(words, n)
        ones = int(np.bitwise_count(words).sum())
        return cls(words, n, ones)

    # -- views -------------------------------------------------------------

    def __len__(self) -> int:
        return self._n

    @property
    def n(self) -> int:
        return self._n

    @property
    def ones(self) -> int:
        """Cached number of set bits."""
        return self._ones

    @property
    def bits(self) -> np.ndarray:
        """Unpacked 0/1 array of length n (a fresh copy)."""
        as_bytes = self._words.view(np.uint8)
        unpacked = np.unpackbits(as_bytes.reshape(-1, 8)[:, ::-1], bitorder="big")
        # unpackbits on the reversed byte view yields MSB-first per word;
        # re-reverse within each word to get index order.
        unpacked = unpacked.reshape(-1, 64)[:, ::-1].reshape(-1)
        return unpacked[: self._n].copy()

    def bit(self, i: int) -> int:
        if not 0 <= i < self._n:
            raise IndexError(i)
        return int((self._words[i >> 6] >> np.uint64(i & 63)) & np.uint64(1))

    def count_prefix(self, k: int) -> int:
        """Number of set bits among positions [0, k)."""
        if not 0 <= k <= self._n:
            raise IndexError(k)
        if k == 0:
            return 0
        full, rem = divmod(k, _WORD_BITS)
        total = int(np.bitwise_count(self._words[:full]).sum()) if full else 0
        if rem:
            mask = np.uint64((1 << rem) - 1)
            total += int(np.bitwise_count(self._words[full] & mask))
        return total

    def to01(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    # -- value semantics -----------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Bitstring):
            return NotImplemented
        return self._n == other._n and bool(np.array_equal(self._words, other._words))

    def __hash__(self) -> int:
        return hash((self._n, self._words.tobytes()))

    def __repr__(self) -> str:
        body = self.to01() if self._n <= 64 else self.to01()[:61] + "..."
        return f"Bitstring({body!r}, ones={self._ones})"

    # -- structural ops (used by the mutation operator) ----------------------

    def flip_positions(self, positions: np.ndarray) -> "Bitstring":
        """New bitstring with the given distinct positions flipped."""
        positions = np.asarray(positions, dtype=np.int64)
        if positions.size == 0:
            # Distinct object, shared storage: bitstrings are immutable.
            return Bitstring(self._words, self._n, self._ones)
        if positions.min() < 0 or positions.max() >= self._n:
            raise IndexError("flip position out of range")
        words = self._words.copy()
        was_set = (words[positions >> 6] >> (positions & 63).astype(np.uint64)) & np.uint64(1)
        np.bitwise_xor.at(words, positions >> 6, np.uint64(1) << (positions & 63).astype(np.uint64))
        ones = self._ones + int(positions.size) - 2 * int(was_set.sum())
        return Bitstring(words, self._n, ones)


def _mask_tail(words: np.ndarray, n: int) -> None:
    rem = n % _WORD_BITS
    if rem:
        words[-1] &= np.uint64((1 << rem) - 1)


def onecount(b: Bitstring) -> int:
    """Number of 1-bits, recomputed from storage (not the cache).

    Always equals `b.ones`; recounting is the point, so the cache invariant
    stays independently checkable.
    """
    return int(np.bitwise_count(b._words).sum())
