"""Pure-numpy simulation kernels (fallback backend).

Same call contract and, crucially, the same random-draw sequence as the
compiled backend: per generation the updated coordinate draws lambda gain
binomials, then lambda loss binomials, then one uniform for selection
(the EA draws 2*lambda of each). Selection picks uniformly among the
offspring of maximal fitness via floor(u * pool_size). Keeping the draw
order identical makes backend choice invisible to results.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def _select(pool: np.ndarray, lam: int, u: float) -> int:
    k = pool.size if pool.size else lam
    idx = int(u * k)
    if idx >= k:  # u*k can round up to k at the very edge of the unit interval
        idx = k - 1
    return int(pool[idx]) if pool.size else idx


def coea_chunk(bitgen, n, lam, p, X, Y, t_first, max_gens, hit_le, c,
               out_X, out_Y, out_mj, out_K, out_M):
    """Run up to max_gens alternating-update generations.

    Generation t mutates x when t is even, y when t is odd. Writes one entry
    per executed generation into the out arrays and stops early when the
    potential 2n - X - Y drops to hit_le or below.

    Returns (gens_done, hit, X, Y).
    """
    gen = np.random.Generator(bitgen)
    for g in range(max_gens):
        t = t_first + g
        x_update = (t % 2) == 0
        cur, opp = (X, Y) if x_update else (Y, X)

        gains = gen.binomial(n - cur, p, size=lam)
        losses = gen.binomial(cur, p, size=lam)
        jumps = (gains - losses).astype(np.int64, copy=False)

        # fitness-1 set: x-offspring must reach the opponent, y-offspring
        # must strictly exceed it (they maximize -payoff).
        thr = opp - cur + (0 if x_update else 1)
        pool = np.flatnonzero(jumps >= thr)
        u = gen.random()
        sel = _select(pool, lam, u)

        mj = int(jumps.max())
        if (x_update and opp > cur) or (not x_update and opp >= cur):
            d = opp - cur
            K = int(np.count_nonzero(jumps >= d + c))
            M = int(np.count_nonzero(jumps >= d))
        else:
            K = M = 0

        new_val = cur + int(jumps[sel])
        if x_update:
            X = new_val
        else:
            Y = new_val

        out_X[g] = X
        out_Y[g] = Y
        out_mj[g] = mj
        out_K[g] = K
        out_M[g] = M

        if 2 * n - X - Y <= hit_le:
            return g + 1, True, X, Y
    return max_gens, False, X, Y


def ea_chunk(bitgen, n, lam, p, X, Y, max_gens, hit_le, out_X, out_Y, out_mj):
    """Comma-selection EA on the concatenated 2n-bit encoding.

    X and Y are the one-counts of the two halves; every bit flips with
    probability p = chi/n. Fitness is the diagonal payoff of the halves.

    Returns (gens_done, hit, X, Y).
    """
    gen = np.random.Generator(bitgen)
    for g in range(max_gens):
        jx = (gen.binomial(n - X, p, size=lam) - gen.binomial(X, p, size=lam)).astype(
            np.int64, copy=False
        )
        jy = (gen.binomial(n - Y, p, size=lam) - gen.binomial(Y, p, size=lam)).astype(
            np.int64, copy=False
        )

        pool = np.flatnonzero(jx - jy >= Y - X)  # offspring with payoff 1
        u = gen.random()
        sel = _select(pool, lam, u)

        out_mj[g] = int((jx + jy).max())
        X += int(jx[sel])
        Y += int(jy[sel])
        out_X[g] = X
        out_Y[g] = Y

        if 2 * n - X - Y <= hit_le:
            return g + 1, True, X, Y
    return max_gens, False, X, Y


def coea_step_samples(bitgen, n, lam, p, X, Y, x_update, trials, out_new, out_mj):
    """`trials` independent one-generation selections from the fixed state.

    Each trial repeats the exact per-generation draw sequence of coea_chunk.
    out_new holds the selected new value of the updated coordinate, out_mj
    the maximal offspring jump.
    """
    gen = np.random.Generator(bitgen)
    cur, opp = (X, Y) if x_update else (Y, X)
    thr = opp - cur + (0 if x_update else 1)
    for i in range(trials):
        gains = gen.binomial(n - cur, p, size=lam)
        losses = gen.binomial(cur, p, size=lam)
        jumps = (gains - losses).astype(np.int64, copy=False)
        pool = np.flatnonzero(jumps >= thr)
        u = gen.random()
        sel = _select(pool, lam, u)
        out_new[i] = cur + int(jumps[sel])
        out_mj[i] = int(jumps.max())
