#cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernels.

Draws come from the caller's numpy BitGenerator through numpy's C
distributions API, so for a given bit-generator state this backend produces
exactly the draws the pure-numpy backend would: per generation, lambda gain
binomials, lambda loss binomials, one selection uniform (EA: 2*lambda of
each binomial pair). See _pykernel.py for the reference semantics.
"""

from libc.stdint cimport int64_t
from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport (
    binomial_t,
    random_binomial,
    random_standard_uniform,
)

import numpy as np

BACKEND_NAME = "c"


cdef bitgen_t *_get_state(object bitgen):
    return <bitgen_t *> PyCapsule_GetPointer(bitgen.capsule, "BitGenerator")


cdef inline Py_ssize_t _pick(double u, Py_ssize_t k) nogil:
    cdef Py_ssize_t idx = <Py_ssize_t> (u * k)
    if idx >= k:
        idx = k - 1
    return idx


cdef inline int64_t _coea_generation(
    bitgen_t *state, binomial_t *binom, double p, long n, Py_ssize_t lam,
    int64_t cur, int64_t opp, bint x_update, double c,
    int64_t *jumps, int64_t *mj_out, int64_t *k_out, int64_t *m_out,
) nogil:
    """One alternating-update generation; returns the new value of the
    updated coordinate and fills max-jump / tube-jump counters."""
    cdef Py_ssize_t i, wins, target, seen, sel
    cdef int64_t thr, d, mj, kc, mc
    cdef double u

    for i in range(lam):
        jumps[i] = random_binomial(state, p, n - cur, binom)
    for i in range(lam):
        jumps[i] = jumps[i] - random_binomial(state, p, cur, binom)

    thr = opp - cur + (0 if x_update else 1)
    wins = 0
    mj = jumps[0]
    for i in range(lam):
        if jumps[i] > mj:
            mj = jumps[i]
        if jumps[i] >= thr:
            wins += 1

    kc = 0
    mc = 0
    if (x_update and opp > cur) or ((not x_update) and opp >= cur):
        d = opp - cur
        for i in range(lam):
            if jumps[i] >= d + c:
                kc += 1
            if jumps[i] >= d:
                mc += 1

    u = random_standard_uniform(state)
    if wins > 0:
        target = _pick(u, wins)
        seen = 0
        sel = 0
        for i in range(lam):
            if jumps[i] >= thr:
                if seen == target:
                    sel = i
                    break
                seen += 1
    else:
        sel = _pick(u, lam)

    mj_out[0] = mj
    k_out[0] = kc
    m_out[0] = mc
    return cur + jumps[sel]


def coea_chunk(bitgen, long n, long lam, double p,
               long X, long Y, long long t_first, long max_gens,
               long hit_le, double c,
               int64_t[::1] out_X, int64_t[::1] out_Y, int64_t[::1] out_mj,
               int64_t[::1] out_K, int64_t[::1] out_M):
    cdef bitgen_t *state = _get_state(bitgen)
    cdef binomial_t binom
    binom.has_binomial = 0
    cdef Py_ssize_t g
    cdef long long t
    cdef bint x_update
    cdef int64_t new_val, mj, kc, mc
    cdef int64_t cx = X, cy = Y
    cdef bint hit = False
    cdef Py_ssize_t done = 0

    buf = np.empty(lam, dtype=np.int64)
    cdef int64_t[::1] jumps = buf

    with bitgen.lock, nogil:
        for g in range(max_gens):
            t = t_first + g
            x_update = (t % 2) == 0
            if x_update:
                new_val = _coea_generation(state, &binom, p, n, lam, cx, cy,
                                           True, c, &jumps[0], &mj, &kc, &mc)
                cx = new_val
            else:
                new_val = _coea_generation(state, &binom, p, n, lam, cy, cx,
                                           False, c, &jumps[0], &mj, &kc, &mc)
                cy = new_val
            out_X[g] = cx
            out_Y[g] = cy
            out_mj[g] = mj
            out_K[g] = kc
            out_M[g] = mc
            if 2 * n - cx - cy <= hit_le:
                done = g + 1
                hit = True
                break
        else:
            done = max_gens
    return done, bool(hit), int(cx), int(cy)


def ea_chunk(bitgen, long n, long lam, double p, long X, long Y,
             long max_gens, long hit_le,
             int64_t[::1] out_X, int64_t[::1] out_Y, int64_t[::1] out_mj):
    cdef bitgen_t *state = _get_state(bitgen)
    cdef binomial_t binom
    binom.has_binomial = 0
    cdef Py_ssize_t g, i, wins, target, seen, sel
    cdef int64_t cx = X, cy = Y, mj
    cdef double u
    cdef bint hit = False
    cdef Py_ssize_t done = 0

    bufx = np.empty(lam, dtype=np.int64)
    bufy = np.empty(lam, dtype=np.int64)
    cdef int64_t[::1] jx = bufx
    cdef int64_t[::1] jy = bufy

    with bitgen.lock, nogil:
        for g in range(max_gens):
            for i in range(lam):
                jx[i] = random_binomial(state, p, n - cx, &binom)
            for i in range(lam):
                jx[i] = jx[i] - random_binomial(state, p, cx, &binom)
            for i in range(lam):
                jy[i] = random_binomial(state, p, n - cy, &binom)
            for i in range(lam):
                jy[i] = jy[i] - random_binomial(state, p, cy, &binom)

            wins = 0
            mj = jx[0] + jy[0]
            for i in range(lam):
                if jx[i] + jy[i] > mj:
                    mj = jx[i] + jy[i]
                if jx[i] - jy[i] >= cy - cx:  # payoff-1 offspring
                    wins += 1

            u = random_standard_uniform(state)
            if wins > 0:
                target = _pick(u, wins)
                seen = 0
                sel = 0
                for i in range(lam):
                    if jx[i] - jy[i] >= cy - cx:
                        if seen == target:
                            sel = i
                            break
                        seen += 1
            else:
                sel = _pick(u, lam)

            out_mj[g] = mj
            cx = cx + jx[sel]
            cy = cy + jy[sel]
            out_X[g] = cx
            out_Y[g] = cy
            if 2 * n - cx - cy <= hit_le:
                done = g + 1
                hit = True
                break
        else:
            done = max_gens
    return done, bool(hit), int(cx), int(cy)


def coea_step_samples(bitgen, long n, long lam, double p, long X, long Y,
                      bint x_update, long trials,
                      int64_t[::1] out_new, int64_t[::1] out_mj):
    cdef bitgen_t *state = _get_state(bitgen)
    cdef binomial_t binom
    binom.has_binomial = 0
    cdef Py_ssize_t i
    cdef int64_t cur = X if x_update else Y
    cdef int64_t opp = Y if x_update else X
    cdef int64_t mj, kc, mc

    buf = np.empty(lam, dtype=np.int64)
    cdef int64_t[::1] jumps = buf

    with bitgen.lock, nogil:
        for i in range(trials):
            out_new[i] = _coea_generation(state, &binom, p, n, lam, cur, opp,
                                          x_update, 0.0, &jumps[0], &mj, &kc, &mc)
            out_mj[i] = mj
