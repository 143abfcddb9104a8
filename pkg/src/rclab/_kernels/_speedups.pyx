# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.  Semantics must match _fallback exactly."""

import numpy as np


def rref_mod(long long[:, ::1] a, long long p):
    """In-place RREF mod p with first-nonzero pivoting.

    Same contract as the fallback: returns (rank, pivot column list).
    """
    cdef Py_ssize_t rows = a.shape[0]
    cdef Py_ssize_t cols = a.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, k
    cdef long long inv, factor, tmp
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        i = -1
        for j in range(r, rows):
            if a[j, c] != 0:
                i = j
                break
        if i < 0:
            continue
        if i != r:
            for k in range(cols):
                tmp = a[r, k]
                a[r, k] = a[i, k]
                a[i, k] = tmp
        inv = pow(a[r, c], -1, p)
        for k in range(cols):
            a[r, k] = a[r, k] * inv % p
        for j in range(rows):
            if j == r or a[j, c] == 0:
                continue
            factor = a[j, c]
            for k in range(cols):
                a[j, k] = (a[j, k] - factor * a[r, k]) % p
                if a[j, k] < 0:
                    a[j, k] += p
        pivots.append(c)
        r += 1
    return r, pivots


def count_vanishing(
    long long[::1] coeffs,
    long long[:, ::1] var_idx,
    long long[::1] offsets,
    int n_vars,
    long long q,
    long long start,
    long long stop,
):
    """Candidate counter; same contract as the fallback.

    Candidate vectors are decoded once and then advanced as a base-q
    odometer (digit 0 fastest), matching the fallback's base-q encoding.
    """
    cdef Py_ssize_t n_coefs = offsets.shape[0] - 1
    cdef Py_ssize_t width = var_idx.shape[1]
    cdef long long[::1] vals = np.empty(n_vars, dtype=np.int64)
    cdef long long count = 0, cand, x, acc, prod
    cdef Py_ssize_t m, k, t, u
    cdef bint ok

    if start >= stop:
        return 0
    x = start
    for m in range(n_vars):
        vals[m] = x % q
        x //= q

    for cand in range(start, stop):
        ok = True
        for k in range(n_coefs):
            acc = 0
            for t in range(offsets[k], offsets[k + 1]):
                prod = coeffs[t]
                for u in range(width):
                    prod = prod * vals[var_idx[t, u]] % q
                acc = (acc + prod) % q
            if acc != 0:
                ok = False
                break
        if ok:
            count += 1
        # advance the odometer
        for m in range(n_vars):
            vals[m] += 1
            if vals[m] < q:
                break
            vals[m] = 0
    return count
